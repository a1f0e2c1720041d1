#pragma once

// Experiment orchestration: TOML config parsing with field-level validation,
// the solve -> scan -> sweep -> fit pipeline, hash-keyed idempotent reruns,
// and the report generator.

#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "seglab/blowup.hpp"
#include "seglab/io.hpp"
#include "seglab/monotonicity.hpp"
#include "seglab/profiles.hpp"
#include "seglab/solver.hpp"
#include "seglab/toml.hpp"

namespace seglab {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error("config error at `" + field + "`: " + what) {}
};

struct ExperimentConfig {
    std::string name = "experiment";

    // [grid]
    double x_min = -1.0, x_max = 1.0, y_max = 1.0;
    int nx = 201, ny = 101;

    // [system]
    int k = 2;
    double beta = 0.0;
    std::string reaction_kind = "zero";  // zero | linear | gross-pitaevskii
    std::vector<double> omega, lambda;
    std::vector<std::vector<double>> a;

    // [solver]
    double damping = 0.5, tol = 1e-10;
    int max_iter = 400;
    std::string method = "picard";  // picard | newton

    // [dirichlet]
    std::string dirichlet_kind = "classified-pair";  // classified-pair | bump | constant
    int classified_mode = 0;
    double classified_c = 1.0;
    double bump_width = 0.5, bump_height = 1.0;
    double constant_value = 1.0;

    // [scan]
    std::vector<double> centers{0.0};
    double r_min = 0.1, r_max = 0.8;
    int r_count = 36;
    double nu = 0.5, nu_prime = 0.45;
    double kernel_eps = 0.0;  // 0 = 2h
    double psi_p = 3.0;
    double holder_alpha = 0.45;

    // [sweep]
    std::vector<double> betas;

    // [output]
    std::string out_dir = "out";

    HalfGrid grid() const { return HalfGrid::make(x_min, x_max, y_max, nx, ny); }

    Reaction reaction() const {
        if (reaction_kind == "zero") return Reaction::zero(k);
        if (reaction_kind == "linear") {
            if (int(lambda.size()) != k)
                throw ConfigError("system.lambda", "need k entries for a linear reaction");
            return Reaction::linear(lambda);
        }
        if (reaction_kind == "gross-pitaevskii") {
            if (int(omega.size()) != k || int(lambda.size()) != k)
                throw ConfigError("system.omega", "need k omega and lambda entries");
            return Reaction::gross_pitaevskii(omega, lambda);
        }
        throw ConfigError("system.reaction", "unknown kind '" + reaction_kind + "'");
    }

    SystemParams params(double beta_value) const {
        return SystemParams::make(k, beta_value, reaction(), a);
    }

    DirichletData dirichlet() const {
        if (dirichlet_kind == "classified-pair") {
            const Profile p = classified_pair(classified_mode, classified_c);
            if (k > p.k)
                throw ConfigError("dirichlet.kind", "classified-pair provides 2 components");
            return p.trace();
        }
        if (dirichlet_kind == "bump") {
            const double w = bump_width, hgt = bump_height;
            const int kk = k;
            return DirichletData{[w, hgt, kk](int c, double x, double) {
                // component c's bump centered at its slot in [-1, 1]
                const double center = kk == 1 ? 0.0 : -1.0 + 2.0 * (c + 0.5) / kk;
                const double t = (x - center) / w;
                return std::abs(t) < 1.0 ? hgt * std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
            }};
        }
        if (dirichlet_kind == "constant") return DirichletData::constant(constant_value);
        throw ConfigError("dirichlet.kind", "unknown kind '" + dirichlet_kind + "'");
    }

    SolveOptions solve_options() const {
        SolveOptions o;
        o.damping = damping;
        o.tol = tol;
        o.max_iter = max_iter;
        o.newton = method == "newton";
        return o;
    }

    std::vector<double> scan_radii(double h) const {
        std::vector<double> out;
        for (int i = 0; i < r_count; ++i)
            out.push_back(r_min + (r_max - r_min) * i / double(r_count - 1));
        (void)h;
        return out;
    }

    ScanOptions scan_options() const {
        ScanOptions o;
        o.nu = nu;
        o.nu_prime = nu_prime;
        o.kernel_eps = kernel_eps;
        o.p = psi_p;
        return o;
    }

    // Canonical serialization used for hashing; field order fixed.
    std::string canonical() const {
        std::ostringstream s;
        s.precision(17);
        s << name << '|' << x_min << ',' << x_max << ',' << y_max << ',' << nx << ',' << ny
          << '|' << k << ',' << beta << ',' << reaction_kind;
        for (double v : omega) s << ',' << v;
        s << ';';
        for (double v : lambda) s << ',' << v;
        s << ';';
        for (const auto& row : a)
            for (double v : row) s << ',' << v;
        s << '|' << damping << ',' << tol << ',' << max_iter << ',' << method;
        s << '|' << dirichlet_kind << ',' << classified_mode << ',' << classified_c << ','
          << bump_width << ',' << bump_height << ',' << constant_value;
        s << '|';
        for (double c : centers) s << c << ',';
        s << r_min << ',' << r_max << ',' << r_count << ',' << nu << ',' << nu_prime << ','
          << kernel_eps << ',' << psi_p << ',' << holder_alpha << '|';
        for (double b : betas) s << b << ',';
        return s.str();
    }

    std::string hash() const { return hash_hex(fnv1a_hash(canonical())); }

    static ExperimentConfig from_toml(const toml::Table& t);
    static ExperimentConfig from_file(const std::filesystem::path& path) {
        return from_toml(toml::parse(read_text(path)));
    }
};

inline ExperimentConfig ExperimentConfig::from_toml(const toml::Table& t) {
    ExperimentConfig c;
    auto get = [&](const std::string& sec, const std::string& key) -> const toml::Value* {
        auto si = t.find(sec);
        if (si == t.end()) return nullptr;
        auto ki = si->second.find(key);
        return ki == si->second.end() ? nullptr : &ki->second;
    };
    auto num = [&](const std::string& sec, const std::string& key, double& dst) {
        if (const auto* v = get(sec, key)) {
            try {
                dst = v->as_number();
            } catch (const std::exception& e) {
                throw ConfigError(sec + "." + key, e.what());
            }
        }
    };
    auto integer = [&](const std::string& sec, const std::string& key, int& dst) {
        if (const auto* v = get(sec, key)) {
            try {
                dst = v->as_int();
            } catch (const std::exception& e) {
                throw ConfigError(sec + "." + key, e.what());
            }
        }
    };
    auto str = [&](const std::string& sec, const std::string& key, std::string& dst) {
        if (const auto* v = get(sec, key)) {
            try {
                dst = v->as_string();
            } catch (const std::exception& e) {
                throw ConfigError(sec + "." + key, e.what());
            }
        }
    };
    auto numbers = [&](const std::string& sec, const std::string& key,
                       std::vector<double>& dst) {
        if (const auto* v = get(sec, key)) {
            try {
                dst = v->as_number_array();
            } catch (const std::exception& e) {
                throw ConfigError(sec + "." + key, e.what());
            }
        }
    };

    str("", "name", c.name);
    num("grid", "x_min", c.x_min);
    num("grid", "x_max", c.x_max);
    num("grid", "y_max", c.y_max);
    integer("grid", "nx", c.nx);
    integer("grid", "ny", c.ny);
    try {
        c.grid();
    } catch (const std::exception& e) {
        throw ConfigError("grid", e.what());
    }

    integer("system", "k", c.k);
    num("system", "beta", c.beta);
    str("system", "reaction", c.reaction_kind);
    numbers("system", "omega", c.omega);
    numbers("system", "lambda", c.lambda);
    if (const auto* v = get("system", "a")) {
        try {
            for (const auto& row : v->as_array()) c.a.push_back(row.as_number_array());
        } catch (const std::exception& e) {
            throw ConfigError("system.a", e.what());
        }
    }
    if (c.k < 1) throw ConfigError("system.k", "must be >= 1");
    if (c.beta < 0.0) throw ConfigError("system.beta", "must be >= 0");
    try {
        c.params(c.beta);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("system", e.what());
    }

    num("solver", "damping", c.damping);
    num("solver", "tol", c.tol);
    integer("solver", "max_iter", c.max_iter);
    str("solver", "method", c.method);
    if (!(c.damping > 0.0 && c.damping <= 1.0))
        throw ConfigError("solver.damping", "must lie in (0, 1]");
    if (c.max_iter <= 0) throw ConfigError("solver.max_iter", "must be positive");
    if (c.method != "picard" && c.method != "newton")
        throw ConfigError("solver.method", "must be 'picard' or 'newton'");

    str("dirichlet", "kind", c.dirichlet_kind);
    integer("dirichlet", "mode", c.classified_mode);
    num("dirichlet", "c", c.classified_c);
    num("dirichlet", "width", c.bump_width);
    num("dirichlet", "height", c.bump_height);
    num("dirichlet", "value", c.constant_value);
    try {
        c.dirichlet();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("dirichlet", e.what());
    }

    numbers("scan", "centers", c.centers);
    num("scan", "r_min", c.r_min);
    num("scan", "r_max", c.r_max);
    integer("scan", "r_count", c.r_count);
    num("scan", "nu", c.nu);
    num("scan", "nu_prime", c.nu_prime);
    num("scan", "kernel_eps", c.kernel_eps);
    num("scan", "p", c.psi_p);
    num("scan", "holder_alpha", c.holder_alpha);
    if (!(c.r_min > 0.0 && c.r_max > c.r_min))
        throw ConfigError("scan.r_min", "need 0 < r_min < r_max");
    if (c.r_count < 3) throw ConfigError("scan.r_count", "need at least 3 radii");
    {
        const HalfGrid g = c.grid();
        for (double x0 : c.centers)
            if (!g.contains_half_ball(x0, c.r_max))
                throw ConfigError("scan.centers",
                                  "half-ball of radius r_max leaves the grid at center " +
                                      std::to_string(x0));
    }
    if (!(c.nu_prime > 0.0 && c.nu_prime < c.nu))
        throw ConfigError("scan.nu_prime", "must satisfy 0 < nu' < nu");

    numbers("sweep", "beta", c.betas);
    for (std::size_t i = 0; i < c.betas.size(); ++i) {
        if (c.betas[i] <= 0.0) throw ConfigError("sweep.beta", "entries must be positive");
        if (i > 0 && c.betas[i] <= c.betas[i - 1])
            throw ConfigError("sweep.beta", "entries must be strictly ascending");
    }

    str("output", "dir", c.out_dir);
    return c;
}

// ---------------------------------------------------------------------------
// Pipeline

struct RunManifest {
    std::string config_hash;
    std::string name;
    bool skipped = false;  // reused a previous identical run
    std::vector<std::string> files;
    json stages = json::array();

    json to_json() const {
        return json{{"config_hash", config_hash},
                    {"name", name},
                    {"tool_version", "1.0.0"},
                    {"files", files},
                    {"stages", stages}};
    }
};

inline RunManifest run_experiment(const ExperimentConfig& cfg,
                                  const std::filesystem::path& out_root, bool force = false) {
    namespace fs = std::filesystem;
    const fs::path dir = out_root / cfg.name;
    const std::string hash = cfg.hash();
    RunManifest man;
    man.config_hash = hash;
    man.name = cfg.name;

    const fs::path manifest_path = dir / "manifest.json";
    if (!force && fs::exists(manifest_path)) {
        try {
            const json old = json::parse(read_text(manifest_path));
            if (old.at("config_hash") == hash) {
                man.skipped = true;
                man.files = old.at("files").get<std::vector<std::string>>();
                man.stages = old.at("stages");
                return man;
            }
        } catch (const std::exception&) {
            // unreadable manifest: fall through and recompute
        }
    }
    fs::create_directories(dir);

    const HalfGrid grid = cfg.grid();
    const DirichletData data = cfg.dirichlet();
    const SolveOptions sopts = cfg.solve_options();
    const auto radii = cfg.scan_radii(grid.h);

    std::vector<double> sweep_betas = cfg.betas;
    if (sweep_betas.empty()) sweep_betas.push_back(cfg.beta);

    auto emit = [&](const fs::path& p, const std::string& text) {
        write_text(p, text);
        man.files.push_back(fs::relative(p, dir).string());
    };

    std::vector<double> col_beta, col_overlap, col_weighted, col_holder, col_nu_fit;
    std::optional<Field> warm;

    for (double beta : sweep_betas) {
        const SystemParams params = cfg.params(beta);
        const SystemSolution sol =
            solve_system(grid, params, data, sopts, warm ? &*warm : nullptr);
        if (!sol.report.error.empty())
            throw std::runtime_error("solve stage (beta = " + std::to_string(beta) +
                                     "): " + sol.report.error);
        warm = sol.field;  // continuation along the sweep

        std::ostringstream tag;
        tag << "beta-" << beta;
        const std::string btag = tag.str();

        json stage = {{"stage", "solve"},
                      {"beta", beta},
                      {"converged", sol.report.converged},
                      {"iterations", sol.report.iterations},
                      {"discrete_residual", sol.report.discrete_residual},
                      {"flux_residual", sol.report.flux_residual}};
        man.stages.push_back(stage);

        write_field_dump(dir / ("field-" + btag), sol.field, hash, {{"beta", beta}});
        man.files.push_back("field-" + btag + ".f64");
        man.files.push_back("field-" + btag + ".json");

        RadialScan first_scan;
        for (double x0 : cfg.centers) {
            const RadialScan scan = full_scan(sol.field, params, x0, radii, cfg.scan_options());
            if (x0 == cfg.centers.front()) first_scan = scan;
            std::ostringstream name;
            name << "scan-" << btag << "-x" << x0 << ".csv";
            emit(dir / name.str(), scan_to_csv(scan));
            man.stages.push_back({{"stage", "scan"}, {"beta", beta}, {"center", x0}});
        }

        // sweep metrics at the first center
        const double x0 = cfg.centers.front();
        const SegregationMass mass =
            segregation_mass(sol.field, params, x0 - cfg.r_max, x0 + cfg.r_max);
        const HolderEstimate hold = holder_seminorm(
            sol.field, 0, cfg.holder_alpha,
            [&](double x, double y) { return std::hypot(x - x0, y) <= cfg.r_max; });
        std::vector<double> rs, Hs;
        for (const auto& rec : first_scan.records) {
            rs.push_back(rec.r);
            Hs.push_back(rec.H);
        }
        const GrowthFit fit = fit_growth_exponent(rs, Hs);

        col_beta.push_back(beta);
        col_overlap.push_back(mass.overlap);
        col_weighted.push_back(mass.weighted);
        col_holder.push_back(hold.seminorm);
        col_nu_fit.push_back(fit.nu);
    }

    emit(dir / "sweep.csv",
         columns_to_csv({"beta", "overlap", "weighted_mass", "holder_seminorm_at_alpha",
                         "nu_fit"},
                        {col_beta, col_overlap, col_weighted, col_holder, col_nu_fit}));
    man.stages.push_back({{"stage", "sweep"}, {"betas", sweep_betas}});

    write_text(manifest_path, man.to_json().dump(2) + "\n");
    return man;
}

// ---------------------------------------------------------------------------
// Report

struct ReportResult {
    std::string text;
    int exit_code = 0;  // 0 pass, 1 suite failure
};

inline ReportResult report_experiment(const std::filesystem::path& experiment_dir,
                                      double dip_tol = 1e-3) {
    namespace fs = std::filesystem;
    const json man = json::parse(read_text(experiment_dir / "manifest.json"));
    std::ostringstream out;
    out << "experiment: " << man.at("name").get<std::string>() << "\n";
    out << "config hash: " << man.at("config_hash").get<std::string>() << "\n\n";
    bool all_ok = true;

    for (const auto& file : man.at("files")) {
        const std::string fname = file.get<std::string>();
        if (fname.rfind("scan-", 0) != 0 || fname.find(".csv") == std::string::npos) continue;
        // parse the scan CSV back
        std::istringstream in(read_text(experiment_dir / fname));
        std::string line;
        std::getline(in, line);  // header
        std::vector<double> r, N, pert;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string cell;
            std::vector<double> vals;
            while (std::getline(row, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
            if (vals.size() < 10) continue;
            r.push_back(vals[0]);
            N.push_back(vals[3]);
            pert.push_back(vals[5]);
        }
        // frequency monotone over the full scan, perturbed ACF over the
        // upper half, relative dips bounded by dip_tol
        bool ok = true;
        double worst = 0.0, worst_r = 0.0;
        for (std::size_t i = 1; i < r.size(); ++i) {
            const double dip = (N[i - 1] - N[i]) / std::max(std::abs(N[i - 1]), 1e-30);
            if (dip > worst) {
                worst = dip;
                worst_r = r[i];
            }
        }
        for (std::size_t i = 1; i < r.size(); ++i) {
            if (r[i] < 0.5 * (r.front() + r.back())) continue;
            const double dip =
                (pert[i - 1] - pert[i]) / std::max(std::abs(pert[i - 1]), 1e-30);
            if (dip > worst) {
                worst = dip;
                worst_r = r[i];
            }
        }
        ok = worst <= dip_tol;
        all_ok = all_ok && ok;
        out << fname << ": monotonicity " << (ok ? "pass" : "FAIL") << " (worst dip "
            << worst;
        if (!ok) out << " at r = " << worst_r;
        out << ")\n";
    }

    if (fs::exists(experiment_dir / "sweep.csv")) {
        std::istringstream in(read_text(experiment_dir / "sweep.csv"));
        std::string line;
        std::getline(in, line);
        out << "\nsweep:\n  " << line << "\n";
        while (std::getline(in, line)) out << "  " << line << "\n";
    }

    out << "\noverall: " << (all_ok ? "pass" : "FAIL") << "\n";
    return ReportResult{out.str(), all_ok ? 0 : 1};
}

}  // namespace seglab
