// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failing criteria. Each criterion is verified against independently derived
// reference values; none are tuned to the implementation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "seglab/blowup.hpp"
#include "seglab/experiment.hpp"
#include "seglab/monotonicity.hpp"
#include "seglab/profiles.hpp"
#include "seglab/solver.hpp"
#include "seglab/spectral.hpp"

using namespace seglab;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%2d] %-34s %s  (%s)\n", id, name.c_str(), ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> ladder(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / double(n - 1));
    return out;
}

const char* kDefaultConfig = R"(
name = "classified-beta-sweep"

[grid]
x_min = -1.0
x_max = 1.0
y_max = 1.0
nx = 201
ny = 101

[system]
k = 2
beta = 10.0
reaction = "zero"

[solver]
damping = 0.5
tol = 1e-10
max_iter = 400
method = "picard"

[dirichlet]
kind = "classified-pair"
mode = 0
c = 1.0

[scan]
centers = [0.0]
r_min = 0.1
r_max = 0.8
r_count = 36
nu = 0.5
nu_prime = 0.45
p = 3.0
holder_alpha = 0.45

[sweep]
beta = [10.0, 100.0, 1000.0, 10000.0]
)";

}  // namespace

int main() {
    // ---- 1: interior harmonicity of the closed-form profiles refines at 2nd order
    {
        const auto t0 = std::chrono::steady_clock::now();
        auto away = [](double x, double y) { return std::hypot(x, y) < 0.1; };
        bool ok = true;
        std::ostringstream det;
        const Profile profs[] = {sqrt_extension(), classified_pair(0), classified_pair(1)};
        const char* names[] = {"sqrt", "pair0", "pair1"};
        for (int p = 0; p < 3; ++p)
            for (int c = 0; c < profs[p].k; ++c) {
                double res[2];
                for (int pass = 0; pass < 2; ++pass) {
                    const int n = pass == 0 ? 101 : 201;
                    const HalfGrid g = HalfGrid::make(-1, 1, 1, 2 * n - 1, n);
                    res[pass] = interior_laplacian_residual(profs[p].sample(g), c, away);
                }
                const double ratio = res[0] / res[1];
                if (!(ratio >= 3.5 && ratio <= 4.5)) ok = false;
                det << names[p] << "[" << c << "]=" << ratio << " ";
            }
        const double dt = seconds_since(t0);
        if (dt >= 10.0) ok = false;
        det << "t=" << dt << "s";
        verdict(1, "harmonicity refinement ratio", ok, det.str());
    }

    // ---- 2: Almgren frequency of the segregated pair is 0.5 on [0.2, 0.8]
    {
        const HalfGrid g = HalfGrid::make(-1, 1, 1, 401, 201);
        const auto alm =
            almgren_segregated(classified_pair(0).sample(g), 0.0, ladder(0.2, 0.8, 25));
        double lo = 1e300, hi = -1e300;
        for (const auto& n : alm.N) {
            lo = std::min(lo, n.value_or(1e300));
            hi = std::max(hi, n.value_or(-1e300));
        }
        const bool ok = lo >= 0.48 && hi <= 0.52;
        std::ostringstream det;
        det << "N in [" << lo << ", " << hi << "], target 0.5 +- 0.02";
        verdict(2, "Almgren constancy at 1/2", ok, det.str());
    }

    // ---- 3: boundary ACF of the square-root extension is pi/4 on [0.2, 0.8]
    {
        const HalfGrid g = HalfGrid::make(-1, 1, 1, 401, 201);
        const auto res = acf_boundary(sqrt_extension().sample(g), 0.0, ladder(0.2, 0.8, 25));
        double worst = 0.0;
        for (double p : res.phi)
            worst = std::max(worst, std::abs(p - M_PI / 4) / (M_PI / 4));
        const bool ok = worst <= 0.02;
        std::ostringstream det;
        det << "max rel deviation from pi/4 = " << worst;
        verdict(3, "boundary ACF constant pi/4", ok, det.str());
    }

    // ---- 4: characteristic exponent identities
    {
        double worst = 0.0;
        for (int N = 1; N <= 10; ++N) {
            worst = std::max(worst, std::abs(gamma_exponent(0.0, N)));
            worst = std::max(worst, std::abs(gamma_exponent(double(N), N) - 1.0));
        }
        std::ostringstream det;
        det << "max |error| = " << worst;
        verdict(4, "exponent arithmetic", worst <= 1e-12, det.str());
    }

    // ---- 5: half-circle spectral closed forms
    {
        bool ok = true;
        ok &= lambda1(SpectralProblem::full(1)).lambda1 == 0.0;
        ok &= lambda1(SpectralProblem::cap(1, 1.0)).lambda1 == 0.25;
        ok &= lambda1(SpectralProblem::empty(1)).lambda1 == 1.0;
        const CapTable t = phi_caps(1, 65);
        double worst = 0.0;
        for (std::size_t s = 0; s < t.phi.size(); ++s)
            worst = std::max(worst, std::abs(t.phi[s] - 0.5));
        ok &= worst <= 1e-12;
        const NuAcfEstimate est = nu_acf_estimate(1, 65);
        ok &= std::abs(est.value - 0.5) <= 1e-12;
        std::ostringstream det;
        det << "lambda in {0,1/4,1}, max |phi - 1/2| = " << worst << ", nu = " << est.value;
        verdict(5, "half-circle closed forms", ok, det.str());
    }

    // ---- 6: hemisphere spectral targets at a 64x128 mesh
    {
        const auto t0 = std::chrono::steady_clock::now();
        const double l_full = lambda1(SpectralProblem::full(2, 64, 128)).lambda1;
        const double l_half = lambda1(SpectralProblem::cap(2, M_PI / 2, 64, 128)).lambda1;
        const double l_empty = lambda1(SpectralProblem::empty(2, 64, 128)).lambda1;
        const double dt = seconds_since(t0);
        bool ok = l_full <= 1e-3;
        ok &= std::abs(l_half - 0.75) <= 0.02 * 0.75;
        ok &= std::abs(l_empty - 2.0) <= 0.02 * 2.0;
        ok &= dt < 60.0;
        std::ostringstream det;
        det << "full=" << l_full << " half=" << l_half << " empty=" << l_empty
            << " (computed value matches the u=y Rayleigh quotient lambda=N=2; the "
               "literature states 2N=4 for this configuration - discrepancy logged)"
            << " t=" << dt << "s";
        verdict(6, "hemisphere eigenvalues", ok, det.str());
    }

    // ---- 7: supersolution property suite, zero violating nodes
    {
        bool ok = true;
        std::ostringstream det;
        for (int N : {1, 2})
            for (double M : {1.0, 10.0, 100.0})
                for (double delta : {0.0, 0.1}) {
                    const WdeltaProfile w(M, delta, N);
                    const auto rep = check_wdelta(w, 1.0 / 200.0);
                    if (!rep.passed()) {
                        ok = false;
                        det << "(M=" << M << ",d=" << delta << ",N=" << N << "):"
                            << rep.robin_violations << "R/" << rep.sphere_violations << "S/"
                            << rep.flat_bound_violations << "F ";
                    }
                }
        if (ok) det << "all 12 combinations clean";
        verdict(7, "supersolution suite", ok, det.str());
    }

    // ---- 8: decay bracket for the solved Robin problem, M = 10
    {
        const HalfGrid g = HalfGrid::make(-1, 1, 1, 401, 201);
        std::vector<double> lam(g.nx, 10.0), rhs(g.nx, 0.0);
        const Field v = solve_linear_bvp(g, DirichletData::constant(1.0), lam, rhs);
        double sup = -1e300, inf = 1e300;
        for (int i = 0; i < g.nx; ++i) {
            if (std::abs(g.x(i)) > 0.5) continue;
            sup = std::max(sup, v(0, i, 0));
            inf = std::min(inf, v(0, i, 0));
        }
        const bool upper = sup <= 0.105;
        const bool lower = inf >= (1.0 / 11.0) * 0.95;
        std::ostringstream det;
        det << "flat sup = " << sup << " (<= 0.105: " << (upper ? "yes" : "no")
            << "), flat inf = " << inf << " (>= " << (1.0 / 11.0) * 0.95 << ": "
            << (lower ? "yes" : "no") << ")";
        verdict(8, "decay sharpness bracket", upper && lower, det.str());
    }

    // ---- default experiment (used by 9, 10, 12, 13)
    const auto cfg = ExperimentConfig::from_toml(toml::parse(kDefaultConfig));
    const fs::path out_a = fs::temp_directory_path() / "seglab-acceptance-a";
    const fs::path out_b = fs::temp_directory_path() / "seglab-acceptance-b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    run_experiment(cfg, out_a);
    const fs::path dir_a = out_a / cfg.name;

    auto read_sweep = [&](const fs::path& dir) {
        std::istringstream in(read_text(dir / "sweep.csv"));
        std::string line;
        std::getline(in, line);
        std::vector<std::vector<double>> rows;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string cell;
            std::vector<double> vals;
            while (std::getline(row, cell, ','))
                vals.push_back(std::strtod(cell.c_str(), nullptr));
            if (!vals.empty()) rows.push_back(vals);
        }
        return rows;
    };
    const auto sweep = read_sweep(dir_a);

    // ---- 9: overlap decays along the beta sweep
    {
        bool ok = sweep.size() == 4;
        double w0 = ok ? sweep[0][2] : 0.0;
        std::ostringstream det;
        for (std::size_t i = 0; ok && i < sweep.size(); ++i) {
            if (i > 0 && !(sweep[i][1] < sweep[i - 1][1])) ok = false;
            if (sweep[i][2] > 3.0 * w0) ok = false;
        }
        if (ok && !(sweep.back()[1] < 1e-2 * sweep.front()[1])) ok = false;
        if (sweep.size() == 4)
            det << "overlap " << sweep.front()[1] << " -> " << sweep.back()[1]
                << ", weighted max/first = "
                << std::max({sweep[0][2], sweep[1][2], sweep[2][2], sweep[3][2]}) / w0;
        verdict(9, "beta-sweep segregation", ok, det.str());
    }

    // ---- 10: monotonicity of the frequency and perturbed ACF on every solve
    {
        const ReportResult rep = report_experiment(dir_a, 1e-3);
        std::ostringstream det;
        // keep the first offending line, or the count of scans checked
        int scans = 0;
        std::istringstream lines(rep.text);
        std::string line, bad;
        while (std::getline(lines, line)) {
            if (line.find("monotonicity") != std::string::npos) ++scans;
            if (bad.empty() && line.find("FAIL") != std::string::npos) bad = line;
        }
        det << scans << " scans, dip tolerance 1e-3";
        if (!bad.empty()) det << "; first failure: " << bad;
        verdict(10, "monotone scan suites", rep.exit_code == 0, det.str());
    }

    // ---- 11: Pohozaev residual decays at first order or better under refinement
    {
        const SystemParams p = SystemParams::make(2, 0.0, Reaction::zero(2));
        bool ok = true;
        std::ostringstream det;
        for (double x0 : {0.0, 0.3, -0.3}) {
            double worst[2];
            for (int pass = 0; pass < 2; ++pass) {
                const int n = pass == 0 ? 101 : 201;
                const HalfGrid g = HalfGrid::make(-1, 1, 1, 2 * n - 1, n);
                const Field f = classified_pair(0).sample(g);
                // radii keep every arc away from the free-boundary point
                const auto res = pohozaev_residual_sphere(f, p, x0, {0.1, 0.2, 0.4});
                worst[pass] = 0.0;
                for (double r : res) worst[pass] = std::max(worst[pass], std::abs(r));
            }
            const double factor = worst[0] / worst[1];
            if (!(factor >= 1.8)) ok = false;
            det << "x0=" << x0 << ": x" << factor << " ";
        }
        verdict(11, "Pohozaev residual decay", ok, det.str());
    }

    // ---- 12: growth-exponent fits and Hölder stability across the sweep tail
    {
        const HalfGrid g = HalfGrid::make(-1, 1, 1, 401, 201);
        const auto radii = ladder(0.2, 0.8, 13);
        const auto a_pair = almgren_segregated(classified_pair(0).sample(g), 0.0, radii);
        const auto a_lin = almgren_segregated(linear_y_profile().sample(g), 0.0, radii);
        const double nu_pair = fit_growth_exponent(a_pair.radii, a_pair.H).nu;
        const double nu_lin = fit_growth_exponent(a_lin.radii, a_lin.H).nu;
        bool ok = std::abs(nu_pair - 0.5) <= 0.02 && std::abs(nu_lin - 1.0) <= 0.02;
        double hold_rel = -1.0;
        if (sweep.size() == 4) {
            hold_rel = std::abs(sweep[3][3] - sweep[2][3]) / sweep[2][3];
            ok &= hold_rel <= 0.10;
        } else {
            ok = false;
        }
        std::ostringstream det;
        det << "nu(pair)=" << nu_pair << " nu(linear)=" << nu_lin
            << " holder drift beta 1e3->1e4 = " << hold_rel;
        verdict(12, "exponent fit and Hölder drift", ok, det.str());
    }

    // ---- 13: determinism of the default experiment
    {
        run_experiment(cfg, out_b);
        const fs::path dir_b = out_b / cfg.name;
        bool ok = true;
        int compared = 0;
        std::ostringstream det;
        for (const auto& e : fs::directory_iterator(dir_a)) {
            if (e.path().extension() != ".csv") continue;
            ++compared;
            if (read_text(e.path()) != read_text(dir_b / e.path().filename())) {
                ok = false;
                det << e.path().filename().string() << " differs ";
            }
        }
        if (compared == 0) ok = false;
        det << compared << " CSV files bit-identical";
        verdict(13, "determinism", ok, det.str());
    }

    fs::remove_all(out_a);
    fs::remove_all(out_b);

    std::printf("\n%d of 13 criteria failed\n", failures);
    return failures;
}
