#pragma once

// Output plumbing: CSV writers (17 significant digits), raw little-endian
// float64 field dumps with JSON sidecars, and the FNV-1a config hash that
// keys idempotent reruns.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "seglab/grid.hpp"
#include "seglab/monotonicity.hpp"

namespace seglab {

using json = nlohmann::json;

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline uint64_t fnv1a_hash(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

// One row per radius: r, E, H, N, Phi_seg, Phi_pert, Phi_boundary,
// Phi_morrey, poho_res, psi. Undefined frequencies print as nan.
inline std::string scan_to_csv(const RadialScan& scan) {
    std::string out = "r,E,H,N,Phi_seg,Phi_pert,Phi_boundary,Phi_morrey,poho_res,psi\n";
    for (const auto& rec : scan.records) {
        out += format_g17(rec.r) + ',' + format_g17(rec.E) + ',' + format_g17(rec.H) + ',';
        out += rec.N ? format_g17(*rec.N) : std::string("nan");
        out += ',' + format_g17(rec.phi_seg) + ',' + format_g17(rec.phi_pert) + ',' +
               format_g17(rec.phi_boundary) + ',' + format_g17(rec.phi_morrey) + ',' +
               format_g17(rec.poho_res) + ',' + format_g17(rec.psi) + '\n';
    }
    return out;
}

// Generic CSV: header names + column vectors of equal length.
inline std::string columns_to_csv(const std::vector<std::string>& names,
                                  const std::vector<std::vector<double>>& cols) {
    if (names.size() != cols.size())
        throw std::invalid_argument("columns_to_csv: header/column count mismatch");
    std::string out;
    for (std::size_t c = 0; c < names.size(); ++c)
        out += (c ? "," : "") + names[c];
    out += '\n';
    const std::size_t rows = cols.empty() ? 0 : cols[0].size();
    for (const auto& col : cols)
        if (col.size() != rows)
            throw std::invalid_argument("columns_to_csv: ragged columns");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c)
            out += (c ? "," : "") + format_g17(cols[c][r]);
        out += '\n';
    }
    return out;
}

// Raw little-endian float64 dump of the field values, component-major, plus a
// JSON sidecar describing the grid, the config hash, and extra metadata.
inline void write_field_dump(const std::filesystem::path& base, const Field& f,
                             const std::string& config_hash, const json& extra = json::object()) {
    const auto raw_path = base.string() + ".f64";
    std::ofstream out(raw_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + raw_path);
    static_assert(sizeof(double) == 8);
    // this code assumes a little-endian host, as do all shipped targets
    out.write(reinterpret_cast<const char*>(f.data().data()),
              std::streamsize(f.data().size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + raw_path);

    const HalfGrid& g = f.grid();
    json side = {
        {"format", "float64-le"},
        {"layout", "component-major, then x, then y"},
        {"components", f.components()},
        {"grid", {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_max", g.y_max},
                  {"nx", g.nx}, {"ny", g.ny}, {"h", g.h}}},
        {"config_hash", config_hash},
    };
    for (auto it = extra.begin(); it != extra.end(); ++it) side[it.key()] = it.value();
    write_text(base.string() + ".json", side.dump(2) + "\n");
}

inline Field read_field_dump(const std::filesystem::path& base) {
    const json side = json::parse(read_text(base.string() + ".json"));
    const auto& gj = side.at("grid");
    const HalfGrid g = HalfGrid::make(gj.at("x_min"), gj.at("x_max"), gj.at("y_max"),
                                      gj.at("nx"), gj.at("ny"));
    Field f(g, side.at("components"));
    std::ifstream in(base.string() + ".f64", std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + base.string() + ".f64");
    in.read(reinterpret_cast<char*>(f.data().data()),
            std::streamsize(f.data().size() * sizeof(double)));
    if (std::size_t(in.gcount()) != f.data().size() * sizeof(double))
        throw std::runtime_error("field dump truncated: " + base.string());
    return f;
}

}  // namespace seglab
