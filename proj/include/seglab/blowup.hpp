#pragma once

// Blow-up toolkit: smooth cutoff, Hölder-seminorm measurement, rescaling to a
// target frame, segregation metrics on the flat boundary, zero-set extraction
// and growth-exponent fitting from the height function of a radial scan.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "seglab/grid.hpp"
#include "seglab/quadrature.hpp"
#include "seglab/reaction.hpp"

namespace seglab {

// Radial cutoff: 1 on [0, 1/2], 0 at 1, C^2 across the junctions (quintic
// smoothstep on the transition).
inline double eta_cutoff(double d) {
    d = std::abs(d);
    if (d <= 0.5) return 1.0;
    if (d >= 1.0) return 0.0;
    const double t = 2.0 * (d - 0.5);
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

// ---------------------------------------------------------------------------
// Hölder seminorm

struct HolderEstimate {
    double alpha = 0.0;
    double seminorm = 0.0;
    // achieving pair (x, y) coordinates
    double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;
};

namespace detail {

struct NodePt {
    double x, y, v;
    int i, j;
};

inline HolderEstimate holder_pairs(const std::vector<NodePt>& pts, double alpha) {
    HolderEstimate best;
    best.alpha = alpha;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const double d = std::hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y);
            if (d <= 0.0) continue;
            const double q = std::abs(pts[a].v - pts[b].v) / std::pow(d, alpha);
            if (q > best.seminorm + 1e-15 * best.seminorm) {
                best.seminorm = q;
                best.x1 = pts[a].x; best.y1 = pts[a].y;
                best.x2 = pts[b].x; best.y2 = pts[b].y;
            }
        }
    return best;
}

}  // namespace detail

// max over node pairs in the region of |v(X') - v(X'')| / |X' - X''|^alpha,
// for component c. Exact for small regions; above `exact_limit` nodes a
// stride-4 pass picks candidates and a local full pass refines around them.
inline HolderEstimate holder_seminorm(const Field& v, int c, double alpha,
                                      const std::function<bool(double, double)>& region,
                                      std::size_t exact_limit = 10000) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("holder_seminorm: alpha must lie in (0,1)");
    const HalfGrid& g = v.grid();
    std::vector<detail::NodePt> pts;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            if (region(g.x(i), g.y(j)))
                pts.push_back({g.x(i), g.y(j), v(c, i, j), i, j});
    if (pts.empty()) throw std::invalid_argument("holder_seminorm: empty region");
    if (pts.size() <= exact_limit) return detail::holder_pairs(pts, alpha);

    // coarse pass on a stride-4 subsample
    std::vector<detail::NodePt> coarse;
    for (const auto& p : pts)
        if (p.i % 4 == 0 && p.j % 4 == 0) coarse.push_back(p);
    HolderEstimate rough = detail::holder_pairs(coarse, alpha);
    // refine: all nodes within 5h of either endpoint of the coarse winner,
    // paired against the full coarse set and each other
    std::vector<detail::NodePt> fine;
    for (const auto& p : pts) {
        const double d1 = std::hypot(p.x - rough.x1, p.y - rough.y1);
        const double d2 = std::hypot(p.x - rough.x2, p.y - rough.y2);
        if (d1 <= 5 * g.h || d2 <= 5 * g.h) fine.push_back(p);
    }
    for (const auto& p : coarse) fine.push_back(p);
    HolderEstimate refined = detail::holder_pairs(fine, alpha);
    refined.alpha = alpha;
    return refined.seminorm >= rough.seminorm ? refined : rough;
}

// ---------------------------------------------------------------------------
// Rescaling

struct RescaleSpec {
    double px = 0.0;       // base point on the flat boundary
    double r = 1.0;        // scale
    double L = 1.0;        // normalization
    double alpha = 0.5;    // exponent
    bool apply_cutoff = false;  // multiply the source by eta(|X - P|) first
};

// Samples eta(P) v(P + r X) / (L r^alpha) on the target grid. Every sample
// P + r X must land inside the source grid.
inline Field rescale(const Field& v, const RescaleSpec& spec, const HalfGrid& target) {
    if (!(spec.r > 0.0) || !(spec.L > 0.0))
        throw std::invalid_argument("rescale: r and L must be positive");
    const HalfGrid& src = v.grid();
    const double scale = 1.0 / (spec.L * std::pow(spec.r, spec.alpha));
    Field out(target, v.components());
    for (int c = 0; c < v.components(); ++c)
        for (int i = 0; i < target.nx; ++i)
            for (int j = 0; j < target.ny; ++j) {
                const double sx = spec.px + spec.r * target.x(i);
                const double sy = spec.r * target.y(j);
                if (!src.contains(sx, sy, 1e-9))
                    throw std::out_of_range("rescale: sample outside the source grid");
                double val = v.value(c, sx, sy);
                if (spec.apply_cutoff)
                    val *= eta_cutoff(std::hypot(sx - spec.px, sy));
                out(c, i, j) = val * scale;
            }
    return out;
}

// ---------------------------------------------------------------------------
// Segregation metrics on a flat-boundary interval [a, b]

struct SegregationMass {
    double overlap = 0.0;        // int sum_{i<j} v_i^2 v_j^2
    double weighted = 0.0;       // beta times the a_ij-weighted overlap
};

inline SegregationMass segregation_mass(const Field& v, const SystemParams& params,
                                        double a, double b) {
    const HalfGrid& g = v.grid();
    if (a >= b || a < g.x_min - 1e-12 || b > g.x_max + 1e-12)
        throw std::invalid_argument("segregation_mass: bad interval");
    const int k = v.components();
    SegregationMass out;
    auto integrate = [&](const std::function<double(double)>& f) {
        return flat_integral([&](double x) { return f(x); }, 0.5 * (a + b), 0.5 * (b - a),
                             g.h);
    };
    out.overlap = integrate([&](double x) {
        double s = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < i; ++j) {
                const double q = v.value(i, x, 0.0) * v.value(j, x, 0.0);
                s += q * q;
            }
        return s;
    });
    out.weighted = params.beta * integrate([&](double x) {
        double s = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < i; ++j) {
                const double q = v.value(i, x, 0.0) * v.value(j, x, 0.0);
                s += params.a[i][j] * q * q;
            }
        return s;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Zero set of the boundary trace

struct ZeroSet {
    std::vector<int> nodes;          // flat-boundary indices with all traces below tol
    std::vector<double> distance;    // per boundary node, distance to the zero set
    double tol = 0.0;
};

// Default tolerance: 10 h max_i |grad v_i| over the flat boundary row.
inline ZeroSet zero_set(const Field& v, double tol = 0.0) {
    const HalfGrid& g = v.grid();
    const int k = v.components();
    if (tol <= 0.0) {
        FieldGradient grad(v);
        double gmax = 0.0;
        for (int i = 0; i < g.nx; ++i)
            gmax = std::max(gmax, std::sqrt(grad.grad_sq_sum(g.x(i), 0.0)));
        tol = 10.0 * g.h * gmax;
        if (tol <= 0.0) tol = 10.0 * g.h;  // identically zero field
    }
    ZeroSet out;
    out.tol = tol;
    for (int i = 0; i < g.nx; ++i) {
        double m = 0.0;
        for (int c = 0; c < k; ++c) m = std::max(m, std::abs(v(c, i, 0)));
        if (m <= tol) out.nodes.push_back(i);
    }
    out.distance.assign(g.nx, std::numeric_limits<double>::infinity());
    for (int i = 0; i < g.nx; ++i)
        for (int z : out.nodes)
            out.distance[i] = std::min(out.distance[i], std::abs(g.x(i) - g.x(z)));
    return out;
}

// ---------------------------------------------------------------------------
// Growth-exponent fit

struct GrowthFit {
    double nu = 0.0;        // half of the log H vs log r slope
    double residual = 0.0;  // rms residual of the linear fit
};

inline GrowthFit fit_growth_exponent(const std::vector<double>& radii,
                                     const std::vector<double>& H) {
    if (radii.size() != H.size() || radii.size() < 3)
        throw std::invalid_argument("fit_growth_exponent: need >= 3 (r, H) samples");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(H[i] > 0.0))
            throw std::invalid_argument("fit_growth_exponent: nonpositive H in window");
        lx.push_back(std::log(radii[i]));
        ly.push_back(std::log(H[i]));
    }
    const double n = double(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-14)
        throw std::invalid_argument("fit_growth_exponent: degenerate radius window");
    const double slope = (n * sxy - sx * sy) / denom;
    const double icpt = (sy - slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (slope * lx[i] + icpt);
        rss += e * e;
    }
    return GrowthFit{0.5 * slope, std::sqrt(rss / n)};
}

// ---------------------------------------------------------------------------
// Decay check for the Robin comparison problem

struct DecayCheck {
    double flat_sup = 0.0;   // sup of v on the flat boundary, |x| <= 1/2
    double flat_inf = 0.0;
    double arc_sup = 0.0;    // sup / inf of v on the unit half-arc
    double arc_inf = 0.0;
    double upper_bound = 0.0;  // (1+delta)/M * arc_sup, slack applied
    double lower_bound = 0.0;  // 1/(1+M) * arc_inf, slack applied
    bool upper_ok = false;
    bool lower_ok = false;
};

// Verifies sup_{flat, |x|<1/2} v <= (1+delta)/M sup_{arc} v and
// inf_{flat, |x|<1/2} v >= 1/(1+M) inf_{arc} v, with a configurable
// discretization slack (relative, default 5%).
inline DecayCheck decay_check(const Field& v, double M, double delta = 0.0,
                              double slack = 0.05, double x0 = 0.0, double r_arc = 1.0) {
    if (!(M > 0.0)) throw std::invalid_argument("decay_check: M must be positive");
    const HalfGrid& g = v.grid();
    DecayCheck out;
    out.flat_sup = -std::numeric_limits<double>::infinity();
    out.flat_inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        if (std::abs(x - x0) > 0.5 * r_arc) continue;
        out.flat_sup = std::max(out.flat_sup, v(0, i, 0));
        out.flat_inf = std::min(out.flat_inf, v(0, i, 0));
    }
    out.arc_sup = -std::numeric_limits<double>::infinity();
    out.arc_inf = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= kArcSamples; ++s) {
        const double th = M_PI * s / kArcSamples;
        const double val = v.value(0, x0 + r_arc * std::cos(th), r_arc * std::sin(th));
        out.arc_sup = std::max(out.arc_sup, val);
        out.arc_inf = std::min(out.arc_inf, val);
    }
    out.upper_bound = (1.0 + delta) / M * out.arc_sup * (1.0 + slack);
    out.lower_bound = 1.0 / (1.0 + M) * out.arc_inf * (1.0 - slack);
    out.upper_ok = out.flat_sup <= out.upper_bound;
    out.lower_ok = out.flat_inf >= out.lower_bound;
    return out;
}

}  // namespace seglab
