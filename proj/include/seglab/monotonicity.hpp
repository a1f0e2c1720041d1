#pragma once

// Radial monotonicity quantities about a flat-boundary center: the two
// Alt-Caffarelli-Friedman functionals, the Almgren frequency in its
// segregated, coexistence and limiting variants, Pohozaev residuals on half
// balls and half cylinders, and the Morrey quotient.
//
// All quantities are specialized to the planar solve domain (boundary
// dimension N = 1) except gamma() and the cylinder identity, which accept
// general N.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "seglab/grid.hpp"
#include "seglab/kernel.hpp"
#include "seglab/quadrature.hpp"
#include "seglab/reaction.hpp"

namespace seglab {

// Characteristic exponent: the positive root of g(g + N - 1) = lambda.
inline double gamma_exponent(double lambda, int N) {
    if (lambda < 0.0) throw std::invalid_argument("gamma_exponent: lambda must be >= 0");
    const double a = 0.5 * (N - 1);
    return std::sqrt(a * a + lambda) - a;
}

struct RadialRecord {
    double r = 0.0;
    double E = 0.0;
    double H = 0.0;
    std::optional<double> N;  // undefined when H is numerically zero
    double phi_seg = 0.0;
    double phi_pert = 0.0;
    double phi_boundary = 0.0;
    double phi_morrey = 0.0;
    double poho_res = 0.0;
    double psi = 0.0;
};

struct RadialScan {
    double center = 0.0;
    std::vector<RadialRecord> records;
};

// Snap requested radii to multiples of h/2 (deduplicated, ascending) and
// check that every half-ball fits in the grid.
inline std::vector<double> snap_radii(const HalfGrid& g, double x0,
                                      const std::vector<double>& radii) {
    std::vector<double> out;
    for (double r : radii) {
        const double snapped = std::round(r / (0.5 * g.h)) * 0.5 * g.h;
        if (snapped <= 0.0) continue;
        if (!g.contains_half_ball(x0, snapped))
            throw std::invalid_argument("radius exceeds the grid domain");
        if (out.empty() || snapped > out.back() + 1e-15) out.push_back(snapped);
    }
    if (out.empty()) throw std::invalid_argument("no valid radii after snapping");
    return out;
}

namespace detail {

inline CumulativePolarIntegral weighted_energy_cumulative(const FieldGradient& grad, int c,
                                                          double x0, double r_max, double h,
                                                          const Kernel& kernel) {
    return CumulativePolarIntegral(
        [&grad, c, x0, &kernel](double px, double py) {
            const double d = std::hypot(px - x0, py);
            return grad.grad_sq(c, px, py) * kernel(d);
        },
        x0, r_max, h);
}

inline double max_flat_overlap(const Field& a, const Field& b) {
    double worst = 0.0;
    const HalfGrid& g = a.grid();
    for (int i = 0; i < g.nx; ++i)
        worst = std::max(worst, std::abs(a(0, i, 0) * b(0, i, 0)));
    return worst;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ACF functionals

struct AcfResult {
    std::vector<double> radii;
    std::vector<double> phi;
    bool segregation_ok = true;  // flat-boundary overlap below tolerance
};

// Segregated ACF: Phi(r) = prod_i r^{-2 nu} int_{B_r^+} |grad v_i|^2 Gamma_eps.
inline AcfResult acf_segregated(const Field& v1, const Field& v2, double x0,
                                const std::vector<double>& radii, const Kernel& kernel,
                                double nu = 0.5,
                                VolumeQuadrature quad = VolumeQuadrature::CumulativePolar,
                                double overlap_tol = 1e-8) {
    const HalfGrid& g = v1.grid();
    AcfResult out;
    out.radii = snap_radii(g, x0, radii);
    double scale = 0.0;
    for (int i = 0; i < g.nx; ++i)
        scale = std::max({scale, std::abs(v1(0, i, 0)), std::abs(v2(0, i, 0))});
    out.segregation_ok =
        detail::max_flat_overlap(v1, v2) <= overlap_tol * std::max(1.0, scale * scale);

    FieldGradient g1(v1), g2(v2);
    const double r_max = out.radii.back();
    if (quad == VolumeQuadrature::CumulativePolar) {
        auto e1 = detail::weighted_energy_cumulative(g1, 0, x0, r_max, g.h, kernel);
        auto e2 = detail::weighted_energy_cumulative(g2, 0, x0, r_max, g.h, kernel);
        for (double r : out.radii)
            out.phi.push_back(e1(r) * e2(r) / std::pow(r, 4.0 * nu));
    } else {
        for (double r : out.radii) {
            auto term = [&](const FieldGradient& gr) {
                return masked_half_ball_integral(
                    [&](double px, double py) {
                        const double d = std::hypot(px - x0, py);
                        return gr.grad_sq(0, px, py) * kernel(d);
                    },
                    g, x0, r);
            };
            out.phi.push_back(term(g1) * term(g2) / std::pow(r, 4.0 * nu));
        }
    }
    return out;
}

// Perturbed ACF: Phi_i(r) = r^{-2 nu'} ( int_{B_r^+} |grad v_i|^2 Gamma_1
//                + int_{flat, |x-x0|<r} v_i^2 v_j^2 Gamma_1 ).
inline AcfResult acf_perturbed(const Field& v1, const Field& v2, double x0,
                               const std::vector<double>& radii, double nu_prime = 0.45,
                               int N = 1) {
    if (!(nu_prime > 0.0))
        throw std::invalid_argument("acf_perturbed: nu' must be positive");
    const HalfGrid& g = v1.grid();
    AcfResult out;
    out.radii = snap_radii(g, x0, radii);
    const Kernel gamma1 = Kernel::regularized(N, 1.0);  // Gamma_1 itself
    FieldGradient g1(v1), g2(v2);
    const double r_max = out.radii.back();
    auto e1 = detail::weighted_energy_cumulative(g1, 0, x0, r_max, g.h, gamma1);
    auto e2 = detail::weighted_energy_cumulative(g2, 0, x0, r_max, g.h, gamma1);
    for (double r : out.radii) {
        const double bterm = flat_integral(
            [&](double x) {
                const double q = v1.value(0, x, 0.0) * v2.value(0, x, 0.0);
                return q * q * gamma1(std::abs(x - x0));
            },
            x0, r, g.h);
        const double p1 = (e1(r) + bterm) / std::pow(r, 2.0 * nu_prime);
        const double p2 = (e2(r) + bterm) / std::pow(r, 2.0 * nu_prime);
        out.phi.push_back(p1 * p2);
    }
    return out;
}

// Boundary ACF for a single component vanishing on the negative half of the
// trace: Phi(r) = (1/r) int_{B_r^+} |grad v|^2 / |X - (x0,0)|^{N-1}.
inline AcfResult acf_boundary(const Field& v, double x0, const std::vector<double>& radii,
                              int N = 1, double trace_tol = 1e-8) {
    const HalfGrid& g = v.grid();
    AcfResult out;
    out.radii = snap_radii(g, x0, radii);
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        scale = std::max(scale, std::abs(v(0, i, 0)));
        if (g.x(i) <= x0) worst = std::max(worst, std::abs(v(0, i, 0)));
    }
    out.segregation_ok = worst <= trace_tol * std::max(1.0, scale);
    FieldGradient grad(v);
    const Kernel kern = Kernel::exact(N);
    auto e = detail::weighted_energy_cumulative(grad, 0, x0, out.radii.back(), g.h, kern);
    for (double r : out.radii) out.phi.push_back(e(r) / r);
    return out;
}

// ---------------------------------------------------------------------------
// Almgren frequency

struct AlmgrenResult {
    std::vector<double> radii;
    std::vector<double> E, H;
    std::vector<std::optional<double>> N;
    // max over adjacent radius pairs of (2N/r - d/dr log H); the identity
    // d/dr log H = 2N/r makes this ~0 for segregated profiles and <= 0
    // (within tolerance) for coexistence ones.
    double log_derivative_defect = 0.0;
};

namespace detail {

inline AlmgrenResult almgren_generic(
    const Field& v, double x0, const std::vector<double>& radii,
    const std::function<double(double)>& extra_E,  // added to r^{1-N} * volume term
    VolumeQuadrature quad) {
    const HalfGrid& g = v.grid();
    AlmgrenResult out;
    out.radii = snap_radii(g, x0, radii);
    FieldGradient grad(v);
    const int k = v.components();

    std::optional<CumulativePolarIntegral> cum;
    if (quad == VolumeQuadrature::CumulativePolar)
        cum.emplace([&](double px, double py) { return grad.grad_sq_sum(px, py); }, x0,
                    out.radii.back(), g.h);

    for (double r : out.radii) {
        double vol;
        if (cum)
            vol = (*cum)(r);
        else
            vol = masked_half_ball_integral(
                [&](double px, double py) { return grad.grad_sq_sum(px, py); }, g, x0, r);
        const double E = vol + extra_E(r);  // N = 1: r^{1-N} = 1
        const double Hr = arc_integral(
                              [&](double px, double py) {
                                  double s = 0.0;
                                  for (int c = 0; c < k; ++c) {
                                      const double u = v.value(c, px, py);
                                      s += u * u;
                                  }
                                  return s;
                              },
                              x0, r) /
                          r;
        out.E.push_back(E);
        out.H.push_back(Hr);
        if (Hr < 1e-14)
            out.N.push_back(std::nullopt);
        else
            out.N.push_back(E / Hr);
    }
    // log-derivative defect between adjacent radii
    double defect = 0.0;
    for (std::size_t i = 0; i + 1 < out.radii.size(); ++i) {
        if (!out.N[i] || !out.N[i + 1]) continue;
        if (out.H[i] <= 0.0 || out.H[i + 1] <= 0.0) continue;
        const double rm = 0.5 * (out.radii[i] + out.radii[i + 1]);
        const double slope = (std::log(out.H[i + 1]) - std::log(out.H[i])) /
                             (out.radii[i + 1] - out.radii[i]);
        const double Nm = 0.5 * (*out.N[i] + *out.N[i + 1]);
        defect = std::max(defect, 2.0 * Nm / rm - slope);
    }
    out.log_derivative_defect = defect;
    return out;
}

}  // namespace detail

// E = r^{1-N} int_{B_r^+} sum |grad v_i|^2, H = r^{-N} int_{arc} sum v_i^2.
inline AlmgrenResult almgren_segregated(
    const Field& v, double x0, const std::vector<double>& radii,
    VolumeQuadrature quad = VolumeQuadrature::CumulativePolar) {
    return detail::almgren_generic(v, x0, radii, [](double) { return 0.0; }, quad);
}

// Coexistence variant: E gains the flat-boundary quartic interaction term.
// Accepts the raw beta-system field and rescales u = beta^{1/4 * 2} v ... the
// normalization u = sqrt(beta) v maps the beta-equation into the unit one.
inline AlmgrenResult almgren_coexistence(
    const Field& v_raw, const SystemParams& params, double x0,
    const std::vector<double>& radii,
    VolumeQuadrature quad = VolumeQuadrature::CumulativePolar) {
    const HalfGrid& g = v_raw.grid();
    const double scale = params.beta > 0.0 ? std::sqrt(params.beta) : 1.0;
    Field u(g, v_raw.components());
    for (std::size_t n = 0; n < u.data().size(); ++n) u.data()[n] = scale * v_raw.data()[n];

    const int k = u.components();
    auto quartic = [&, k](double r) {
        return flat_integral(
            [&](double x) {
                double s = 0.0;
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < i; ++j) {
                        const double q = u.value(i, x, 0.0) * u.value(j, x, 0.0);
                        s += q * q;
                    }
                return s;
            },
            x0, r, g.h);
    };
    return detail::almgren_generic(u, x0, radii, quartic, quad);
}

struct LimitingAlmgrenOptions {
    double p = 3.0;        // trace exponent in psi; min(2 + eps, 2N/(N-1))
    double C = 0.0;        // compensation constant; 0 = pick from Lipschitz bound
    double zero_tol = 0.0; // tolerance for the x0-in-zero-set check; 0 = skip
};

struct LimitingAlmgrenResult {
    AlmgrenResult base;                  // N here is E/H + 1
    std::vector<double> psi;
    std::vector<double> compensated;     // exp(C r (1 + psi)) * N
    bool center_in_zero_set = true;
    double C_used = 0.0;
};

// Limiting-profile variant: E subtracts the boundary reaction work and the
// frequency is offset by one, N = E/H + 1.
inline LimitingAlmgrenResult almgren_limiting(
    const Field& v, const Reaction& reaction, double x0, const std::vector<double>& radii,
    const LimitingAlmgrenOptions& opts = {},
    VolumeQuadrature quad = VolumeQuadrature::CumulativePolar) {
    const HalfGrid& g = v.grid();
    const int k = v.components();
    auto reaction_term = [&, k](double r) {
        return -flat_integral(
            [&](double x) {
                double s = 0.0;
                for (int c = 0; c < k; ++c) {
                    const double u = v.value(c, x, 0.0);
                    s += reaction.f(c, u) * u;
                }
                return s;
            },
            x0, r, g.h);
    };
    LimitingAlmgrenResult out;
    out.base = detail::almgren_generic(v, x0, radii, reaction_term, quad);
    for (auto& n : out.base.N)
        if (n) n = *n + 1.0;

    if (opts.zero_tol > 0.0) {
        double val = 0.0;
        for (int c = 0; c < k; ++c) val = std::max(val, std::abs(v.value(c, x0, 0.0)));
        out.center_in_zero_set = val <= opts.zero_tol;
    }

    double C = opts.C;
    if (C <= 0.0) {
        // 10 x the Lipschitz bound of f over the field's range
        double vmax = 0.0;
        for (double d : v.data()) vmax = std::max(vmax, std::abs(d));
        double lip = 0.0;
        for (int c = 0; c < k; ++c)
            for (int s = 0; s <= 16; ++s) {
                const double u = -vmax + 2.0 * vmax * s / 16.0;
                lip = std::max(lip, std::abs(reaction.df(c, u)));
            }
        C = 10.0 * lip;
    }
    out.C_used = C;

    const double p = opts.p;
    for (std::size_t idx = 0; idx < out.base.radii.size(); ++idx) {
        const double r = out.base.radii[idx];
        const double tr = flat_integral(
                              [&](double x) {
                                  double s = 0.0;
                                  for (int c = 0; c < k; ++c)
                                      s += std::pow(std::abs(v.value(c, x, 0.0)), p);
                                  return s;
                              },
                              x0, r, g.h) /
                          r;  // r^{-N}, N = 1
        const double psi = std::pow(tr, 1.0 - 2.0 / p);
        out.psi.push_back(psi);
        if (out.base.N[idx])
            out.compensated.push_back(std::exp(C * r * (1.0 + psi)) * *out.base.N[idx]);
        else
            out.compensated.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pohozaev residuals

// Residual of the half-ball Pohozaev identity for solutions of the
// beta-system, normalized by the largest participating term. For N = 1 the
// S_r^{N-1} integrals degenerate to evaluations at x0 +- r.
inline std::vector<double> pohozaev_residual_sphere(const Field& v,
                                                    const SystemParams& params, double x0,
                                                    const std::vector<double>& radii) {
    const HalfGrid& g = v.grid();
    const auto rs = snap_radii(g, x0, radii);
    FieldGradient grad(v);
    const int k = v.components();
    std::vector<double> out;

    auto pair_sum_flat = [&](double x) {
        double s = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < i; ++j) {
                const double q = v.value(i, x, 0.0) * v.value(j, x, 0.0);
                s += q * q;
            }
        return s;
    };
    auto F_sum_flat = [&](double x) {
        double s = 0.0;
        for (int c = 0; c < k; ++c) s += params.reaction.F(c, v.value(c, x, 0.0));
        return s;
    };

    for (double r : rs) {
        // N = 1: the (1-N) volume term vanishes.
        const double arc_grad = arc_integral(
            [&](double px, double py) { return grad.grad_sq_sum(px, py); }, x0, r);
        const double arc_normal = arc_integral(
            [&](double px, double py) {
                double s = 0.0;
                const double nxv = (px - x0) / r, nyv = py / r;
                for (int c = 0; c < k; ++c) {
                    const double dn = grad.gx(c, px, py) * nxv + grad.gy(c, px, py) * nyv;
                    s += dn * dn;
                }
                return s;
            },
            x0, r);
        const double flat_F = flat_integral(F_sum_flat, x0, r, g.h);
        const double flat_pair = flat_integral(pair_sum_flat, x0, r, g.h);
        const double end_F = F_sum_flat(x0 - r) + F_sum_flat(x0 + r);
        const double end_pair = pair_sum_flat(x0 - r) + pair_sum_flat(x0 + r);

        const double lhs = r * arc_grad + 2.0 * flat_F - params.beta * flat_pair -
                           2.0 * r * end_F + r * params.beta * end_pair;
        const double rhs = 2.0 * r * arc_normal;
        const double norm = std::max({std::abs(r * arc_grad), std::abs(2.0 * flat_F),
                                      std::abs(params.beta * flat_pair),
                                      std::abs(2.0 * r * end_F),
                                      std::abs(r * params.beta * end_pair), std::abs(rhs),
                                      1e-300});
        out.push_back((lhs - rhs) / norm);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cylinder Pohozaev identity, evaluated on closed-form profiles.
//
// The half cylinder C_{r,l}^+ = B_r^+((x0',0)) x Q_l(x0'') splits the
// boundary coordinates into x' (h of them) and x'' (N - h). Profiles are
// supplied as callables of (x in R^N, y) with analytic gradients so that the
// identity can be checked in dimensions the grid solver does not cover.

struct CylinderSpec {
    int N = 2;                    // boundary dimension
    int h_split = 1;              // 1 <= h <= N
    double r = 0.5;               // spherical radius in (x', y)
    double l = 0.5;               // half edge of the cube Q_l
    std::vector<double> center;   // x0 in R^N
    int mesh = 48;                // quadrature resolution per direction
};

struct ProfileND {
    int k = 1;
    // value(component, x[0..N-1], y)
    std::function<double(int, const std::vector<double>&, double)> value;
    // gradient(component, x, y) -> (d/dx_0 .. d/dx_{N-1}, d/dy)
    std::function<std::vector<double>(int, const std::vector<double>&, double)> gradient;
};

inline double pohozaev_residual_cylinder(const ProfileND& prof, const SystemParams& params,
                                         const CylinderSpec& spec) {
    const int N = spec.N, hs = spec.h_split;
    if (hs < 1 || hs > N)
        throw std::invalid_argument("pohozaev_residual_cylinder: split out of range");
    if (int(spec.center.size()) != N)
        throw std::invalid_argument("pohozaev_residual_cylinder: center size mismatch");
    if (hs != 1 && hs != N)
        throw std::invalid_argument("pohozaev_residual_cylinder: only h=1 or h=N supported");
    const int k = prof.k;
    const int m = spec.mesh;
    const int ncube = N - hs;
    const double r = spec.r, l = spec.l;

    // quadrature over the cube Q_l (trapezoid per direction); weight callback
    auto cube_sum = [&](const std::function<double(const std::vector<double>&)>& f) {
        if (ncube == 0) return f({});
        // ncube == 1 in all shipped configurations
        double acc = 0.0;
        const double dz = 2.0 * l / m;
        for (int s = 0; s <= m; ++s) {
            const double w = (s == 0 || s == m) ? 0.5 : 1.0;
            acc += w * f({spec.center[hs] + (-l + s * dz)});
        }
        return acc * dz;
    };

    auto assemble_x = [&](double xp, const std::vector<double>& xpp) {
        std::vector<double> x(N);
        x[0] = xp;
        for (int d = 0; d < ncube; ++d) x[1 + d] = xpp[d];
        return x;
    };

    const double x0p = spec.center[0];

    // grad splits: (x', y) block vs x'' block
    auto grad_blocks = [&](int c, const std::vector<double>& x, double y, double& gp2,
                           double& gfull2, double& gpy_y, double& gpy_x) {
        const auto gvec = prof.gradient(c, x, y);
        gfull2 = 0.0;
        for (double gg : gvec) gfull2 += gg * gg;
        gp2 = gvec[0] * gvec[0] + gvec[N] * gvec[N];
        gpy_x = gvec[0];
        gpy_y = gvec[N];
        if (hs == N) {
            gp2 = gfull2;
        }
    };

    // Volume term: int_C sum_i ( 2 |grad_{(x',y)} v|^2 - (h+1) |grad v|^2 )
    double vol = 0.0;
    {
        // polar quadrature over B_r^+ in the (x', y) plane (h = 1) or the
        // planar half-disk when h = N (then ncube = 0 and N = 1).
        const int nrho = m, nth = m;
        const double drho = r / nrho, dth = M_PI / nth;
        for (int a = 0; a < nrho; ++a) {
            const double rho = (a + 0.5) * drho;
            for (int b = 0; b < nth; ++b) {
                const double th = (b + 0.5) * dth;
                const double xp = x0p + rho * std::cos(th);
                const double y = rho * std::sin(th);
                vol += rho * cube_sum([&](const std::vector<double>& xpp) {
                    const auto x = assemble_x(xp, xpp);
                    double s = 0.0;
                    for (int c = 0; c < k; ++c) {
                        double gp2, gf2, gy, gx;
                        grad_blocks(c, x, y, gp2, gf2, gy, gx);
                        s += 2.0 * gp2 - (hs + 1) * gf2;
                    }
                    return s;
                });
            }
        }
        vol *= drho * dth;
    }

    // Lateral spherical boundary: dB_r^+ x Q_l
    double arc_grad = 0.0, arc_normal = 0.0;
    {
        const int nth = 2 * m;
        const double dth = M_PI / nth;
        for (int b = 0; b <= nth; ++b) {
            const double th = b * dth;
            const double w = (b == 0 || b == nth) ? 0.5 : 1.0;
            const double xp = x0p + r * std::cos(th);
            const double y = r * std::sin(th);
            arc_grad += w * cube_sum([&](const std::vector<double>& xpp) {
                const auto x = assemble_x(xp, xpp);
                double s = 0.0;
                for (int c = 0; c < k; ++c) {
                    double gp2, gf2, gy, gx;
                    grad_blocks(c, x, y, gp2, gf2, gy, gx);
                    s += gf2;
                }
                return s;
            });
            arc_normal += w * cube_sum([&](const std::vector<double>& xpp) {
                const auto x = assemble_x(xp, xpp);
                double s = 0.0;
                for (int c = 0; c < k; ++c) {
                    double gp2, gf2, gy, gx;
                    grad_blocks(c, x, y, gp2, gf2, gy, gx);
                    const double dn = gx * std::cos(th) + gy * std::sin(th);
                    s += dn * dn;
                }
                return s;
            });
        }
        arc_grad *= dth * r;
        arc_normal *= dth * r;
    }

    // Flat boundary of the cylinder: {y = 0, |x' - x0'| < r} x Q_l
    auto flat_sum = [&](const std::function<double(const std::vector<double>&)>& f) {
        double acc = 0.0;
        const int n1 = 2 * m;
        const double dx = 2.0 * r / n1;
        for (int s = 0; s <= n1; ++s) {
            const double w = (s == 0 || s == n1) ? 0.5 : 1.0;
            const double xp = x0p - r + s * dx;
            acc += w * cube_sum([&](const std::vector<double>& xpp) {
                return f(assemble_x(xp, xpp));
            });
        }
        return acc * dx;
    };
    auto F_sum = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (int c = 0; c < k; ++c) s += params.reaction.F(c, prof.value(c, x, 0.0));
        return s;
    };
    auto pair_sum = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < i; ++j) {
                const double q = prof.value(i, x, 0.0) * prof.value(j, x, 0.0);
                s += q * q;
            }
        return s;
    };
    const double flat_F = flat_sum(F_sum);
    const double flat_pair = flat_sum(pair_sum);

    // S_r^{h-1} x Q_l: two points x' = x0' +- r (h = 1)
    auto ends_sum = [&](const std::function<double(const std::vector<double>&)>& f) {
        double acc = 0.0;
        for (double xp : {x0p - r, x0p + r})
            acc += cube_sum([&](const std::vector<double>& xpp) {
                return f(assemble_x(xp, xpp));
            });
        return acc;
    };
    const double end_F = ends_sum(F_sum);
    const double end_pair = ends_sum(pair_sum);

    // Cube lateral faces: B_r^+ x dQ_l, normal along x''
    double lateral = 0.0;
    if (ncube == 1) {
        const int nrho = m, nth = m;
        const double drho = r / nrho, dth = M_PI / nth;
        for (int face = 0; face < 2; ++face) {
            const double z = spec.center[hs] + (face == 0 ? -l : l);
            const double sign = face == 0 ? -1.0 : 1.0;
            double acc = 0.0;
            for (int a = 0; a < nrho; ++a) {
                const double rho = (a + 0.5) * drho;
                for (int b = 0; b < nth; ++b) {
                    const double th = (b + 0.5) * dth;
                    const double xp = x0p + rho * std::cos(th);
                    const double y = rho * std::sin(th);
                    const auto x = assemble_x(xp, {z});
                    double s = 0.0;
                    for (int c = 0; c < k; ++c) {
                        const auto gvec = prof.gradient(c, x, y);
                        const double dnu = sign * gvec[1];  // d/dx'' on the face
                        s += dnu * (gvec[0] * (xp - x0p) + gvec[N] * y);
                    }
                    acc += rho * s;
                }
            }
            lateral += acc * drho * dth;
        }
    }

    const double lhs = vol + r * arc_grad + 2.0 * hs * flat_F - hs * params.beta * flat_pair -
                       2.0 * r * end_F + r * params.beta * end_pair;
    const double rhs = 2.0 * r * arc_normal - 2.0 * lateral;
    const double norm =
        std::max({std::abs(vol), std::abs(r * arc_grad), std::abs(2.0 * hs * flat_F),
                  std::abs(hs * params.beta * flat_pair), std::abs(2.0 * r * end_F),
                  std::abs(r * params.beta * end_pair), std::abs(2.0 * r * arc_normal),
                  std::abs(2.0 * lateral), 1e-300});
    return (lhs - rhs) / norm;
}

// ---------------------------------------------------------------------------
// Morrey quotient: Phi(X, r) = r^{-N} int_{B_r(X) cap {y>0}} sum |grad v_i|^2.
inline std::vector<double> morrey_phi(const Field& v, double cx, double cy,
                                      const std::vector<double>& radii) {
    const HalfGrid& g = v.grid();
    if (cy < 0.0) throw std::invalid_argument("morrey_phi: center must have y >= 0");
    FieldGradient grad(v);
    std::vector<double> out;
    for (double r : radii) {
        if (cx - r < g.x_min - 1e-12 || cx + r > g.x_max + 1e-12 || cy + r > g.y_max + 1e-12)
            throw std::invalid_argument("morrey_phi: ball exceeds the grid");
        out.push_back(masked_ball_integral([&](double px, double py) {
                          return grad.grad_sq_sum(px, py);
                      }, g, cx, cy, r) /
                      r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Combined radial scan: one record per radius with every monotone quantity.

struct ScanOptions {
    double nu = 0.5;          // segregated ACF exponent (exact for N = 1)
    double nu_prime = 0.45;   // perturbed ACF exponent, strictly below nu
    double kernel_eps = 0.0;  // Gamma_eps regularization; 0 means 2h
    double p = 3.0;           // trace exponent in psi
    VolumeQuadrature quad = VolumeQuadrature::CumulativePolar;
};

inline RadialScan full_scan(const Field& v, const SystemParams& params, double x0,
                            const std::vector<double>& radii, const ScanOptions& opts = {}) {
    const HalfGrid& g = v.grid();
    const auto rs = snap_radii(g, x0, radii);
    const double eps = opts.kernel_eps > 0.0 ? opts.kernel_eps : 2.0 * g.h;

    const auto alm = almgren_coexistence(v, params, x0, rs, opts.quad);
    LimitingAlmgrenOptions lopts;
    lopts.p = opts.p;
    const auto lim = almgren_limiting(v, params.reaction, x0, rs, lopts, opts.quad);
    const auto poho = pohozaev_residual_sphere(v, params, x0, rs);
    const auto morrey = morrey_phi(v, x0, 0.0, rs);
    const auto bd = acf_boundary(v.components() >= 1 ? v.component(0) : v, x0, rs);

    std::vector<double> seg(rs.size(), 0.0), pert(rs.size(), 0.0);
    if (v.components() >= 2) {
        const Field v1 = v.component(0), v2 = v.component(1);
        const auto s = acf_segregated(v1, v2, x0, rs, Kernel::regularized(1, eps), opts.nu,
                                      opts.quad, /*overlap_tol=*/1e30);
        const auto p2 = acf_perturbed(v1, v2, x0, rs, opts.nu_prime);
        seg = s.phi;
        pert = p2.phi;
    }

    RadialScan out;
    out.center = x0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        RadialRecord rec;
        rec.r = rs[i];
        rec.E = alm.E[i];
        rec.H = alm.H[i];
        rec.N = alm.N[i];
        rec.phi_seg = seg[i];
        rec.phi_pert = pert[i];
        rec.phi_boundary = bd.phi[i];
        rec.phi_morrey = morrey[i];
        rec.poho_res = poho[i];
        rec.psi = lim.psi[i];
        out.records.push_back(rec);
    }
    return out;
}

}  // namespace seglab
