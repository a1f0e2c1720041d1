#pragma once

// Closed-form reference solutions: the segregated pair on the plane, the
// square-root extension, polynomial harmonics, and the explicit super/sub
// solutions of the Robin decay comparison. These are the oracles the solver
// and the monotonicity quantities are tested against.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seglab/grid.hpp"

namespace seglab {

struct Grad2 {
    double x = 0.0, y = 0.0;
};

// A closed-form k-component function on the closed upper half-plane with
// exact value and gradient evaluation.
struct Profile {
    std::string kind;
    int k = 1;
    std::function<double(int, double, double)> value;
    std::function<Grad2(int, double, double)> gradient;

    Field sample(const HalfGrid& grid) const {
        return Field::from_function(grid, k, value);
    }

    // Dirichlet data given by the profile's own trace.
    DirichletData trace() const {
        auto v = value;
        return DirichletData{[v](int c, double x, double y) { return v(c, x, y); }};
    }
};

// v = c rho^{1/2+k} cos((1/2+k) theta), w = sign c rho^{1/2+k} sin((1/2+k) theta).
// Both harmonic; traces segregate across the origin on {y=0}.
inline Profile classified_pair(int k_mode, double c = 1.0, int sign = +1) {
    if (k_mode < 0) throw std::invalid_argument("classified_pair: k must be >= 0");
    if (c == 0.0) throw std::invalid_argument("classified_pair: c must be nonzero");
    const double gamma = 0.5 + k_mode;
    const double s = sign >= 0 ? 1.0 : -1.0;
    Profile p;
    p.kind = "classified-pair";
    p.k = 2;
    p.value = [=](int comp, double x, double y) {
        const double rho = std::hypot(x, y);
        if (rho == 0.0) return 0.0;
        const double th = std::atan2(y, x);
        const double amp = c * std::pow(rho, gamma);
        return comp == 0 ? amp * std::cos(gamma * th) : s * amp * std::sin(gamma * th);
    };
    p.gradient = [=](int comp, double x, double y) {
        const double rho = std::hypot(x, y);
        if (rho == 0.0) return Grad2{0.0, 0.0};
        const double th = std::atan2(y, x);
        const double a = c * std::pow(rho, gamma - 1.0);
        double g, gp;  // g(theta) and g'(theta)
        if (comp == 0) {
            g = std::cos(gamma * th);
            gp = -gamma * std::sin(gamma * th);
        } else {
            g = s * std::sin(gamma * th);
            gp = s * gamma * std::cos(gamma * th);
        }
        return Grad2{a * (gamma * g * std::cos(th) - gp * std::sin(th)),
                     a * (gamma * g * std::sin(th) + gp * std::cos(th))};
    };
    return p;
}

// v(x,y) = sqrt((sqrt(x^2+y^2)+x)/2), the 1/2-homogeneous harmonic extension
// of sqrt(x^+). Coincides with the first classified component at k=0, c=1.
inline Profile sqrt_extension() {
    Profile base = classified_pair(0, 1.0, +1);
    Profile p;
    p.kind = "sqrt-extension";
    p.k = 1;
    p.value = [base](int, double x, double y) { return base.value(0, x, y); };
    p.gradient = [base](int, double x, double y) { return base.gradient(0, x, y); };
    return p;
}

// Harmonic polynomial families: cos: c rho^k cos(k theta); sin: c rho^k
// sin(k theta) (vanishing on {y=0} when lifted to degree 1+k).
inline Profile polynomial_pair(int k_deg, double c = 1.0) {
    if (k_deg < 0) throw std::invalid_argument("polynomial_pair: k must be >= 0");
    Profile p;
    p.kind = "polynomial-harmonic";
    p.k = 2;
    const double kd = k_deg;
    p.value = [=](int comp, double x, double y) {
        const double rho = std::hypot(x, y);
        if (rho == 0.0) return kd == 0 && comp == 0 ? c : 0.0;
        const double th = std::atan2(y, x);
        return comp == 0 ? c * std::pow(rho, kd) * std::cos(kd * th)
                         : c * std::pow(rho, kd) * std::sin(kd * th);
    };
    p.gradient = [=](int comp, double x, double y) {
        if (kd == 0.0) return Grad2{0.0, 0.0};
        const double rho = std::hypot(x, y);
        if (rho == 0.0) {
            if (kd == 1.0) return comp == 0 ? Grad2{c, 0.0} : Grad2{0.0, c};
            return Grad2{0.0, 0.0};
        }
        const double th = std::atan2(y, x);
        const double a = c * std::pow(rho, kd - 1.0);
        double g, gp;
        if (comp == 0) {
            g = std::cos(kd * th);
            gp = -kd * std::sin(kd * th);
        } else {
            g = std::sin(kd * th);
            gp = kd * std::cos(kd * th);
        }
        return Grad2{a * (kd * g * std::cos(th) - gp * std::sin(th)),
                     a * (kd * g * std::sin(th) + gp * std::cos(th))};
    };
    return p;
}

// The Dirichlet family c rho^{1+k} sin((1+k) theta), vanishing on {y=0}.
inline Profile dirichlet_sin_profile(int k_deg, double c = 1.0) {
    Profile q = polynomial_pair(k_deg + 1, c);
    Profile p;
    p.kind = "polynomial-harmonic";
    p.k = 1;
    p.value = [q](int, double x, double y) { return q.value(1, x, y); };
    p.gradient = [q](int, double x, double y) { return q.gradient(1, x, y); };
    return p;
}

// (y, 0): the linear member of the segregated class.
inline Profile linear_y_profile() {
    Profile p;
    p.kind = "linear-y";
    p.k = 2;
    p.value = [](int comp, double, double y) { return comp == 0 ? y : 0.0; };
    p.gradient = [](int comp, double, double) {
        return comp == 0 ? Grad2{0.0, 1.0} : Grad2{0.0, 0.0};
    };
    return p;
}

inline Profile constant_profile(double c, int k = 1) {
    Profile p;
    p.kind = "constant";
    p.k = k;
    p.value = [c](int, double, double) { return c; };
    p.gradient = [](int, double, double) { return Grad2{0.0, 0.0}; };
    return p;
}

// w(x,y) = (1 + M y)/(1 + M): harmonic, with dnu w = -M w on {y=0}.
inline Profile subsolution_linear(double M) {
    if (M < 0.0) throw std::invalid_argument("subsolution_linear: M must be >= 0");
    Profile p;
    p.kind = "subsolution-linear";
    p.k = 1;
    p.value = [M](int, double, double y) { return (1.0 + M * y) / (1.0 + M); };
    p.gradient = [M](int, double, double) { return Grad2{0.0, M / (1.0 + M)}; };
    return p;
}

// ---------------------------------------------------------------------------
// The explicit Robin supersolution
//   w_delta = delta/M + (1/N) sum_i (2/pi) [ pi - arctan((x_i+1)/(y+2/M))
//                                              - arctan((1-x_i)/(y+2/M)) ]
// on the N+1 dimensional half-space, N in {1, 2}.

class WdeltaProfile {
  public:
    WdeltaProfile(double M, double delta, int N) : M_(M), delta_(delta), N_(N) {
        if (M <= 0.0) throw std::invalid_argument("WdeltaProfile: M must be > 0");
        if (delta < 0.0) throw std::invalid_argument("WdeltaProfile: delta must be >= 0");
        if (N < 1 || N > 2) throw std::invalid_argument("WdeltaProfile: N in {1,2}");
    }

    double value(const std::vector<double>& x, double y) const {
        const double c = y + 2.0 / M_;
        double acc = 0.0;
        for (int i = 0; i < N_; ++i) {
            acc += M_PI - std::atan((x[i] + 1.0) / c) - std::atan((1.0 - x[i]) / c);
        }
        return delta_ / M_ + (2.0 / M_PI) * acc / N_;
    }

    // -d/dy w at y = 0, the outward normal derivative on the flat boundary.
    double normal_derivative_flat(const std::vector<double>& x) const {
        const double c = 2.0 / M_;
        double acc = 0.0;
        for (int i = 0; i < N_; ++i) {
            const double t1 = (x[i] + 1.0) / c, t2 = (1.0 - x[i]) / c;
            acc += t1 / (c * (1.0 + t1 * t1)) + t2 / (c * (1.0 + t2 * t2));
        }
        // w_y = +(2/pi)(1/N) acc, so dnu w = -w_y
        return -(2.0 / M_PI) * acc / N_;
    }

    double M() const { return M_; }
    double delta() const { return delta_; }
    int N() const { return N_; }

    // Planar restriction (N = 1) as a Profile for grid sampling.
    Profile as_profile() const {
        if (N_ != 1) throw std::logic_error("WdeltaProfile::as_profile: N must be 1");
        const double M = M_, delta = delta_;
        Profile p;
        p.kind = "supersolution-wdelta";
        p.k = 1;
        p.value = [M, delta](int, double x, double y) {
            const double c = y + 2.0 / M;
            return delta / M +
                   (2.0 / M_PI) * (M_PI - std::atan((x + 1.0) / c) - std::atan((1.0 - x) / c));
        };
        p.gradient = [M](int, double x, double y) {
            const double c = y + 2.0 / M;
            const double t1 = (x + 1.0) / c, t2 = (1.0 - x) / c;
            const double dx =
                (2.0 / M_PI) * (-1.0 / (c * (1.0 + t1 * t1)) + 1.0 / (c * (1.0 + t2 * t2)));
            const double dy =
                (2.0 / M_PI) * (t1 / (c * (1.0 + t1 * t1)) + t2 / (c * (1.0 + t2 * t2)));
            return Grad2{dx, dy};
        };
        return p;
    }

  private:
    double M_, delta_;
    int N_;
};

// Pointwise property check of the supersolution system on a resolution-h
// sampling of the relevant boundary sets:
//   dnu w >= -M w + delta   on  {y=0, |x| <= 1}
//   w >= 1                  on  the spherical part of the unit half-ball
//   w <= (1+delta)/M        on  {y=0, |x| <= 1/2}
struct WdeltaCheckReport {
    int robin_violations = 0;
    int sphere_violations = 0;
    int flat_bound_violations = 0;
    double worst_robin_margin = 0.0;       // min of (dnu w + M w - delta)
    double worst_sphere_margin = 0.0;      // min of (w - 1)
    double worst_flat_margin = 0.0;        // min of ((1+delta)/M - w)
    std::vector<double> worst_flat_point;  // argmin of the flat-bound margin
    bool passed() const {
        return robin_violations == 0 && sphere_violations == 0 && flat_bound_violations == 0;
    }
};

inline WdeltaCheckReport check_wdelta(const WdeltaProfile& w, double h) {
    WdeltaCheckReport rep;
    rep.worst_robin_margin = rep.worst_sphere_margin = rep.worst_flat_margin = 1e300;
    const int n = int(std::round(1.0 / h));
    const int N = w.N();
    const double M = w.M(), delta = w.delta();

    auto flat_points = [&](auto&& visit) {
        if (N == 1) {
            for (int i = -n; i <= n; ++i) visit(std::vector<double>{i * h});
        } else {
            for (int i = -n; i <= n; ++i)
                for (int j = -n; j <= n; ++j) {
                    std::vector<double> x{i * h, j * h};
                    if (x[0] * x[0] + x[1] * x[1] <= 1.0 + 1e-12) visit(x);
                }
        }
    };

    flat_points([&](const std::vector<double>& x) {
        const double margin = w.normal_derivative_flat(x) + M * w.value(x, 0.0) - delta;
        if (margin < rep.worst_robin_margin) rep.worst_robin_margin = margin;
        if (margin < -1e-12) ++rep.robin_violations;
        double r2 = 0.0;
        for (double xi : x) r2 += xi * xi;
        if (r2 <= 0.25 + 1e-12) {
            const double m = (1.0 + delta) / M - w.value(x, 0.0);
            if (m < rep.worst_flat_margin) {
                rep.worst_flat_margin = m;
                rep.worst_flat_point = x;
            }
            if (m < -1e-12) ++rep.flat_bound_violations;
        }
    });

    // spherical part of the unit half-ball
    if (N == 1) {
        const int m = 2 * n;
        for (int s = 0; s <= m; ++s) {
            const double th = s * M_PI / m;
            const double margin = w.value({std::cos(th)}, std::sin(th)) - 1.0;
            if (margin < rep.worst_sphere_margin) rep.worst_sphere_margin = margin;
            if (margin < -1e-12) ++rep.sphere_violations;
        }
    } else {
        const int m = n;  // colatitude panels
        for (int s = 0; s <= m; ++s) {
            const double phi = s * 0.5 * M_PI / m;  // 0 at pole
            const int mpsi = std::max(8, int(std::ceil(2 * M_PI * std::sin(phi) / h)));
            for (int t = 0; t < mpsi; ++t) {
                const double psi = t * 2.0 * M_PI / mpsi;
                const double margin =
                    w.value({std::sin(phi) * std::cos(psi), std::sin(phi) * std::sin(psi)},
                            std::cos(phi)) -
                    1.0;
                if (margin < rep.worst_sphere_margin) rep.worst_sphere_margin = margin;
                if (margin < -1e-12) ++rep.sphere_violations;
            }
        }
    }
    return rep;
}

inline Profile supersolution_wdelta(double M, double delta, int N = 1) {
    return WdeltaProfile(M, delta, N).as_profile();
}

}  // namespace seglab
