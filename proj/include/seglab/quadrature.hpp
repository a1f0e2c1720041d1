#pragma once

// Quadrature over half-balls B_r^+((x0,0)), their spherical arcs and flat
// boundary segments, specialized to the planar (N = 1) solve domain.
//
// Volume integrals come in two flavours:
//   * masked cell-center sums (O(h) boundary error, simple and robust),
//   * cumulative polar quadrature (smooth in r, used by the radial scans so
//     that ratios of nearby radii do not inherit cell-popping jitter).

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "seglab/grid.hpp"

namespace seglab {

inline constexpr int kArcSamples = 128;

// Integral over the half-arc {x0 + r e(theta) : theta in [0,pi]} of f,
// composite trapezoid with `samples` panels.
inline double arc_integral(const std::function<double(double, double)>& f, double x0,
                           double r, int samples = kArcSamples) {
    if (r <= 0.0) throw std::invalid_argument("arc_integral: r must be positive");
    const double dt = M_PI / samples;
    double acc = 0.0;
    for (int s = 0; s <= samples; ++s) {
        const double th = s * dt;
        const double w = (s == 0 || s == samples) ? 0.5 : 1.0;
        acc += w * f(x0 + r * std::cos(th), r * std::sin(th));
    }
    return acc * dt * r;
}

// Integral over the flat segment {y = 0, |x - x0| <= r} of f(x), trapezoid
// with a resolution matched to the grid spacing h.
inline double flat_integral(const std::function<double(double)>& f, double x0, double r,
                            double h) {
    if (r <= 0.0) throw std::invalid_argument("flat_integral: r must be positive");
    const int m = std::max(32, 4 * int(std::ceil(r / h)));
    const double dx = 2.0 * r / m;
    double acc = 0.0;
    for (int s = 0; s <= m; ++s) {
        const double w = (s == 0 || s == m) ? 0.5 : 1.0;
        acc += w * f(x0 - r + s * dx);
    }
    return acc * dx;
}

// Masked cell-center integral of f over B_r^+((x0,0)) intersected with the
// grid rectangle: a cell contributes iff its center lies inside the half-ball.
inline double masked_half_ball_integral(const std::function<double(double, double)>& f,
                                        const HalfGrid& g, double x0, double r) {
    if (r <= 0.0) throw std::invalid_argument("masked_half_ball_integral: r <= 0");
    double acc = 0.0;
    const double r2 = r * r;
    for (int i = 0; i + 1 < g.nx; ++i) {
        const double cx = g.x(i) + 0.5 * g.h;
        const double dx = cx - x0;
        if (std::abs(dx) > r) continue;
        for (int j = 0; j + 1 < g.ny; ++j) {
            const double cy = g.y(j) + 0.5 * g.h;
            if (dx * dx + cy * cy <= r2) acc += f(cx, cy);
        }
    }
    return acc * g.h * g.h;
}

// Same masking rule for a full ball B_r(X) clipped to {y > 0}; used by the
// Morrey quotient whose centers may sit above the flat boundary.
inline double masked_ball_integral(const std::function<double(double, double)>& f,
                                   const HalfGrid& g, double cx0, double cy0, double r) {
    if (r <= 0.0) throw std::invalid_argument("masked_ball_integral: r <= 0");
    double acc = 0.0;
    const double r2 = r * r;
    for (int i = 0; i + 1 < g.nx; ++i) {
        const double cx = g.x(i) + 0.5 * g.h;
        const double dx = cx - cx0;
        if (std::abs(dx) > r) continue;
        for (int j = 0; j + 1 < g.ny; ++j) {
            const double cy = g.y(j) + 0.5 * g.h;
            const double dy = cy - cy0;
            if (dx * dx + dy * dy <= r2) acc += f(cx, cy);
        }
    }
    return acc * g.h * g.h;
}

// Cumulative polar quadrature: precomputes rho -> integral over B_rho^+ of f
// on a fine radial ladder (step h/2, midpoint arcs), then evaluates any
// radius by interpolation. Smooth in r by construction.
class CumulativePolarIntegral {
  public:
    CumulativePolarIntegral(const std::function<double(double, double)>& f, double x0,
                            double r_max, double h, int arc_samples = kArcSamples) {
        if (r_max <= 0.0) throw std::invalid_argument("CumulativePolarIntegral: r_max <= 0");
        step_ = 0.5 * h;
        const int n = int(std::ceil(r_max / step_));
        ring_.resize(n);
        const double dt = M_PI / arc_samples;
        for (int kidx = 0; kidx < n; ++kidx) {
            const double rho = (kidx + 0.5) * step_;  // midpoint ring radius
            double acc = 0.0;
            for (int s = 0; s < arc_samples; ++s) {
                const double th = (s + 0.5) * dt;
                acc += f(x0 + rho * std::cos(th), rho * std::sin(th));
            }
            ring_[kidx] = acc * dt * rho;
        }
        cum_.resize(n + 1);
        cum_[0] = 0.0;
        for (int kidx = 0; kidx < n; ++kidx) cum_[kidx + 1] = cum_[kidx] + ring_[kidx] * step_;
    }

    double operator()(double r) const {
        if (r <= 0.0) return 0.0;
        const double s = r / step_;
        const int kidx = std::min(int(s), int(ring_.size()) - 1);
        const double frac = std::min(s - kidx, 1.0);
        return cum_[kidx] + frac * ring_[kidx] * step_;
    }

  private:
    double step_ = 0.0;
    std::vector<double> ring_;  // per-ring arc integrals
    std::vector<double> cum_;
};

enum class VolumeQuadrature { MaskedCells, CumulativePolar };

}  // namespace seglab
