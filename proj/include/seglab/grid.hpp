#pragma once

// Half-domain tensor grids and multi-component grid functions.
//
// The solve domain is the half-rectangle [x_min,x_max] x [0,y_max] with a
// uniform spacing h in both directions. The row y=0 is the flat boundary
// where the nonlinear Neumann condition lives; the other three edges carry
// Dirichlet data.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seglab {

struct HalfGrid {
    double x_min = -1.0;
    double x_max = 1.0;
    double y_max = 1.0;
    int nx = 0;
    int ny = 0;
    double h = 0.0;

    static HalfGrid make(double x_min, double x_max, double y_max, int nx, int ny) {
        if (nx < 3 || ny < 3)
            throw std::invalid_argument("HalfGrid: nx and ny must be >= 3");
        HalfGrid g;
        g.x_min = x_min;
        g.x_max = x_max;
        g.y_max = y_max;
        g.nx = nx;
        g.ny = ny;
        const double hx = (x_max - x_min) / (nx - 1);
        const double hy = y_max / (ny - 1);
        if (!(hx > 0.0) || !(hy > 0.0))
            throw std::invalid_argument("HalfGrid: degenerate extents");
        if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy))
            throw std::invalid_argument("HalfGrid: spacing must be uniform (hx == hy)");
        g.h = hx;
        return g;
    }

    double x(int i) const { return x_min + i * h; }
    double y(int j) const { return j * h; }
    std::size_t nodes() const { return std::size_t(nx) * ny; }

    bool contains(double px, double py, double slack = 1e-12) const {
        return px >= x_min - slack && px <= x_max + slack && py >= -slack &&
               py <= y_max + slack;
    }

    // True when the half-ball B_r^+((x0,0)) fits inside the rectangle.
    bool contains_half_ball(double x0, double r) const {
        return x0 - r >= x_min - 1e-12 && x0 + r <= x_max + 1e-12 && r <= y_max + 1e-12;
    }
};

// k-component nodal values on a HalfGrid. Storage is component-major,
// then x, then y: idx = (c*nx + i)*ny + j.
class Field {
  public:
    Field() = default;
    Field(const HalfGrid& grid, int k)
        : grid_(grid), k_(k), data_(std::size_t(k) * grid.nodes(), 0.0) {
        if (k < 1) throw std::invalid_argument("Field: k must be >= 1");
    }

    static Field from_function(const HalfGrid& grid, int k,
                               const std::function<double(int, double, double)>& f) {
        Field out(grid, k);
        for (int c = 0; c < k; ++c)
            for (int i = 0; i < grid.nx; ++i)
                for (int j = 0; j < grid.ny; ++j)
                    out(c, i, j) = f(c, grid.x(i), grid.y(j));
        return out;
    }

    const HalfGrid& grid() const { return grid_; }
    int components() const { return k_; }

    double& operator()(int c, int i, int j) {
        return data_[(std::size_t(c) * grid_.nx + i) * grid_.ny + j];
    }
    double operator()(int c, int i, int j) const {
        return data_[(std::size_t(c) * grid_.nx + i) * grid_.ny + j];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    // Bilinear interpolation; points are clamped to the grid within a small
    // tolerance, anything farther out is an error.
    double value(int c, double px, double py) const {
        if (!grid_.contains(px, py, 1e-9))
            throw std::out_of_range("Field::value: point outside grid");
        double s = (px - grid_.x_min) / grid_.h;
        double t = py / grid_.h;
        s = std::min(std::max(s, 0.0), double(grid_.nx - 1));
        t = std::min(std::max(t, 0.0), double(grid_.ny - 1));
        int i = std::min(int(s), grid_.nx - 2);
        int j = std::min(int(t), grid_.ny - 2);
        const double fx = s - i, fy = t - j;
        return (1 - fx) * (1 - fy) * (*this)(c, i, j) + fx * (1 - fy) * (*this)(c, i + 1, j) +
               (1 - fx) * fy * (*this)(c, i, j + 1) + fx * fy * (*this)(c, i + 1, j + 1);
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    Field component(int c) const {
        Field out(grid_, 1);
        for (int i = 0; i < grid_.nx; ++i)
            for (int j = 0; j < grid_.ny; ++j)
                out(0, i, j) = (*this)(c, i, j);
        return out;
    }

  private:
    HalfGrid grid_;
    int k_ = 0;
    std::vector<double> data_;
};

// Nodal gradients of a Field: central differences inside, second-order
// one-sided stencils on the edges. Interpolates like the Field itself.
class FieldGradient {
  public:
    explicit FieldGradient(const Field& f)
        : gx_(f.grid(), f.components()), gy_(f.grid(), f.components()) {
        const HalfGrid& g = f.grid();
        const double h = g.h;
        for (int c = 0; c < f.components(); ++c) {
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.ny; ++j) {
                    double dx, dy;
                    if (i == 0)
                        dx = (-3 * f(c, 0, j) + 4 * f(c, 1, j) - f(c, 2, j)) / (2 * h);
                    else if (i == g.nx - 1)
                        dx = (3 * f(c, i, j) - 4 * f(c, i - 1, j) + f(c, i - 2, j)) / (2 * h);
                    else
                        dx = (f(c, i + 1, j) - f(c, i - 1, j)) / (2 * h);
                    if (j == 0)
                        dy = (-3 * f(c, i, 0) + 4 * f(c, i, 1) - f(c, i, 2)) / (2 * h);
                    else if (j == g.ny - 1)
                        dy = (3 * f(c, i, j) - 4 * f(c, i, j - 1) + f(c, i, j - 2)) / (2 * h);
                    else
                        dy = (f(c, i, j + 1) - f(c, i, j - 1)) / (2 * h);
                    gx_(c, i, j) = dx;
                    gy_(c, i, j) = dy;
                }
        }
    }

    double gx(int c, double px, double py) const { return gx_.value(c, px, py); }
    double gy(int c, double px, double py) const { return gy_.value(c, px, py); }

    // |grad v_c|^2 at an arbitrary point.
    double grad_sq(int c, double px, double py) const {
        const double a = gx_.value(c, px, py), b = gy_.value(c, px, py);
        return a * a + b * b;
    }

    // Sum over components of |grad v_i|^2.
    double grad_sq_sum(double px, double py) const {
        double s = 0.0;
        for (int c = 0; c < gx_.components(); ++c) s += grad_sq(c, px, py);
        return s;
    }

    int components() const { return gx_.components(); }

  private:
    Field gx_, gy_;
};

// Boundary trace prescription on the three non-flat edges.
struct DirichletData {
    // f(component, x, y) evaluated on the left, right and top edge.
    std::function<double(int, double, double)> eval;

    static DirichletData constant(double c) {
        return DirichletData{[c](int, double, double) { return c; }};
    }
    static DirichletData from_function(std::function<double(int, double, double)> f) {
        return DirichletData{std::move(f)};
    }
};

}  // namespace seglab
