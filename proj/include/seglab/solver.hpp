#pragma once

// Mixed boundary-value solver on the half-rectangle: 5-point Laplacian with
// ghost-node elimination of the flat-boundary Robin condition, Dirichlet
// data on the remaining edges, and a damped lagged-coupling iteration for
// the nonlinear competitive system.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "seglab/grid.hpp"
#include "seglab/reaction.hpp"

namespace seglab {

struct ConvergenceReport {
    bool converged = false;
    int iterations = 0;
    double discrete_residual = 0.0;  // residual of the discrete nonlinear system
    double flux_residual = 0.0;      // one-sided physical Neumann residual
    std::string error;
};

struct SolveOptions {
    double damping = 0.5;
    double tol = 1e-10;  // relative, against the sup norm of the iterate
    int max_iter = 500;
    bool newton = false;  // linearize the boundary reaction about the iterate
};

// Assembles the SPD reduced system for
//   -Lap v = 0 in the rectangle, dnu v + lam(x) v = g(x) on y=0,
//   v = dirichlet on the other edges,
// with Robin rows scaled by 1/2 to keep symmetry. Unknowns are the interior
// nodes plus the non-corner flat-boundary nodes.
class LinearHalfSolver {
  public:
    explicit LinearHalfSolver(const HalfGrid& grid) : g_(grid) {
        n_unknowns_ = std::size_t(g_.nx - 2) * (g_.ny - 1);
        build_pattern();
    }

    // lam and g are nodal values on the flat boundary, indexed i = 0..nx-1
    // (only i = 1..nx-2 enter the system). dirichlet supplies the edge trace.
    Field solve(const std::function<double(double, double)>& dirichlet,
                const std::vector<double>& lam, const std::vector<double>& rhs_g) {
        if (int(lam.size()) != g_.nx || int(rhs_g.size()) != g_.nx)
            throw std::invalid_argument("LinearHalfSolver: lam/g must have nx entries");
        for (double l : lam)
            if (l < 0.0) throw std::invalid_argument("LinearHalfSolver: lam must be >= 0");

        fill_values(lam);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n_unknowns_);
        // Dirichlet contributions and Robin right sides
        for (int j = 0; j < g_.ny - 1; ++j) {
            for (int i = 1; i < g_.nx - 1; ++i) {
                const std::size_t row = index(i, j);
                const double scale = (j == 0) ? 0.5 : 1.0;
                if (i == 1) b[row] += scale * dirichlet(g_.x_min, g_.y(j));
                if (i == g_.nx - 2) b[row] += scale * dirichlet(g_.x_max, g_.y(j));
                if (j == g_.ny - 2) b[row] += dirichlet(g_.x(i), g_.y_max);
                if (j == 0) b[row] += g_.h * rhs_g[i];
            }
        }

        if (first_) {
            ldlt_.analyzePattern(A_);
            first_ = false;
        }
        ldlt_.factorize(A_);
        if (ldlt_.info() != Eigen::Success)
            throw std::runtime_error("LinearHalfSolver: factorization failed (singular system)");
        Eigen::VectorXd u = ldlt_.solve(b);

        Field out(g_, 1);
        for (int j = 0; j < g_.ny - 1; ++j)
            for (int i = 1; i < g_.nx - 1; ++i) out(0, i, j) = u[index(i, j)];
        for (int i = 0; i < g_.nx; ++i) out(0, i, g_.ny - 1) = dirichlet(g_.x(i), g_.y_max);
        for (int j = 0; j < g_.ny - 1; ++j) {
            out(0, 0, j) = dirichlet(g_.x_min, g_.y(j));
            out(0, g_.nx - 1, j) = dirichlet(g_.x_max, g_.y(j));
        }
        return out;
    }

  private:
    std::size_t index(int i, int j) const { return std::size_t(j) * (g_.nx - 2) + (i - 1); }

    void build_pattern() {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(5 * n_unknowns_);
        for (int j = 0; j < g_.ny - 1; ++j) {
            for (int i = 1; i < g_.nx - 1; ++i) {
                const std::size_t row = index(i, j);
                if (j == 0) {
                    // (2 + h lam) v0 - v_l/2 - v_r/2 - v_up = h g + dirichlet
                    trips.emplace_back(row, row, 2.0);
                    if (i > 1) trips.emplace_back(row, index(i - 1, 0), -0.5);
                    if (i < g_.nx - 2) trips.emplace_back(row, index(i + 1, 0), -0.5);
                    trips.emplace_back(row, index(i, 1), -1.0);
                } else {
                    trips.emplace_back(row, row, 4.0);
                    if (i > 1) trips.emplace_back(row, index(i - 1, j), -1.0);
                    if (i < g_.nx - 2) trips.emplace_back(row, index(i + 1, j), -1.0);
                    trips.emplace_back(row, index(i, j - 1), -1.0);
                    if (j < g_.ny - 2) trips.emplace_back(row, index(i, j + 1), -1.0);
                }
            }
        }
        A_.resize(n_unknowns_, n_unknowns_);
        A_.setFromTriplets(trips.begin(), trips.end());
        A_.makeCompressed();
    }

    void fill_values(const std::vector<double>& lam) {
        // only the Robin diagonal entries depend on lam; rebuild the diagonal
        for (int i = 1; i < g_.nx - 1; ++i) {
            const std::size_t row = index(i, 0);
            A_.coeffRef(row, row) = 2.0 + g_.h * lam[i];
        }
    }

    HalfGrid g_;
    std::size_t n_unknowns_ = 0;
    Eigen::SparseMatrix<double> A_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    bool first_ = true;
};

// The ghost-eliminated discrete -Lap as a symmetric sparse operator over the
// unknown nodes (interior plus non-corner flat boundary, flux rows scaled by
// 1/2), in units of 1/h^2. Dirichlet nodes are excluded.
inline Eigen::SparseMatrix<double> assemble_discrete_laplacian(const HalfGrid& g) {
    const std::size_t n = std::size_t(g.nx - 2) * (g.ny - 1);
    auto index = [&](int i, int j) { return std::size_t(j) * (g.nx - 2) + (i - 1); };
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(5 * n);
    const double s = 1.0 / (g.h * g.h);
    for (int j = 0; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            const std::size_t row = index(i, j);
            if (j == 0) {
                trips.emplace_back(row, row, 2.0 * s);
                if (i > 1) trips.emplace_back(row, index(i - 1, 0), -0.5 * s);
                if (i < g.nx - 2) trips.emplace_back(row, index(i + 1, 0), -0.5 * s);
                trips.emplace_back(row, index(i, 1), -1.0 * s);
            } else {
                trips.emplace_back(row, row, 4.0 * s);
                if (i > 1) trips.emplace_back(row, index(i - 1, j), -1.0 * s);
                if (i < g.nx - 2) trips.emplace_back(row, index(i + 1, j), -1.0 * s);
                trips.emplace_back(row, index(i, j - 1), -1.0 * s);
                if (j < g.ny - 2) trips.emplace_back(row, index(i, j + 1), -1.0 * s);
            }
        }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

// Max |5-point Laplacian| over interior nodes, optionally excluding nodes
// selected by `exclude`.
inline double interior_laplacian_residual(
    const Field& v, int c,
    const std::function<bool(double, double)>& exclude = nullptr) {
    const HalfGrid& g = v.grid();
    double worst = 0.0;
    for (int i = 1; i < g.nx - 1; ++i)
        for (int j = 1; j < g.ny - 1; ++j) {
            if (exclude && exclude(g.x(i), g.y(j))) continue;
            const double r = (4 * v(c, i, j) - v(c, i - 1, j) - v(c, i + 1, j) -
                              v(c, i, j - 1) - v(c, i, j + 1)) /
                             (g.h * g.h);
            worst = std::max(worst, std::abs(r));
        }
    return worst;
}

// One-sided second-order flat-boundary flux residual of the nonlinear
// condition dnu v_i = f_i(v_i) - beta v_i sum_j a_ij v_j^2.
struct NeumannResidual {
    double max_abs = 0.0;
    double l2 = 0.0;
    std::vector<double> per_node;  // nx entries per component, flattened
};

inline NeumannResidual neumann_residual(const Field& v, const SystemParams& p) {
    const HalfGrid& g = v.grid();
    NeumannResidual res;
    res.per_node.assign(std::size_t(p.k) * g.nx, 0.0);
    double l2 = 0.0;
    for (int c = 0; c < p.k; ++c) {
        for (int i = 0; i < g.nx; ++i) {
            const double dy = (-3 * v(c, i, 0) + 4 * v(c, i, 1) - v(c, i, 2)) / (2 * g.h);
            double coupling = 0.0;
            for (int j = 0; j < p.k; ++j)
                if (j != c) coupling += p.a[c][j] * v(j, i, 0) * v(j, i, 0);
            const double r =
                -dy - p.reaction.f(c, v(c, i, 0)) + p.beta * v(c, i, 0) * coupling;
            res.per_node[std::size_t(c) * g.nx + i] = r;
            res.max_abs = std::max(res.max_abs, std::abs(r));
            l2 += r * r * g.h;
        }
    }
    res.l2 = std::sqrt(l2);
    return res;
}

inline Field solve_linear_bvp(const HalfGrid& grid, const DirichletData& dirichlet,
                              const std::vector<double>& lam,
                              const std::vector<double>& rhs_g) {
    LinearHalfSolver solver(grid);
    auto d = [&](double x, double y) { return dirichlet.eval(0, x, y); };
    return solver.solve(d, lam, rhs_g);
}

namespace detail {

// Residual of the discrete nonlinear system (ghost-eliminated form), in flux
// units. Vanishes at the algebraic fixed point, unlike the one-sided stencil.
inline double discrete_system_residual(const Field& v, const SystemParams& p) {
    const HalfGrid& g = v.grid();
    double worst = 0.0;
    for (int c = 0; c < p.k; ++c) {
        for (int i = 1; i < g.nx - 1; ++i) {
            double coupling = 0.0;
            for (int j = 0; j < p.k; ++j)
                if (j != c) coupling += p.a[c][j] * v(j, i, 0) * v(j, i, 0);
            const double lam = p.beta * coupling;
            const double rhs = p.reaction.f(c, v(c, i, 0));
            const double r = (2.0 + g.h * lam) * v(c, i, 0) - 0.5 * v(c, i - 1, 0) -
                             0.5 * v(c, i + 1, 0) - v(c, i, 1) - g.h * rhs;
            worst = std::max(worst, std::abs(r) / g.h);
        }
        for (int j = 1; j < g.ny - 1; ++j)
            for (int i = 1; i < g.nx - 1; ++i) {
                const double r = 4 * v(c, i, j) - v(c, i - 1, j) - v(c, i + 1, j) -
                                 v(c, i, j - 1) - v(c, i, j + 1);
                worst = std::max(worst, std::abs(r) / g.h);
            }
    }
    return worst;
}

}  // namespace detail

struct SystemSolution {
    Field field;
    ConvergenceReport report;
};

// Damped Picard iteration with lagged coupling: at each sweep, component i
// solves the linear Robin problem with coefficient beta sum a_ij (v_j)^2 and
// right side f_i(v_i), both frozen at the previous iterate, then the new
// iterate is blended with damping. With newton=true the boundary reaction is
// linearized about the iterate instead of frozen.
inline SystemSolution solve_system(const HalfGrid& grid, const SystemParams& params,
                                   const DirichletData& dirichlet,
                                   const SolveOptions& opts = {},
                                   const Field* initial = nullptr) {
    if (!(opts.damping > 0.0 && opts.damping <= 1.0))
        throw std::invalid_argument("solve_system: damping must be in (0,1]");
    if (opts.max_iter <= 0)
        throw std::invalid_argument("solve_system: max_iter must be positive");

    LinearHalfSolver solver(grid);
    const int k = params.k;

    // beta = 0 or a single component: the system decouples into k linear
    // solves (the reaction still requires iteration unless it vanishes).
    const bool decoupled = (k == 1 || params.beta == 0.0);
    const bool linear = params.reaction.kind() == Reaction::Kind::Zero;

    Field v = initial ? *initial : Field(grid, k);
    if (!initial) {
        v = Field::from_function(grid, k, [&](int c, double x, double y) {
            return dirichlet.eval(c, x, y);
        });
    }

    SystemSolution out{Field(grid, k), {}};
    std::vector<double> lam(grid.nx, 0.0), rhs(grid.nx, 0.0);

    if (decoupled && linear) {
        for (int c = 0; c < k; ++c) {
            auto d = [&](double x, double y) { return dirichlet.eval(c, x, y); };
            std::fill(lam.begin(), lam.end(), 0.0);
            std::fill(rhs.begin(), rhs.end(), 0.0);
            Field vc = solver.solve(d, lam, rhs);
            for (int i = 0; i < grid.nx; ++i)
                for (int j = 0; j < grid.ny; ++j) out.field(c, i, j) = vc(0, i, j);
        }
        out.report.converged = true;
        out.report.iterations = 1;
        out.report.discrete_residual = detail::discrete_system_residual(out.field, params);
        out.report.flux_residual = neumann_residual(out.field, params).max_abs;
        return out;
    }

    double scale = 1.0;
    for (int m = 0; m < opts.max_iter; ++m) {
        Field next(grid, k);
        for (int c = 0; c < k; ++c) {
            for (int i = 0; i < grid.nx; ++i) {
                double coupling = 0.0;
                for (int j = 0; j < k; ++j)
                    if (j != c) coupling += params.a[c][j] * v(j, i, 0) * v(j, i, 0);
                lam[i] = params.beta * coupling;
                rhs[i] = params.reaction.f(c, v(c, i, 0));
                if (opts.newton) {
                    // move the f-linearization into the Robin coefficient:
                    // f(v) ~ f(v0) + f'(v0)(v - v0); requires lam - f' >= 0
                    const double dfd = params.reaction.df(c, v(c, i, 0));
                    if (lam[i] - dfd >= 0.0) {
                        lam[i] -= dfd;
                        rhs[i] -= dfd * v(c, i, 0);
                    }
                }
            }
            auto d = [&](double x, double y) { return dirichlet.eval(c, x, y); };
            Field vc = solver.solve(d, lam, rhs);
            for (int i = 0; i < grid.nx; ++i)
                for (int j = 0; j < grid.ny; ++j)
                    next(c, i, j) =
                        (1.0 - opts.damping) * v(c, i, j) + opts.damping * vc(0, i, j);
        }
        v = next;
        if (!v.all_finite()) {
            out.field = v;
            out.report.error = "NaN detected during iteration";
            out.report.iterations = m + 1;
            return out;
        }
        scale = 0.0;
        for (double val : v.data()) scale = std::max(scale, std::abs(val));
        scale = std::max(scale, 1.0);
        const double res = detail::discrete_system_residual(v, params);
        out.report.discrete_residual = res;
        out.report.iterations = m + 1;
        if (res < opts.tol * scale) {
            out.report.converged = true;
            break;
        }
    }
    out.field = v;
    out.report.flux_residual = neumann_residual(v, params).max_abs;
    return out;
}

}  // namespace seglab
