#pragma once

// Boundary-partition eigenvalue problem on the upper hemisphere: the first
// eigenvalue lambda_1(omega) of the Laplace-Beltrami operator on S^N_+ with
// vanishing trace on the part of the equator outside omega, the associated
// homogeneity exponent gamma(lambda_1), the cap function phi(theta) and the
// cap-restricted partition constant.
//
// N = 1 is solved in closed form (half circle, point constraints). N = 2 uses
// a latitude-longitude tensor mesh with a lumped pole node and inverse power
// iteration on the SPD pencil (K + M) x = mu M x.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "seglab/monotonicity.hpp"  // gamma_exponent

namespace seglab {

enum class CapKind { Empty, Cap, Full };

struct SpectralProblem {
    int N = 1;
    CapKind kind = CapKind::Cap;
    double theta = M_PI / 2;  // half-aperture of the free equatorial cap
    int mesh_lat = 64;        // latitude cells (N = 2)
    int mesh_lon = 128;       // longitude cells (N = 2)

    static SpectralProblem cap(int N, double theta, int mesh_lat = 64, int mesh_lon = 128) {
        if (N != 1 && N != 2) throw std::invalid_argument("SpectralProblem: N must be 1 or 2");
        if (theta < 0.0 || theta > M_PI + 1e-12)
            throw std::invalid_argument("SpectralProblem: theta must lie in [0, pi]");
        SpectralProblem p{N, CapKind::Cap, std::min(theta, M_PI), mesh_lat, mesh_lon};
        if (theta <= 0.0) p.kind = CapKind::Empty;
        if (theta >= M_PI - 1e-12) p.kind = CapKind::Full;
        return p;
    }
    static SpectralProblem empty(int N, int ml = 64, int mlon = 128) {
        return SpectralProblem{N, CapKind::Empty, 0.0, ml, mlon};
    }
    static SpectralProblem full(int N, int ml = 64, int mlon = 128) {
        return SpectralProblem{N, CapKind::Full, M_PI, ml, mlon};
    }
};

struct EigenResult {
    double lambda1 = 0.0;
    double gamma = 0.0;
    double rayleigh_residual = 0.0;
    bool one_signed = true;
    std::vector<double> eigenfunction;  // nodal samples (N = 2 mesh ordering)
    int iterations = 0;
};

namespace detail {

// N = 2 hemisphere FEM. Parametrization: colatitude phi in [0, pi/2] from the
// pole, azimuth psi in [0, 2 pi) periodic. Bilinear elements, metric weight
// sin(phi), 2x2 Gauss quadrature; the pole circle collapses to one node.
inline EigenResult lambda1_hemisphere_fem(const SpectralProblem& prob) {
    const int nphi = prob.mesh_lat, npsi = prob.mesh_lon;
    if (nphi < 4 || npsi < 8)
        throw std::invalid_argument("lambda1: hemisphere mesh too coarse");
    const double dphi = 0.5 * M_PI / nphi;
    const double dpsi = 2.0 * M_PI / npsi;

    // Node numbering: 0 = pole, then ring i = 1..nphi, azimuth j = 0..npsi-1.
    const int n_nodes = 1 + nphi * npsi;
    auto node = [&](int i, int j) {
        if (i == 0) return 0;
        return 1 + (i - 1) * npsi + ((j % npsi + npsi) % npsi);
    };

    // Constrained equator nodes: azimuth distance to the cap center (psi = 0)
    // at least theta. A small tolerance keeps cap edges aligned to the mesh.
    std::vector<char> constrained(n_nodes, 0);
    int n_constrained = 0;
    if (prob.kind != CapKind::Full) {
        const double theta = prob.kind == CapKind::Empty ? 0.0 : prob.theta;
        for (int j = 0; j < npsi; ++j) {
            double psi = j * dpsi;
            double dist = std::min(psi, 2.0 * M_PI - psi);
            if (dist >= theta - 1e-12) {
                constrained[node(nphi, j)] = 1;
                ++n_constrained;
            }
        }
        if (n_constrained < 3)
            throw std::invalid_argument(
                "lambda1: fewer than 3 mesh nodes across the constrained arc");
    }

    std::vector<int> dof(n_nodes, -1);
    int n_dof = 0;
    for (int p = 0; p < n_nodes; ++p)
        if (!constrained[p]) dof[p] = n_dof++;

    const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    std::vector<Eigen::Triplet<double>> tk, tm;
    tk.reserve(std::size_t(nphi) * npsi * 16);
    tm.reserve(std::size_t(nphi) * npsi * 16);

    for (int i = 0; i < nphi; ++i) {
        for (int j = 0; j < npsi; ++j) {
            const int loc[4] = {node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)};
            double Ke[4][4] = {}, Me[4][4] = {};
            for (int qa = 0; qa < 2; ++qa)
                for (int qb = 0; qb < 2; ++qb) {
                    const double a = gp[qa], b = gp[qb];  // local coords in [0,1]^2
                    const double phi = (i + a) * dphi;
                    const double sp = std::sin(phi);
                    // shape functions: bilinear in (a, b)
                    const double Nv[4] = {(1 - a) * (1 - b), a * (1 - b), (1 - a) * b, a * b};
                    const double dNa[4] = {-(1 - b), (1 - b), -b, b};
                    const double dNb[4] = {-(1 - a), -a, (1 - a), a};
                    const double w = 0.25 * dphi * dpsi;  // gauss weight x jacobian
                    for (int r = 0; r < 4; ++r)
                        for (int c = 0; c < 4; ++c) {
                            const double grad =
                                (dNa[r] / dphi) * (dNa[c] / dphi) +
                                (dNb[r] / dpsi) * (dNb[c] / dpsi) / (sp * sp);
                            Ke[r][c] += w * sp * grad;
                            Me[r][c] += w * sp * Nv[r] * Nv[c];
                        }
                }
            for (int r = 0; r < 4; ++r) {
                if (dof[loc[r]] < 0) continue;
                for (int c = 0; c < 4; ++c) {
                    if (dof[loc[c]] < 0) continue;
                    tk.emplace_back(dof[loc[r]], dof[loc[c]], Ke[r][c]);
                    tm.emplace_back(dof[loc[r]], dof[loc[c]], Me[r][c]);
                }
            }
        }
    }

    Eigen::SparseMatrix<double> K(n_dof, n_dof), M(n_dof, n_dof);
    K.setFromTriplets(tk.begin(), tk.end());
    M.setFromTriplets(tm.begin(), tm.end());
    Eigen::SparseMatrix<double> A = K + M;  // shift by 1: SPD even when lambda1 = 0

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("lambda1: factorization of the shifted pencil failed");

    Eigen::VectorXd x = Eigen::VectorXd::Ones(n_dof);
    x.normalize();
    double lambda = 0.0, res = 1.0;
    int it = 0;
    const int max_it = 2000;
    for (; it < max_it; ++it) {
        Eigen::VectorXd y = solver.solve(M * x);
        y /= std::sqrt(y.dot(M * y));
        x = y;
        const Eigen::VectorXd Kx = K * x, Mx = M * x;
        lambda = x.dot(Kx) / x.dot(Mx);
        res = (Kx - lambda * Mx).norm() / Mx.norm();
        if (res < 1e-10) break;
    }
    if (res > 1e-8)
        throw std::runtime_error("lambda1: inverse power iteration did not converge");

    EigenResult out;
    out.lambda1 = std::max(lambda, 0.0);
    out.gamma = gamma_exponent(out.lambda1, prob.N);
    out.rayleigh_residual = res;
    out.iterations = it + 1;
    if (x.sum() < 0.0) x = -x;
    out.one_signed = x.minCoeff() > -1e-8 * x.maxCoeff();
    out.eigenfunction.assign(n_nodes, 0.0);
    for (int p = 0; p < n_nodes; ++p)
        if (dof[p] >= 0) out.eigenfunction[p] = x[dof[p]];
    return out;
}

}  // namespace detail

// First eigenvalue of the constrained hemisphere problem.
inline EigenResult lambda1(const SpectralProblem& prob) {
    if (prob.N == 1) {
        // Half circle, trace constraints at the endpoint set S^0 \ omega.
        EigenResult out;
        switch (prob.kind) {
            case CapKind::Full:
                out.lambda1 = 0.0;  // u == 1
                out.eigenfunction = {1.0, 1.0};
                break;
            case CapKind::Empty:
                out.lambda1 = 1.0;  // u = y = sin(theta) on the half circle
                out.eigenfunction = {0.0, 0.0};
                break;
            case CapKind::Cap:
                // theta < pi keeps at most one endpoint free: one constraint,
                // eigenfunction sin(theta/2), lambda = 1/4.
                out.lambda1 = prob.theta > 0.0 ? 0.25 : 1.0;
                out.eigenfunction = {1.0, 0.0};
                break;
        }
        out.gamma = gamma_exponent(out.lambda1, 1);
        out.rayleigh_residual = 0.0;
        out.one_signed = true;
        return out;
    }
    if (prob.kind == CapKind::Full) {
        EigenResult out;  // no constraint: constants, lambda = 0
        out.lambda1 = 0.0;
        out.gamma = 0.0;
        out.one_signed = true;
        out.eigenfunction.assign(std::size_t(1 + prob.mesh_lat * prob.mesh_lon), 1.0);
        return out;
    }
    return detail::lambda1_hemisphere_fem(prob);
}

struct CapTable {
    std::vector<double> theta;
    std::vector<double> lambda1;
    std::vector<double> gamma;   // Gamma(theta) = gamma(lambda1(omega_theta))
    std::vector<double> phi;     // 0.5 [Gamma(theta) + Gamma(pi - theta)]
    double phi_min = 0.0;
    double phi_argmin = 0.0;
};

// phi(theta) on a symmetric grid of `points` values in [0, pi].
inline CapTable phi_caps(int N, int points = 65, int mesh_lat = 64, int mesh_lon = 128) {
    if (points < 3) throw std::invalid_argument("phi_caps: need at least 3 grid points");
    CapTable out;
    for (int s = 0; s < points; ++s) {
        const double th = M_PI * s / (points - 1);
        out.theta.push_back(th);
        const auto res = lambda1(SpectralProblem::cap(N, th, mesh_lat, mesh_lon));
        out.lambda1.push_back(res.lambda1);
        out.gamma.push_back(res.gamma);
    }
    out.phi.resize(points);
    for (int s = 0; s < points; ++s)
        out.phi[s] = 0.5 * (out.gamma[s] + out.gamma[points - 1 - s]);
    const auto it = std::min_element(out.phi.begin(), out.phi.end());
    out.phi_min = *it;
    out.phi_argmin = out.theta[it - out.phi.begin()];
    return out;
}

struct NuAcfEstimate {
    double value = 0.0;     // upper bound for the cap-restricted infimum
    double cap_min = 0.0;   // min of phi over the theta grid
    double degenerate = 0.0;  // (full, empty)-type partition value
    CapTable table;
};

// Cap-restricted estimate of the ACF partition constant. For N = 1 the
// two-point equator is enumerated exactly (result 1/2).
inline NuAcfEstimate nu_acf_estimate(int N, int points = 65, int mesh_lat = 64,
                                     int mesh_lon = 128) {
    NuAcfEstimate out;
    out.table = phi_caps(N, points, mesh_lat, mesh_lon);
    out.cap_min = out.table.phi_min;
    // (omega, complement) = (full, empty): 1/2 [gamma(0) + gamma(N)] = 1/2.
    out.degenerate = 0.5 * (gamma_exponent(0.0, N) + gamma_exponent(double(N), N));
    out.value = std::min(out.cap_min, out.degenerate);
    return out;
}

}  // namespace seglab
