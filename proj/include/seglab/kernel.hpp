#pragma once

// Regularized fundamental-solution kernel for the weighted monotonicity
// integrals. Gamma_1 is C^1 across |X| = 1; Gamma_eps(X) = Gamma_1(X/eps)
// eps^{1-N} increases to |X|^{1-N} pointwise as eps -> 0.

#include <cmath>
#include <stdexcept>

namespace seglab {

struct Kernel {
    int N = 1;          // boundary dimension
    double eps = 0.0;   // regularization scale; 0 means the exact kernel

    static Kernel exact(int N) { return Kernel{N, 0.0}; }
    static Kernel regularized(int N, double eps) {
        if (eps < 0.0) throw std::invalid_argument("Kernel: eps must be >= 0");
        return Kernel{N, eps};
    }

    // Gamma_1 as a function of d = |X|.
    double gamma1(double d) const {
        if (d >= 1.0) return std::pow(d, 1.0 - N);
        return 0.5 * (N + 1) - 0.5 * (N - 1) * d * d;
    }

    // Gamma_eps(|X| = d). With eps = 0 this is |X|^{1-N}; the caller is
    // responsible for staying off the singularity when N > 1.
    double operator()(double d) const {
        if (eps == 0.0) {
            if (N == 1) return 1.0;
            if (d <= 0.0) throw std::domain_error("Kernel: exact kernel at the origin");
            return std::pow(d, 1.0 - N);
        }
        return gamma1(d / eps) * std::pow(eps, 1.0 - N);
    }
};

}  // namespace seglab
