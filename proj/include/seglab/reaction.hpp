#pragma once

// Per-component reaction terms f_i with primitives F_i, and the parameter
// bundle of the competition system.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seglab {

class Reaction {
  public:
    enum class Kind { Zero, Linear, GrossPitaevskii, Custom };

    static Reaction zero(int k) {
        Reaction r;
        r.kind_ = Kind::Zero;
        r.k_ = k;
        return r;
    }

    // f_i(s) = lambda_i s, F_i(s) = lambda_i s^2 / 2
    static Reaction linear(std::vector<double> lambda) {
        Reaction r;
        r.kind_ = Kind::Linear;
        r.k_ = int(lambda.size());
        r.lambda_ = std::move(lambda);
        return r;
    }

    // f_i(s) = omega_i s^3 + lambda_i s
    static Reaction gross_pitaevskii(std::vector<double> omega, std::vector<double> lambda) {
        if (omega.size() != lambda.size())
            throw std::invalid_argument("Reaction: omega/lambda size mismatch");
        Reaction r;
        r.kind_ = Kind::GrossPitaevskii;
        r.k_ = int(omega.size());
        r.omega_ = std::move(omega);
        r.lambda_ = std::move(lambda);
        return r;
    }

    static Reaction custom(int k, std::function<double(int, double)> f,
                           std::function<double(int, double)> F,
                           std::function<double(int, double)> df = nullptr) {
        Reaction r;
        r.kind_ = Kind::Custom;
        r.k_ = k;
        r.f_ = std::move(f);
        r.F_ = std::move(F);
        r.df_ = std::move(df);
        return r;
    }

    double f(int i, double s) const {
        switch (kind_) {
            case Kind::Zero: return 0.0;
            case Kind::Linear: return lambda_[i] * s;
            case Kind::GrossPitaevskii: return omega_[i] * s * s * s + lambda_[i] * s;
            case Kind::Custom: return f_(i, s);
        }
        return 0.0;
    }

    double F(int i, double s) const {
        switch (kind_) {
            case Kind::Zero: return 0.0;
            case Kind::Linear: return 0.5 * lambda_[i] * s * s;
            case Kind::GrossPitaevskii:
                return 0.25 * omega_[i] * s * s * s * s + 0.5 * lambda_[i] * s * s;
            case Kind::Custom: return F_(i, s);
        }
        return 0.0;
    }

    // f_i'(s), used by the Newton variant of the boundary iteration.
    double df(int i, double s) const {
        switch (kind_) {
            case Kind::Zero: return 0.0;
            case Kind::Linear: return lambda_[i];
            case Kind::GrossPitaevskii: return 3.0 * omega_[i] * s * s + lambda_[i];
            case Kind::Custom:
                if (df_) return df_(i, s);
                return (f_(i, s + 1e-7) - f_(i, s - 1e-7)) / 2e-7;
        }
        return 0.0;
    }

    Kind kind() const { return kind_; }
    int components() const { return k_; }

  private:
    Kind kind_ = Kind::Zero;
    int k_ = 1;
    std::vector<double> omega_, lambda_;
    std::function<double(int, double)> f_, F_, df_;
};

struct SystemParams {
    int k = 1;
    double beta = 0.0;
    Reaction reaction = Reaction::zero(1);
    // symmetric positive interaction weights, all 1 by default
    std::vector<std::vector<double>> a;

    static SystemParams make(int k, double beta, Reaction reaction,
                             std::vector<std::vector<double>> a = {}) {
        if (k < 1) throw std::invalid_argument("SystemParams: k must be >= 1");
        if (beta < 0.0) throw std::invalid_argument("SystemParams: beta must be >= 0");
        SystemParams p;
        p.k = k;
        p.beta = beta;
        p.reaction = std::move(reaction);
        if (a.empty()) {
            p.a.assign(k, std::vector<double>(k, 1.0));
        } else {
            if (int(a.size()) != k)
                throw std::invalid_argument("SystemParams: a_ij must be k x k");
            for (int i = 0; i < k; ++i) {
                if (int(a[i].size()) != k)
                    throw std::invalid_argument("SystemParams: a_ij must be k x k");
                for (int j = 0; j < k; ++j) {
                    if (a[i][j] <= 0.0)
                        throw std::invalid_argument("SystemParams: a_ij must be positive");
                    if (std::abs(a[i][j] - a[j][i]) > 1e-14)
                        throw std::invalid_argument("SystemParams: a_ij must be symmetric");
                }
            }
            p.a = std::move(a);
        }
        return p;
    }
};

}  // namespace seglab
