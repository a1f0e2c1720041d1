#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "seglab/blowup.hpp"
#include "seglab/monotonicity.hpp"
#include "seglab/profiles.hpp"
#include "seglab/solver.hpp"

using namespace seglab;

namespace {
bool everywhere(double, double) { return true; }
}

TEST_CASE("radial cutoff: plateau, support and smooth junctions") {
    CHECK(eta_cutoff(0.0) == 1.0);
    CHECK(eta_cutoff(0.5) == 1.0);
    CHECK(eta_cutoff(1.0) == 0.0);
    CHECK(eta_cutoff(1.7) == 0.0);
    CHECK(eta_cutoff(-0.3) == 1.0);
    CHECK(eta_cutoff(0.75) == doctest::Approx(0.5).epsilon(1e-12));
    // C^1 at the junctions: difference quotients shrink with the step
    for (double d0 : {0.5, 1.0}) {
        const double h1 = 1e-3, h2 = 1e-4;
        const double s1 = (eta_cutoff(d0 + h1) - eta_cutoff(d0 - h1)) / (2 * h1);
        const double s2 = (eta_cutoff(d0 + h2) - eta_cutoff(d0 - h2)) / (2 * h2);
        CHECK(std::abs(s1) < 1e-2);
        CHECK(std::abs(s2) < std::abs(s1) + 1e-12);
    }
    // monotone on the transition
    double prev = 1.0;
    for (int s = 0; s <= 100; ++s) {
        const double val = eta_cutoff(0.5 + 0.5 * s / 100.0);
        CHECK(val <= prev + 1e-15);
        prev = val;
    }
}

TEST_CASE("Hölder seminorm: constants, exact power profile, pinned pair") {
    const HalfGrid g = HalfGrid::make(-1, 1, 1, 81, 41);
    const Field c = constant_profile(3.0).sample(g);
    CHECK(holder_seminorm(c, 0, 0.5, everywhere).seminorm == 0.0);

    // v = (x^+)^alpha on the flat boundary: the seminorm in its own exponent
    // is exactly 1, achieved against the zero at the origin
    const Field p = Field::from_function(
        g, 1, [](int, double x, double) { return x > 0 ? std::sqrt(x) : 0.0; });
    const auto est =
        holder_seminorm(p, 0, 0.5, [](double, double y) { return y == 0.0; });
    CHECK(est.seminorm == doctest::Approx(1.0).epsilon(1e-6));

    // seminorm never decreases when the region grows
    const auto small = holder_seminorm(p, 0, 0.5, [](double x, double y) {
        return y == 0.0 && std::abs(x) < 0.5;
    });
    CHECK(est.seminorm >= small.seminorm - 1e-15);

    // shift invariance
    Field shifted = p;
    for (double& v : shifted.data()) v += 7.0;
    CHECK(holder_seminorm(shifted, 0, 0.5, everywhere).seminorm ==
          doctest::Approx(holder_seminorm(p, 0, 0.5, everywhere).seminorm).epsilon(1e-12));

    CHECK_THROWS(holder_seminorm(c, 0, 1.5, everywhere));
    CHECK_THROWS(holder_seminorm(c, 0, 0.5, [](double, double) { return false; }));
}

TEST_CASE("Hölder seminorm subsampled path stays close to the exact value") {
    const HalfGrid g = HalfGrid::make(-1, 1, 1, 161, 81);  // 13041 nodes
    const Field f = classified_pair(0).sample(g);
    const auto exact = holder_seminorm(f, 0, 0.45, everywhere, 1u << 30);
    const auto fast = holder_seminorm(f, 0, 0.45, everywhere, 10000);
    CHECK(fast.seminorm <= exact.seminorm + 1e-12);
    CHECK(fast.seminorm >= 0.9 * exact.seminorm);
}

TEST_CASE("rescaling: identity frame, homogeneous exactness, composition") {
    const HalfGrid src = HalfGrid::make(-1, 1, 1, 201, 101);
    const Field f = classified_pair(0).sample(src);

    RescaleSpec ident;  // px=0, r=1, L=1: pure resample
    const HalfGrid tgt = HalfGrid::make(-0.5, 0.5, 0.5, 101, 51);
    const Field id = rescale(f, ident, tgt);
    for (int i = 0; i < tgt.nx; ++i)
        for (int j = 0; j < tgt.ny; ++j)
            CHECK(id(0, i, j) ==
                  doctest::Approx(f.value(0, tgt.x(i), tgt.y(j))).epsilon(1e-12));

    // gamma-homogeneous profile: v(rX)/r^gamma == v(X) exactly
    RescaleSpec hom;
    hom.r = 0.25;
    hom.alpha = 0.5;
    const Field h = rescale(f, hom, tgt);
    for (int i = 0; i < tgt.nx; i += 7)
        for (int j = 0; j < tgt.ny; j += 7) {
            if (std::hypot(tgt.x(i), tgt.y(j)) < 0.1) continue;  // sqrt singularity
            CHECK(h(0, i, j) ==
                  doctest::Approx(classified_pair(0).value(0, tgt.x(i), tgt.y(j)))
                      .epsilon(2e-3));
        }

    // normalization scales linearly in 1/L
    RescaleSpec norm = hom;
    norm.L = 4.0;
    const Field hn = rescale(f, norm, tgt);
    CHECK(hn(0, 70, 20) == doctest::Approx(h(0, 70, 20) / 4.0).epsilon(1e-12));

    // samples outside the source domain are an error
    RescaleSpec big;
    big.r = 3.0;
    CHECK_THROWS(rescale(f, big, tgt));
    RescaleSpec bad;
    bad.r = -1.0;
    CHECK_THROWS(rescale(f, bad, tgt));
}

TEST_CASE("rescale with cutoff matches the plain rescale on the plateau") {
    const HalfGrid src = HalfGrid::make(-2, 2, 2, 201, 101);
    const Field f = Field::from_function(
        src, 1, [](int, double x, double y) { return std::cos(x) * std::exp(-y); });
    RescaleSpec plain;
    RescaleSpec cut = plain;
    cut.apply_cutoff = true;
    const HalfGrid tgt = HalfGrid::make(-1.5, 1.5, 1.5, 61, 31);
    const Field a = rescale(f, plain, tgt), b = rescale(f, cut, tgt);
    for (int i = 0; i < tgt.nx; ++i)
        for (int j = 0; j < tgt.ny; ++j) {
            const double d = std::hypot(tgt.x(i), tgt.y(j));
            if (d <= 0.5) CHECK(b(0, i, j) == a(0, i, j));
            if (d >= 1.0) CHECK(b(0, i, j) == 0.0);
        }
}

TEST_CASE("segregation mass: disjoint supports vanish, constants in closed form") {
    const HalfGrid g = HalfGrid::make(-1, 1, 1, 201, 101);
    const SystemParams p = SystemParams::make(2, 7.0, Reaction::zero(2));

    const Field pair = classified_pair(0).sample(g);
    const auto dm = segregation_mass(pair, p, -0.9, 0.9);
    CHECK(dm.overlap == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dm.weighted == doctest::Approx(0.0).epsilon(1e-12));

    const double c = 1.1;
    const Field cc = constant_profile(c, 2).sample(g);
    const auto cm = segregation_mass(cc, p, -0.5, 0.5);
    CHECK(cm.overlap == doctest::Approx(std::pow(c, 4.0)).epsilon(1e-10));
    CHECK(cm.weighted == doctest::Approx(7.0 * std::pow(c, 4.0)).epsilon(1e-10));

    CHECK_THROWS(segregation_mass(cc, p, 0.5, -0.5));
    CHECK_THROWS(segregation_mass(cc, p, -2.0, 0.5));
}

TEST_CASE("overlap mass decreases along increasing coupling") {
    const HalfGrid g = HalfGrid::make(-1, 1, 1, 101, 51);
    const Profile prof = classified_pair(0);
    double prev = 1e300;
    Field* warm = nullptr;
    Field store(g, 2);
    for (double beta : {10.0, 100.0, 1000.0}) {
        const SystemParams p = SystemParams::make(2, beta, Reaction::zero(2));
        const SystemSolution sol = solve_system(g, p, prof.trace(), {}, warm);
        REQUIRE(sol.report.converged);
        store = sol.field;
        warm = &store;
        const double ov = segregation_mass(sol.field, p, -0.9, 0.9).overlap;
        CHECK(ov < prev);
        prev = ov;
    }
}

TEST_CASE("zero set: segregated pair pins the origin, positive traces are empty") {
    const HalfGrid g = HalfGrid::make(-1, 1, 1, 401, 201);
    // explicit tolerance: the auto rule 10 h max|grad| is meant for Lipschitz
    // solved fields, not for traces with square-root singularities
    const Field pair = classified_pair(0).sample(g);
    const ZeroSet z = zero_set(pair, 0.02);
    REQUIRE_FALSE(z.nodes.empty());
    for (int n : z.nodes) CHECK(std::abs(g.x(n)) < 0.05);
    CHECK(z.distance[200] == 0.0);  // center node belongs to the zero set

    const Field c = constant_profile(1.0).sample(g);
    const ZeroSet zc = zero_set(c);
    CHECK(zc.nodes.empty());
    for (double d : zc.distance) CHECK(std::isinf(d));

    const Field zero(g, 1);
    const ZeroSet zz = zero_set(zero);
    CHECK(int(zz.nodes.size()) == g.nx);
}

TEST_CASE("growth-exponent fit recovers homogeneities from scan heights") {
    const HalfGrid g = HalfGrid::make(-1, 1, 1, 401, 201);
    std::vector<double> radii;
    for (int s = 0; s < 13; ++s) radii.push_back(0.2 + 0.05 * s);

    const auto pair = almgren_segregated(classified_pair(0).sample(g), 0.0, radii);
    const GrowthFit f1 = fit_growth_exponent(pair.radii, pair.H);
    CHECK(f1.nu == doctest::Approx(0.5).epsilon(0.02));
    CHECK(f1.residual < 1e-3);

    const auto lin = almgren_segregated(linear_y_profile().sample(g), 0.0, radii);
    const GrowthFit f2 = fit_growth_exponent(lin.radii, lin.H);
    CHECK(f2.nu == doctest::Approx(1.0).epsilon(0.02));

    const auto cons = almgren_segregated(constant_profile(2.0).sample(g), 0.0, radii);
    const GrowthFit f3 = fit_growth_exponent(cons.radii, cons.H);
    CHECK(std::abs(f3.nu) < 0.01);

    CHECK_THROWS(fit_growth_exponent({0.1, 0.2}, {1.0, 2.0}));
    CHECK_THROWS(fit_growth_exponent({0.1, 0.2, 0.3}, {1.0, -2.0, 3.0}));
}

TEST_CASE("decay check: Robin solution with moderate slope satisfies both bounds") {
    // solve the one-component Robin problem on a wide grid with unit data
    const HalfGrid g = HalfGrid::make(-2, 2, 2, 201, 101);
    std::vector<double> lam(g.nx, 1.0), rhs(g.nx, 0.0);
    const Field v = solve_linear_bvp(g, DirichletData::constant(1.0), lam, rhs);
    const DecayCheck dc = decay_check(v, 1.0);
    CHECK(dc.lower_ok);
    CHECK(dc.flat_inf >= 1.0 / 3.0 - 1e-8);  // subsolution bound for M = 1, height 2
    CHECK(dc.arc_sup <= 1.0 + 1e-8);
    CHECK(dc.flat_sup <= 1.0 + 1e-8);

    // M -> 0: the solution tends to the constant 1 and the upper bound
    // (1+delta)/M blows up, so it holds trivially
    std::fill(lam.begin(), lam.end(), 1e-6);
    const Field v0 = solve_linear_bvp(g, DirichletData::constant(1.0), lam, rhs);
    const DecayCheck dc0 = decay_check(v0, 1e-6);
    CHECK(dc0.upper_ok);
    CHECK(dc0.flat_sup == doctest::Approx(1.0).epsilon(1e-4));

    CHECK_THROWS(decay_check(v, 0.0));
}
