#include <doctest.h>

#include "fhc/regularized_semigroup.hpp"
#include "oracles.hpp"

using namespace fhc;

namespace {

oracle::Q random_q(int num_max, int den_max) {
    return oracle::Q(oracle::uniform(-num_max, num_max), oracle::uniform(1, den_max));
}

// Tent through (a, 0), (m, h), (b, 0), evaluated from its definition.
double tent_at(double a, double m, double b, double h, double x) {
    if (x <= a || x >= b) return 0.0;
    return x <= m ? h * (x - a) / (m - a) : h * (b - x) / (b - m);
}

// (d/dx + lambda)^2 f for f = x^2 (1 - x)^2, the second-order term of the
// difference quotient.
double second_order(double lambda, double x) {
    const double f = x * x * (1 - x) * (1 - x);
    const double d1 = 2 * x - 6 * x * x + 4 * x * x * x;
    const double d2 = 2 - 12 * x + 12 * x * x;
    return d2 + 2 * lambda * d1 + lambda * lambda * f;
}

}  // namespace

TEST_CASE("semigroup law holds exactly on random rational tents") {
    for (double c : {1.0, 2.0, -0.5}) {
        for (double lambda : {1.0, 0.5}) {
            const RegularizedSemigroup sg{lambda, c == 1.0 ? CModel{IdentityC{}} : CModel{ScalarC{c}}};
            for (int trial = 0; trial < 100; ++trial) {
                const oracle::Q a = oracle::Q(oracle::uniform(0, 8), oracle::uniform(1, 4));
                const oracle::Q m = a + oracle::Q(oracle::uniform(1, 9), oracle::uniform(1, 5));
                const oracle::Q b = m + oracle::Q(oracle::uniform(1, 9), oracle::uniform(1, 5));
                oracle::Q h = random_q(7, 5);
                if (h == 0) h = 1;
                const auto tent = PiecewiseLinear<Rational>::tent(a, m, b, h);
                const Rational t(oracle::uniform(0, 20), oracle::uniform(1, 7));
                const Rational s(oracle::uniform(0, 20), oracle::uniform(1, 7));
                CHECK(semigroup_law_residual(sg, t, s, ScaledFn<Rational>{tent, Rational(0)}) == 0.0);
            }
        }
    }
}

TEST_CASE("semigroup law in floating point against pointwise evaluation") {
    const RegularizedSemigroup sg{1.0, ScalarC{2.0}};
    for (int trial = 0; trial < 50; ++trial) {
        const double a = oracle::uniform(0, 40) / 8.0, m = a + oracle::uniform(1, 16) / 8.0, b = m + oracle::uniform(1, 16) / 8.0;
        const auto f = PiecewiseLinearFn::tent(a, m, b, 1.0);
        const double t = oracle::uniform(0, 30) / 10.0, s = oracle::uniform(0, 30) / 10.0;
        const PiecewiseLinearFn lhs = w_apply(sg, t, w_apply(sg, s, f));
        for (int i = 0; i <= 200; ++i) {
            const double x = b * i / 200.0;
            const double want = 4.0 * std::exp(t + s) * tent_at(a, m, b, 1.0, x + t + s);
            CHECK(std::abs(lhs(x) - want) <= 1e-12 * std::exp(t + s) * 4.0);
        }
    }
}

TEST_CASE("W(t) on the unit tent: breakpoints and values at t = 1/2") {
    const RegularizedSemigroup sg{1.0, IdentityC{}};
    const auto f = PiecewiseLinearFn::tent(0.0, 1.0, 2.0, 1.0);
    const PiecewiseLinearFn g = w_apply(sg, 0.5, f);
    CHECK(g.breakpoints() == std::vector<double>{0.0, 0.5, 1.5});
    REQUIRE(g.values().size() == 3);
    CHECK(g.values()[0] == doctest::Approx(0.5 * std::exp(0.5)));
    CHECK(g.values()[1] == doctest::Approx(std::exp(0.5)));
    CHECK(g.values()[2] == 0.0);
    CHECK(w_apply(sg, 0.0, f) == f);
    CHECK(w_apply(sg, 2.0, f).empty());
    CHECK_THROWS(w_apply(sg, -1.0, f));
}

TEST_CASE("generator: residual is first order in the step") {
    const SmoothBump bump = standard_bump();
    for (double lambda : {1.0, 0.25}) {
        const RegularizedSemigroup sg{lambda, ScalarC{3.0}};
        double sup2 = 0.0;
        for (int i = 0; i <= 4000; ++i) sup2 = std::max(sup2, std::abs(second_order(lambda, i / 4000.0)));
        for (double h : {1e-2, 1e-3, 1e-4}) {
            const double r = generator_residual(sg, bump, h);
            const double half = generator_residual(sg, bump, h / 2);
            // Taylor: |quotient - (f' + lambda f)| <= h/2 sup|(D + lambda)^2 f| e^{lambda h}
            CHECK(r <= 0.5 * h * sup2 * std::exp(lambda * h) * 1.01 + 1e-9);
            CHECK(half / r >= 0.4);
            CHECK(half / r <= 0.6);
        }
    }
}

TEST_CASE("generator rejects bumps that are not C^1") {
    const RegularizedSemigroup sg{1.0, IdentityC{}};
    const SmoothBump kink{{0.0, 1.0, -1.0}, 0.0, 1.0};  // x (1 - x): f' jumps at the ends
    CHECK_THROWS_AS(generator_residual(sg, kink, 1e-3), std::invalid_argument);
    const SmoothBump step{{1.0}, 0.0, 1.0};
    CHECK_THROWS_AS(generator_residual(sg, step, 1e-3), std::invalid_argument);
    CHECK(generator_residual(sg, SmoothBump{{0.0}, 0.0, 1.0}, 1e-3) == 0.0);
    CHECK_THROWS_AS(generator_residual(sg, standard_bump(), 0.0), std::invalid_argument);
}

TEST_CASE("[Im C] norm") {
    const RegularizedSemigroup diag{1.0, DiagonalDecayC{0.5}};
    for (int trial = 0; trial < 50; ++trial) {
        SparseVector<Complex> y(SequenceSpace::lp(2));
        for (Index k = 1; k <= 12; ++k) y.set(k, {oracle::uniform(-9, 9) * 1.0, oracle::uniform(-9, 9) * 1.0});
        const auto x = apply_c(diag, y);
        CHECK(imc_norm(diag, x) == doctest::Approx(norm(y)).epsilon(1e-12));
    }
    SparseVector<Complex> far(SequenceSpace::lp(2));
    far.set(2000, {1.0, 0.0});  // 0.5^2000 underflows: no finite preimage
    CHECK_THROWS_AS(imc_norm(diag, far), std::domain_error);

    const RegularizedSemigroup sc{1.0, ScalarC{-4.0}};
    CHECK(imc_norm(sc, PiecewiseLinearFn::tent(0.0, 1.0, 2.0, 2.0)) == doctest::Approx(0.5));
    CHECK_THROWS(imc_norm(diag, PiecewiseLinearFn::tent(0.0, 1.0, 2.0, 2.0)));
    CHECK_THROWS((RegularizedSemigroup{1.0, ScalarC{0.0}}.validate()));
    CHECK_THROWS((RegularizedSemigroup{1.0, DiagonalDecayC{1.5}}.validate()));
    CHECK_THROWS((RegularizedSemigroup{0.0, IdentityC{}}.validate()));
}

TEST_CASE("solution orbit matches a pointwise sum over the placements") {
    const TailCertificate tc = compute_thresholds(make_certificate(make_translation(1.0), 2));
    const FhcPlacement p = assign_placements(tc, 120);
    const SolutionOrbit orbit(p);
    for (int trial = 0; trial < 40; ++trial) {
        const double t = oracle::uniform(0, 800) / 8.0 + (trial % 2 ? 0.0 : 0.3);
        const auto s = orbit.at(t);
        double gap = 0.0;
        for (int i = 0; i <= 300; ++i) {
            const double x = 3.0 * i / 300.0;
            double want = 0.0;
            for (const auto& [j, l] : p.placements) {
                const auto& y = std::get<PiecewiseLinearFn>(p.target(l));
                const auto& xs = y.breakpoints();
                const auto& vs = y.values();
                const double u = x + t - static_cast<double>(j);
                // targets are single tents or a boundary ramp
                double v = 0.0;
                if (u >= xs.front() && u <= xs.back()) {
                    for (std::size_t q = 1; q < xs.size(); ++q) {
                        if (u <= xs[q]) {
                            v = vs[q - 1] + (vs[q] - vs[q - 1]) * (u - xs[q - 1]) / (xs[q] - xs[q - 1]);
                            break;
                        }
                    }
                }
                want += std::exp(t - static_cast<double>(j)) * v;
            }
            gap = std::max(gap, std::abs(s.value(x) - want));
        }
        CHECK(gap <= s.error + 1e-12);
    }
}

TEST_CASE("solution orbit at integer times agrees with orbit_eval") {
    const TailCertificate tc = compute_thresholds(make_certificate(make_translation(1.0), 1));
    const FhcPlacement p = assign_placements(tc, 200);
    const SolutionOrbit orbit(p);
    for (Index n = 1; n <= 150; ++n) {
        const auto s = orbit.at(static_cast<double>(n));
        const OrbitValue v = orbit_eval(p, n);
        const double d = norm(s.value - std::get<PiecewiseLinearFn>(v.value));
        CHECK(d <= s.error + v.certified_error + 1e-12);
    }
    CHECK_THROWS(orbit.at(-1.0));
    const FhcPlacement shift = assign_placements(compute_thresholds(make_certificate(make_shift(2.0), 1)), 10);
    CHECK_THROWS_AS(SolutionOrbit{shift}, std::invalid_argument);
}
