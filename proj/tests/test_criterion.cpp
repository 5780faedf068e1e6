#include <doctest.h>

#include "fhc/criterion.hpp"
#include "oracles.hpp"

using namespace fhc;

namespace {

std::vector<oracle::I> oracle_thresholds(const oracle::Q& w, int r, const std::vector<oracle::Q>& cs) {
    bool decided = false;
    auto out = oracle::shift_thresholds(w, r, cs, decided);
    REQUIRE(decided);
    return out;
}

std::vector<Index> random_subset(Index N, Index window) {
    std::vector<Index> F;
    for (Index n = N; n < N + window; ++n) {
        if (oracle::uniform(0, 1)) F.push_back(n);
    }
    return F;
}

}  // namespace

TEST_CASE("w = 2, L = 1: N_1 = 2 and the tail values on either side") {
    const auto cert = make_certificate(make_shift(2.0), 1);
    const TailCertificate tc = compute_thresholds(cert);
    CHECK(tc.threshold(1) == 2);

    const auto [lo1, hi1] = oracle::tail_sq_bracket(2, 1, 1, 1);
    const auto [lo2, hi2] = oracle::tail_sq_bracket(2, 1, 1, 2);
    const double t1 = std::sqrt(static_cast<double>(lo1));
    const double t2 = std::sqrt(static_cast<double>(lo2));
    CHECK(t1 > 0.5);
    CHECK(t2 < 0.5);
    CHECK(t1 == doctest::Approx(0.51563).epsilon(1e-4));
    CHECK(t2 == doctest::Approx(0.12598).epsilon(1e-4));
    CHECK(std::abs(tail_norm(cert, cert.target(1), 1, Direction::inverse) - t1) < 1e-6);
    CHECK(std::abs(tail_norm(cert, cert.target(1), 2, Direction::inverse) - t2) < 1e-6);
    CHECK(std::sqrt(static_cast<double>(hi1)) - t1 < 1e-12);
}

TEST_CASE("w = 2, L = 5 thresholds against the exact search") {
    const std::vector<oracle::Q> cs{1, -1, oracle::Q(1, 2), oracle::Q(-1, 2), oracle::Q(3, 2)};
    const auto cert = make_certificate(make_shift(2.0), 5);
    const TailCertificate tc = compute_thresholds(cert);
    const auto want = oracle_thresholds(2, 1, cs);
    REQUIRE(tc.records.size() == 5);
    for (int l = 1; l <= 5; ++l) CHECK(tc.threshold(l) == want[static_cast<std::size_t>(l - 1)]);
    CHECK(want == std::vector<oracle::I>{2, 3, 3, 4, 4});
    for (const auto& r : tc.records) {
        CHECK(r.forward_tail_bound == 0.0);
        CHECK(r.identity_residual == 0.0);
        CHECK(r.inverse_tail_bound <= cross_tail_limit(r.l));
        CHECK(r.own_inverse_tail <= own_tail_limit(r.l));
    }
}

TEST_CASE("power and rotation certificates against the exact search") {
    const std::vector<oracle::Q> cs{1, -1, oracle::Q(1, 2), oracle::Q(-1, 2), oracle::Q(3, 2)};
    const auto base = make_certificate(make_shift(2.0), 5);
    for (int r : {2, 3}) {
        const TailCertificate tc = compute_thresholds(transform_power(base, r));
        const auto want = oracle_thresholds(2, r, cs);
        for (int l = 1; l <= 5; ++l) CHECK(tc.threshold(l) == want[static_cast<std::size_t>(l - 1)]);
    }
    const auto plain = compute_thresholds(base);
    for (Complex lambda : {Complex{0, 1}, Complex{-1, 0}}) {
        const TailCertificate tc = compute_thresholds(transform_rotation(base, lambda));
        for (int l = 1; l <= 5; ++l) CHECK(tc.threshold(l) == plain.threshold(l));
    }
}

TEST_CASE("H2: inverse tail of the constant 1 is sqrt(sum 1/n!^2)") {
    const auto cert = make_certificate(make_differentiation(), 3);
    for (Index N = 1; N <= 8; ++N) {
        oracle::Q s = 0;
        for (int n = static_cast<int>(N); n <= static_cast<int>(N) + 30; ++n) {
            const auto f = oracle::factorial_ratio(0, n);
            s += f * f;
        }
        const double want = std::sqrt(static_cast<double>(s));
        const double got = tail_norm(cert, cert.target(1), N, Direction::inverse);
        CHECK(got >= want);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
    // forward tails are finite sums of derivatives: 1 has D 1 = 0
    CHECK(tail_norm(cert, cert.target(1), 1, Direction::forward) == 0.0);
}

TEST_CASE("translation: inverse tail is the geometric bound") {
    const auto cert = make_certificate(make_translation(1.0), 2);
    for (Index N = 1; N <= 6; ++N) {
        const double want = std::exp(-static_cast<double>(N)) / (1.0 - std::exp(-1.0));
        CHECK(tail_norm(cert, cert.target(1), N, Direction::inverse) == doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("property: every finite sub-sum beyond N stays under the tail bound") {
    std::vector<OperatorCertificate> certs{
        make_certificate(make_shift(2.0), 4),
        make_certificate(make_shift(1.5, SequenceSpace::lp(1)), 4),
        make_certificate(make_shift({0.0, 3.0}, SequenceSpace::c0()), 4),
        make_certificate(make_differentiation(), 4),
        make_certificate(make_differentiation(PolyModel::ck(1, 0.0, 1.0)), 3),
        make_certificate(make_translation(1.0), 2),
        transform_power(make_certificate(make_shift(2.0), 3), 2),
        transform_rotation(make_certificate(make_differentiation(), 3), {0.0, -1.0}),
    };
    for (const auto& cert : certs) {
        for (std::size_t l = 1; l <= cert.target_count(); ++l) {
            const Element& y = cert.target(l);
            for (Index N : {1, 2, 3, 5}) {
                for (Direction dir : {Direction::inverse, Direction::forward}) {
                    const double bound = tail_norm(cert, y, N, dir);
                    for (int trial = 0; trial < 25; ++trial) {
                        CHECK(subsum_norm(cert, y, random_subset(N, 24), dir) <= bound);
                    }
                }
            }
        }
    }
}

TEST_CASE("unconditional probe: seeded, bounded, and blind to terms before N") {
    const auto cert = make_certificate(make_shift(2.0), 3);
    const auto& y = cert.target(3);
    const double a = unconditional_probe(cert, y, 3, 1000, 7);
    CHECK(a == unconditional_probe(cert, y, 3, 1000, 7));
    CHECK(a <= tail_norm(cert, y, 3, Direction::inverse));
    // the leading term alone is ||S^3 y||: a random search finds at least it
    CHECK(a >= norm(apply_inverse(cert, y, 3)));
    CHECK(unconditional_probe(cert, y, 4, 1000, 7) < a);
}

TEST_CASE("cap exceeded names the failing condition") {
    const auto cert = make_certificate(make_shift(2.0), 5);
    try {
        compute_thresholds(cert, 3);
        FAIL("expected a certification error");
    } catch (const CertificationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("l=4") != std::string::npos);
        CHECK(msg.find("inverse tail") != std::string::npos);
    }
}

TEST_CASE("swapped certificates do not certify the built-in examples") {
    // with the roles exchanged the 'inverse' series is sum A^n y, which is
    // finite, but the forward series sum B^n y has tails that need N with
    // ||T_N S_N y - y|| small where T_N = B^N: the identity fails
    const auto cert = transform_inverse(make_certificate(make_shift(2.0), 1));
    CHECK_THROWS_AS(compute_thresholds(cert, 50), CertificationError);
}

TEST_CASE("JSON round trip of a tail certificate") {
    const auto cert = transform_rotation(transform_power(make_certificate(make_shift(2.0), 3), 2), {0.0, 1.0});
    const TailCertificate tc = compute_thresholds(cert);
    const TailCertificate back = tail_certificate_from_json(to_json(tc));
    CHECK(back.records == tc.records);
    CHECK(back.cert.power == 2);
    CHECK(back.cert.twist == Complex{0.0, 1.0});
    CHECK(back.cert.targets == tc.cert.targets);
    CHECK(to_json(back) == to_json(tc));
    const auto h = compute_thresholds(make_certificate(make_differentiation(PolyModel::ck(2, -1.0, 1.0)), 2));
    CHECK(to_json(tail_certificate_from_json(to_json(h))) == to_json(h));
}
