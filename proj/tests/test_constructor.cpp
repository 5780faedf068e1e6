#include <doctest.h>

#include "fhc/constructor.hpp"
#include "oracles.hpp"

using namespace fhc;

namespace {

const TailCertificate& shift5() {
    static const TailCertificate tc = compute_thresholds(make_certificate(make_shift(2.0), 5));
    return tc;
}

std::vector<Index> placed(const FhcPlacement& p, int l) {
    std::vector<Index> out;
    for (const auto& [n, k] : p.placements) {
        if (k == l) out.push_back(n);
    }
    return out;
}

// x = sum_{j <= H} S^j z_j built one shift step at a time, then T^n x.
oracle::Seq brute_orbit(const FhcPlacement& p, const std::vector<oracle::Q>& coeff, Index n) {
    oracle::Seq x;
    for (const auto& [j, l] : p.placements) {
        x = oracle::add(x, oracle::unshift_n({{1, coeff[static_cast<std::size_t>(l - 1)]}}, 2, j));
    }
    return oracle::shift_n(x, 2, n);
}

oracle::Seq to_seq(const SparseVector<Rational>& v) {
    oracle::Seq s;
    for (const auto& [k, q] : v.entries()) s[k] = q;
    return s;
}

double seq_gap(const Element& e, const oracle::Seq& x) {
    const auto& v = std::get<SparseVector<Complex>>(e);
    double sq = 0.0;
    std::map<Index, double> diff;
    for (const auto& [k, q] : x) diff[k] -= static_cast<double>(q);
    for (const auto& [k, c] : v.entries()) diff[k] += c.real();
    for (const auto& [k, d] : diff) sq += d * d;
    return std::sqrt(sq);
}

void check_proof_bounds(const FhcPlacement& p) {
    for (const auto& [n, l] : p.placements) {
        const OrbitValue v = orbit_eval(p, n);
        REQUIRE(v.target == l);
        CHECK(distance_to_target(p, v, l) + v.certified_error <= proximity_bound(l));
        CHECK(v.forward_norm <= one_sided_bound(l));
        CHECK(v.backward_norm <= one_sided_bound(l));
        CHECK(v.middle_residual <= middle_bound(l));
    }
}

}  // namespace

TEST_CASE("placements follow the schedule over {(l, N_l)}") {
    const FhcPlacement p = assign_placements(shift5(), 100);
    // hand enumeration with N = (2, 3, 3, 4, 4): ranks (1,2) (2,3) (3,3) (4,4) (5,4)
    CHECK(placed(p, 1) == std::vector<Index>{3, 7, 23, 27, 43, 47, 63, 67, 87, 91});
    CHECK(placed(p, 2) == std::vector<Index>{12, 18, 52, 58, 96});
    CHECK(placed(p, 3) == std::vector<Index>{32, 38});
    CHECK(placed(p, 4) == std::vector<Index>{73, 81});
    CHECK(placed(p, 5).empty());
    CHECK(p.target_at(3) == 1);
    CHECK(p.target_at(4) == 0);
    CHECK(p.target_at(0) == 0);
    CHECK(p.window == 13);
    CHECK(p.window_tail <= kWindowTolerance);
    CHECK_THROWS_AS(assign_placements(shift5(), 3), std::invalid_argument);
}

TEST_CASE("orbit_eval agrees with brute force on the exact vector") {
    const FhcPlacement p = assign_placements(shift5(), 90);
    const std::vector<oracle::Q> coeff{1, -1, oracle::Q(1, 2), oracle::Q(-1, 2), oracle::Q(3, 2)};
    for (Index n = 0; n <= 60; ++n) {
        const oracle::Seq want = brute_orbit(p, coeff, n);
        const SparseVector<Rational> exact = orbit_eval_exact(p, n);
        CHECK(to_seq(exact) == want);
        if (n == 0) continue;
        const OrbitValue v = orbit_eval(p, n);
        // the brute-force vector stops at j = 90; what lies past it is far
        // below the certified error for n <= 60 (window 13)
        CHECK(seq_gap(v.value, want) <= v.certified_error + 1e-300);
    }
}

TEST_CASE("exact orbit equals T^n applied to the materialized vector") {
    const FhcPlacement p = assign_placements(shift5(), 64);
    const auto x = materialize_exact(p, 64);
    for (Index n = 0; n <= 64; ++n) CHECK(orbit_eval_exact(p, n) == forward_exact(p, x, n));
    const auto q = assign_placements(compute_thresholds(transform_rotation(transform_power(shift5().cert, 2), -1.0)), 40);
    const auto xq = materialize_exact(q, 40);
    for (Index n = 0; n <= 40; ++n) CHECK(orbit_eval_exact(q, n) == forward_exact(q, xq, n));
}

TEST_CASE("materialize and orbit_eval(0)") {
    const FhcPlacement p = assign_placements(shift5(), 200);
    const Materialized m = materialize(p, 200);
    const OrbitValue v0 = orbit_eval(p, 0);
    CHECK(v0.value == m.x);
    const auto exact = materialize_exact(p, 200);
    CHECK(seq_gap(m.x, to_seq(exact)) <= m.tail_bound);
    const Materialized small = materialize(p, 10);
    CHECK(seq_gap(small.x, to_seq(exact)) <= small.tail_bound);
    CHECK_THROWS_AS(materialize(p, 201), std::out_of_range);
    CHECK_THROWS_AS(orbit_eval(p, 201), std::out_of_range);
}

TEST_CASE("proof bounds on the shift, its transforms and H2") {
    check_proof_bounds(assign_placements(shift5(), 3000));
    check_proof_bounds(assign_placements(compute_thresholds(transform_power(shift5().cert, 2)), 2000));
    check_proof_bounds(assign_placements(compute_thresholds(transform_power(shift5().cert, 3)), 2000));
    check_proof_bounds(assign_placements(compute_thresholds(transform_rotation(shift5().cert, {0.0, 1.0})), 2000));
    check_proof_bounds(assign_placements(compute_thresholds(make_certificate(make_differentiation(), 3)), 1000));
    check_proof_bounds(assign_placements(compute_thresholds(make_certificate(make_translation(1.0), 2)), 500));
}

TEST_CASE("near the horizon the window still reaches unrecorded placements") {
    const FhcPlacement p = assign_placements(shift5(), 100);
    const FhcPlacement wide = assign_placements(shift5(), 400);
    for (Index n = 90; n <= 100; ++n) {
        const OrbitValue a = orbit_eval(p, n);
        const OrbitValue b = orbit_eval(wide, n);
        CHECK(a.value == b.value);
    }
}

TEST_CASE("swapped certificates are rejected") {
    FhcPlacement p = assign_placements(shift5(), 50);
    p.tc.cert = transform_inverse(p.tc.cert);
    CHECK_THROWS_AS(orbit_eval(p, 5), std::invalid_argument);
    CHECK_FALSE(supports_exact(p));
}

TEST_CASE("JSON round trip rebuilds and checks the placements") {
    const FhcPlacement p = assign_placements(shift5(), 300);
    const FhcPlacement q = placement_from_json(to_json(p));
    CHECK(q.placements == p.placements);
    CHECK(q.window == p.window);
    CHECK(to_json(q) == to_json(p));
    Json bad = to_json(p);
    bad["placements"][0][0] = 4;
    CHECK_THROWS_AS(placement_from_json(bad), std::invalid_argument);
}
