#include <doctest.h>

#include <sstream>
#include <thread>

#include "fhc/density_partition.hpp"
#include "oracles.hpp"

using namespace fhc;

namespace {

std::vector<std::pair<oracle::I, oracle::I>> merged(const PartitionSchedule& s, Index horizon) {
    std::vector<std::pair<oracle::I, oracle::I>> out;
    for (const auto& [n, key] : s.all_members(horizon)) out.emplace_back(n, key.nu);
    return out;
}

std::vector<PairKey> random_pairs() {
    const int count = static_cast<int>(oracle::uniform(1, 6));
    std::vector<PairKey> pairs;
    while (static_cast<int>(pairs.size()) < count) {
        PairKey k{oracle::uniform(1, 6), oracle::uniform(1, 9)};
        if (std::find(pairs.begin(), pairs.end(), k) == pairs.end()) pairs.push_back(k);
    }
    return pairs;
}

}  // namespace

TEST_CASE("single pair: blocks of length 8, members at offsets 2 and 6") {
    // Blocks alternate rank-1 (length 8) with length-1 fillers at even t:
    // [1,8] [9] [10,17] [18] ... so A(1,2) starts 3, 7, 12, 16.
    const PartitionSchedule s({{1, 2}});
    CHECK(s.members({1, 2}, 16) == std::vector<Index>{3, 7, 12, 16});
    CHECK(s.members({1, 2}, 0).empty());
    CHECK(s.analytic_density({1, 2}) == doctest::Approx(2.0 / 9.0));
    CHECK(s.density_floor({1, 2}, 100, 100000) == doctest::Approx(2.0 / 9.0).epsilon(0.02));
}

TEST_CASE("two pairs: lowest-set-bit scheduling") {
    const PartitionSchedule s({{1, 1}, {1, 2}});
    CHECK(s.members({1, 1}, 21) == std::vector<Index>{2, 4, 14, 16, 19, 21});
    CHECK(s.members({1, 2}, 21) == std::vector<Index>{7, 11});
    CHECK(s.locate(7) == PairKey{1, 2});
    CHECK_FALSE(s.locate(5).has_value());
    // rank 1 blocks length 4 at rate 1/2, rank 2 length 8 at rate 1/4, fillers
    // length 1 at rate 1/4: average block 4.25
    CHECK(s.analytic_density({1, 1}) == doctest::Approx(1.0 / 4.25));
    CHECK(s.density_floor({1, 1}, 1000, 100000) == doctest::Approx(0.235).epsilon(0.04));
}

TEST_CASE("ranking by l + nu, ties by l") {
    const PartitionSchedule s({{3, 1}, {1, 5}, {2, 2}, {1, 1}});
    const auto& r = s.ranked_pairs();
    REQUIRE(r.size() == 4);
    CHECK(r[0].key == PairKey{1, 1});
    CHECK(r[1].key == PairKey{2, 2});
    CHECK(r[2].key == PairKey{3, 1});
    CHECK(r[3].key == PairKey{1, 5});
    CHECK(r[3].block_length == 20);
}

TEST_CASE("rejects empty, duplicate and unknown keys") {
    CHECK_THROWS_AS(PartitionSchedule({}), std::invalid_argument);
    CHECK_THROWS_AS(PartitionSchedule({{1, 2}, {1, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(PartitionSchedule({{0, 2}}), std::invalid_argument);
    const PartitionSchedule s({{1, 2}});
    CHECK_THROWS_AS(s.members({2, 2}, 10), std::out_of_range);
    CHECK_THROWS_AS(s.density_floor({1, 2}, 10, 10), std::invalid_argument);
}

TEST_CASE("property: gaps, lower bound, disjointness over random schedules") {
    for (int trial = 0; trial < 60; ++trial) {
        const auto pairs = random_pairs();
        const PartitionSchedule s(pairs);
        const Index horizon = 20000;
        const auto all = merged(s, horizon);
        CHECK(oracle::gaps_hold(all));

        // disjointness, and all_members agrees with the per-key lists
        std::map<Index, int> seen;
        std::size_t total = 0;
        for (const auto& k : pairs) {
            const auto ms = s.members(k, horizon);
            total += ms.size();
            for (Index n : ms) {
                ++seen[n];
                CHECK(s.locate(n) == k);
            }
            CHECK(!ms.empty());
        }
        CHECK(seen.size() == total);
        CHECK(all.size() == total);
    }
}

TEST_CASE("property: locate is the inverse of members on every integer") {
    for (int trial = 0; trial < 20; ++trial) {
        const auto pairs = random_pairs();
        const PartitionSchedule s(pairs);
        std::map<Index, PairKey> owner;
        for (const auto& k : pairs) {
            for (Index n : s.members(k, 3000)) owner[n] = k;
        }
        for (Index n = 1; n <= 3000; ++n) {
            const auto hit = s.locate(n);
            if (owner.count(n)) {
                CHECK(hit == owner[n]);
            } else {
                CHECK_FALSE(hit.has_value());
            }
        }
    }
}

TEST_CASE("property: density floor against brute-force counting and the analytic value") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto pairs = random_pairs();
        const PartitionSchedule s(pairs);
        for (const auto& k : pairs) {
            const auto ms = s.members(k, 50000);
            const double brute = oracle::lower_density(ms, 5000, 50000);
            CHECK(s.density_floor(k, 5000, 50000) == doctest::Approx(brute).epsilon(1e-12));
            CHECK(brute >= 0.5 * s.analytic_density(k));
            CHECK(brute > 0.0);
        }
    }
}

TEST_CASE("determinism and concurrent lazy extension") {
    const std::vector<PairKey> pairs{{1, 2}, {2, 3}, {3, 3}, {4, 4}, {5, 4}};
    const PartitionSchedule a(pairs), b(pairs);
    CHECK(a.members({4, 4}, 100000) == b.members({4, 4}, 100000));

    const PartitionSchedule shared(pairs);
    std::vector<std::vector<Index>> got(4);
    std::vector<std::thread> pool;
    for (int i = 0; i < 4; ++i) {
        pool.emplace_back([&, i] { got[static_cast<std::size_t>(i)] = shared.members({3, 3}, 50000 + 1000 * i); });
    }
    for (auto& t : pool) t.join();
    const auto ref = a.members({3, 3}, 53000);
    for (int i = 0; i < 4; ++i) {
        const auto& g = got[static_cast<std::size_t>(i)];
        CHECK(std::equal(g.begin(), g.end(), ref.begin()));
    }
}

TEST_CASE("members CSV") {
    const PartitionSchedule s({{1, 1}, {1, 2}});
    std::ostringstream os;
    write_members_csv(os, s, 11);
    CHECK(os.str() == "n,l,nu\n2,1,1\n4,1,1\n7,1,2\n11,1,2\n");
}
