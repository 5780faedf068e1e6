#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace fhc {

using Index = std::int64_t;

/// Key of one index set A(l, nu): target index l and gap budget nu.
struct PairKey {
    Index l = 1;
    Index nu = 1;

    friend bool operator==(const PairKey&, const PairKey&) = default;
};

struct RankedPair {
    PairKey key;
    int rank = 0;          // 1-based
    Index block_length = 0;
};

/// Pairwise disjoint index sets A(l, nu) of positive lower density.
///
/// The natural numbers are tiled by consecutive blocks starting at 1. Block
/// t (t = 1, 2, ...) belongs to the pair of rank 1 + v2(t) when that rank
/// exists and is otherwise a length-1 filler block without elements. A
/// block owned by a pair with budget nu has length 4 * max(nu, 1) and holds
/// exactly two members, at offsets nu and 3 * nu from its start. Every
/// member therefore has at least nu free positions on each side inside its
/// own block, which gives |n - m| >= nu + mu across all sets.
///
/// Blocks are materialized lazily; extension is guarded by a mutex so a
/// schedule may be shared between threads.
class PartitionSchedule {
public:
    explicit PartitionSchedule(std::vector<PairKey> pairs);

    const std::vector<RankedPair>& ranked_pairs() const { return ranked_; }
    const RankedPair& lookup(const PairKey& key) const;
    bool contains(const PairKey& key) const;

    std::vector<Index> members(const PairKey& key, Index horizon) const;
    std::optional<PairKey> locate(Index n) const;
    double density_floor(const PairKey& key, Index window_start, Index horizon) const;

    /// Exact asymptotic density of A(key) implied by the block frequencies.
    double analytic_density(const PairKey& key) const;

    /// Members of every set in [1, horizon], merged and sorted by n.
    std::vector<std::pair<Index, PairKey>> all_members(Index horizon) const;

private:
    struct Block {
        Index start;
        int rank;  // 0 marks a filler block
    };
    struct Blocks;

    void extend_to(Index position) const;
    int rank_of_block(Index t) const;
    Index length_of_rank(int rank) const;

    std::vector<RankedPair> ranked_;
    std::shared_ptr<Blocks> blocks_;
};

PartitionSchedule build_schedule(const std::vector<PairKey>& pairs);
std::vector<Index> members(const PartitionSchedule& sched, const PairKey& key, Index horizon);
std::optional<PairKey> locate(const PartitionSchedule& sched, Index n);
double density_floor(const PartitionSchedule& sched, const PairKey& key, Index window_start, Index horizon);

/// CSV with columns n,l,nu for every member in [1, horizon].
void write_members_csv(std::ostream& out, const PartitionSchedule& sched, Index horizon);

}  // namespace fhc
