#include "fhc/density_partition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fhc {

struct PartitionSchedule::Blocks {
    std::mutex mutex;
    std::vector<Block> blocks;  // blocks[t-1] is block t
    Index next_start = 1;
};

PartitionSchedule::PartitionSchedule(std::vector<PairKey> pairs) : blocks_(std::make_shared<Blocks>()) {
    if (pairs.empty()) throw std::invalid_argument("build_schedule: pair list is empty");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].l < 1 || pairs[i].nu < 1) {
            std::ostringstream msg;
            msg << "build_schedule: pair (" << pairs[i].l << "," << pairs[i].nu << ") needs l >= 1 and nu >= 1";
            throw std::invalid_argument(msg.str());
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (pairs[i] == pairs[j]) {
                std::ostringstream msg;
                msg << "build_schedule: duplicate pair (" << pairs[i].l << "," << pairs[i].nu << ") at positions " << j
                    << " and " << i;
                throw std::invalid_argument(msg.str());
            }
        }
    }
    // Rank by ascending l + nu, ties by ascending l.
    std::sort(pairs.begin(), pairs.end(), [](const PairKey& a, const PairKey& b) {
        if (a.l + a.nu != b.l + b.nu) return a.l + a.nu < b.l + b.nu;
        return a.l < b.l;
    });
    ranked_.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        ranked_.push_back({pairs[i], static_cast<int>(i + 1), 4 * std::max<Index>(pairs[i].nu, 1)});
    }
}

const RankedPair& PartitionSchedule::lookup(const PairKey& key) const {
    for (const auto& rp : ranked_) {
        if (rp.key == key) return rp;
    }
    std::ostringstream msg;
    msg << "partition schedule: unknown key (" << key.l << "," << key.nu << ")";
    throw std::out_of_range(msg.str());
}

bool PartitionSchedule::contains(const PairKey& key) const {
    return std::any_of(ranked_.begin(), ranked_.end(), [&](const RankedPair& rp) { return rp.key == key; });
}

int PartitionSchedule::rank_of_block(Index t) const {
    const int j = 1 + std::countr_zero(static_cast<std::uint64_t>(t));
    return j <= static_cast<int>(ranked_.size()) ? j : 0;
}

Index PartitionSchedule::length_of_rank(int rank) const {
    return rank == 0 ? 1 : ranked_[rank - 1].block_length;
}

void PartitionSchedule::extend_to(Index position) const {
    std::lock_guard lock(blocks_->mutex);
    while (blocks_->next_start <= position) {
        const Index t = static_cast<Index>(blocks_->blocks.size()) + 1;
        const int rank = rank_of_block(t);
        blocks_->blocks.push_back({blocks_->next_start, rank});
        blocks_->next_start += length_of_rank(rank);
    }
}

std::vector<Index> PartitionSchedule::members(const PairKey& key, Index horizon) const {
    const RankedPair& rp = lookup(key);
    std::vector<Index> out;
    if (horizon < 1) return out;
    extend_to(horizon);
    const Index nu = rp.key.nu;
    std::lock_guard lock(blocks_->mutex);
    for (const Block& b : blocks_->blocks) {
        if (b.start > horizon) break;
        if (b.rank != rp.rank) continue;
        for (Index n : {b.start + nu, b.start + 3 * nu}) {
            if (n <= horizon) out.push_back(n);
        }
    }
    return out;
}

std::optional<PairKey> PartitionSchedule::locate(Index n) const {
    if (n < 1) return std::nullopt;
    extend_to(n);
    std::lock_guard lock(blocks_->mutex);
    const auto& bl = blocks_->blocks;
    auto it = std::upper_bound(bl.begin(), bl.end(), n, [](Index v, const Block& b) { return v < b.start; });
    const Block& b = *std::prev(it);
    if (b.rank == 0) return std::nullopt;
    const PairKey& key = ranked_[b.rank - 1].key;
    const Index offset = n - b.start;
    if (offset == key.nu || offset == 3 * key.nu) return key;
    return std::nullopt;
}

double PartitionSchedule::density_floor(const PairKey& key, Index window_start, Index horizon) const {
    if (window_start >= horizon) throw std::invalid_argument("density_floor: window_start must be < horizon");
    const std::vector<Index> m = members(key, horizon);
    const Index first = std::max<Index>(window_start, 1);
    double best = 1.0;
    std::size_t count = 0;
    std::size_t idx = 0;
    for (Index n = 1; n <= horizon; ++n) {
        while (idx < m.size() && m[idx] <= n) {
            ++count;
            ++idx;
        }
        if (n >= first) best = std::min(best, static_cast<double>(count) / static_cast<double>(n));
    }
    return best;
}

double PartitionSchedule::analytic_density(const PairKey& key) const {
    const RankedPair& rp = lookup(key);
    // Block t has rank j with frequency 2^-j; ranks above J become fillers
    // with total frequency 2^-J.
    double mean_length = 0.0;
    double weight = 0.5;
    for (const auto& r : ranked_) {
        mean_length += weight * static_cast<double>(r.block_length);
        weight *= 0.5;
    }
    mean_length += 2.0 * weight;  // filler frequency 2^-J times length 1
    return 2.0 * std::ldexp(1.0, -rp.rank) / mean_length;
}

std::vector<std::pair<Index, PairKey>> PartitionSchedule::all_members(Index horizon) const {
    std::vector<std::pair<Index, PairKey>> out;
    if (horizon < 1) return out;
    extend_to(horizon);
    std::lock_guard lock(blocks_->mutex);
    for (const Block& b : blocks_->blocks) {
        if (b.start > horizon) break;
        if (b.rank == 0) continue;
        const PairKey& key = ranked_[b.rank - 1].key;
        for (Index n : {b.start + key.nu, b.start + 3 * key.nu}) {
            if (n <= horizon) out.emplace_back(n, key);
        }
    }
    return out;
}

PartitionSchedule build_schedule(const std::vector<PairKey>& pairs) { return PartitionSchedule(pairs); }

std::vector<Index> members(const PartitionSchedule& sched, const PairKey& key, Index horizon) {
    return sched.members(key, horizon);
}

std::optional<PairKey> locate(const PartitionSchedule& sched, Index n) { return sched.locate(n); }

double density_floor(const PartitionSchedule& sched, const PairKey& key, Index window_start, Index horizon) {
    return sched.density_floor(key, window_start, horizon);
}

void write_members_csv(std::ostream& out, const PartitionSchedule& sched, Index horizon) {
    out << "n,l,nu\n";
    for (const auto& [n, key] : sched.all_members(horizon)) {
        out << n << ',' << key.l << ',' << key.nu << '\n';
    }
}

}  // namespace fhc
