#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ombb/bitstring.hpp"
#include "ombb/rng.hpp"

namespace ombb {

enum class HistoryRetention { kFull, kCountOnly };

/// Immutable snapshot of an oracle's bookkeeping.
struct QueryLedger {
    std::uint64_t count = 0;
    std::optional<std::uint64_t> first_hit;  // 1-based query index
    /// Present only under full retention: (query string, fitness) in order.
    std::vector<std::pair<BitString, int>> history;
};

/// Black-box OneMax fitness oracle hiding a target z. Counts queries and
/// records the first query that hits fitness n. One instance belongs to one
/// run; distinct instances may be used concurrently.
class Oracle {
public:
    explicit Oracle(BitString target,
                    HistoryRetention retention = HistoryRetention::kFull);

    /// Target drawn uniformly from the seed; same seed, same target.
    static Oracle with_random_target(
        int n, std::uint64_t seed,
        HistoryRetention retention = HistoryRetention::kFull);

    int length() const { return target_.length(); }

    /// Returns OM_z(x) and advances the ledger. Never refuses a query.
    int query(const BitString& x);

    QueryLedger report() const;

    std::uint64_t count() const { return count_; }
    std::optional<std::uint64_t> first_hit() const { return first_hit_; }

private:
    friend struct WhiteBox;

    BitString target_;
    HistoryRetention retention_;
    std::uint64_t count_ = 0;
    std::optional<std::uint64_t> first_hit_;
    std::vector<std::pair<BitString, int>> history_;
};

/// White-box access to the hidden target, quarantined so that algorithm code
/// cannot casually reach it. Tests and the runner's success checker only.
struct WhiteBox {
    static const BitString& target(const Oracle& oracle) {
        return oracle.target_;
    }
};

}  // namespace ombb
