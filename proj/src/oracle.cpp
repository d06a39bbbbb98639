#include "ombb/oracle.hpp"

namespace ombb {

Oracle::Oracle(BitString target, HistoryRetention retention)
    : target_(std::move(target)), retention_(retention) {}

Oracle Oracle::with_random_target(int n, std::uint64_t seed,
                                  HistoryRetention retention) {
    Rng rng(seed);
    return Oracle(BitString::random(n, rng), retention);
}

int Oracle::query(const BitString& x) {
    const int fitness = onemax(x, target_);
    ++count_;
    if (fitness == target_.length() && !first_hit_) first_hit_ = count_;
    if (retention_ == HistoryRetention::kFull) {
        history_.emplace_back(x, fitness);
    }
    return fitness;
}

QueryLedger Oracle::report() const {
    return QueryLedger{count_, first_hit_, history_};
}

}  // namespace ombb
