#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ombb/distinguishing.hpp"
#include "ombb/operators.hpp"
#include "ombb/oracle.hpp"
#include "ombb/rng.hpp"

namespace ombb {

enum class Mode { kDesk, kPaper };

/// Run geometry. The classic ("paper") layout pins m = kappa + 2 and
/// t = ceil(3.5*ell / log2 ell); its storage bound t*(kappa+1) <= 2^m only
/// holds from kappa = 7 upward. Desk mode keeps all structural invariants
/// but gives the storage one extra level when n affords it (m = kappa + 3),
/// which is exactly the slack needed for the canonical sequences
/// (t = ell + 1, and ell' + 1 for the remainder block) to fit at small kappa.
struct Parameters {
    int n = 0;
    int kappa = 0;
    Mode mode = Mode::kDesk;
    int m = 0;
    int t = 0;
    std::uint64_t seed = 0;
    bool strict = true;

    int ell() const { return 1 << kappa; }
    int storage_size() const { return 1 << m; }
    /// Maximum sequence length the storage can hold.
    int sequence_capacity() const { return storage_size() / (kappa + 1); }
    int last_block_len() const { return n % ell(); }
    /// Sequence length used for the remainder block; 0 when ell divides n.
    int last_t() const;

    static Parameters make(int n, int kappa, Mode mode, std::uint64_t seed,
                           std::optional<int> m_override = std::nullopt,
                           std::optional<int> t_override = std::nullopt);
    void validate() const;

    FrameConfig frame_config() const { return FrameConfig{n, ell(), m}; }
};

/// (m+1) storage levels + y^B + t probes + t stores + chooseConsistent +
/// y-update; equals kappa + 2t + 6 when m = kappa + 2.
std::uint64_t per_block_queries(int m, int t);

struct QueryBound {
    std::uint64_t per_block_full = 0;
    std::uint64_t per_block_last = 0;  // 0 when ell divides n
    std::uint64_t total = 0;
};

/// Exact prediction: full and remainder blocks costed separately, plus the
/// two initial queries. Assumes one repeat iteration per block, which
/// verified sequences guarantee.
QueryBound query_bound(const Parameters& p);

/// The uniform ceil(n/ell)-blocks costing; an upper bound on the exact one.
std::uint64_t paper_total_bound(const Parameters& p);

struct BlockReport {
    int index = 0;
    int block_len = 0;
    std::uint64_t queries = 0;
    int repeat_iterations = 0;
    bool feasible_empty = false;
};

struct RunReport {
    std::uint64_t total_queries = 0;
    std::optional<std::uint64_t> first_hit;
    bool success = false;
    int max_arity = 0;
    std::uint64_t predicted_total = 0;  // 0 for algorithms without a prediction
    std::uint64_t repeat_iterations = 0;
    bool anomaly = false;  // empty feasible set seen, or repeat cap hit
    std::vector<BlockReport> blocks;
};

/// Verified sequences for both block lengths that occur in a run.
struct SequenceSet {
    DistinguishingSequence full;
    std::optional<DistinguishingSequence> last;
};

/// Called after every completed block with the updated (x, y); lets tests
/// check the optimized-positions invariant against the hidden target.
using BlockHook =
    std::function<void(const BitString& x, const BitString& y, int block)>;

/// Block-wise optimization with the in-string storage encoding. Runs every
/// block to completion (the final y-update of the last block is issued even
/// though the optimum has just been queried), so with verified sequences the
/// total equals query_bound(p).total exactly.
RunReport run_algorithm3(const Parameters& p, Oracle& oracle,
                         const SequenceSet& sequences, Rng& rng,
                         const BlockHook& hook = {});

/// t per round for the random-sampling baseline:
/// ceil((1 + 4 log log n / log n) * 2n / log n), logs base 2.
int sampling_t(int n);

/// Random sampling baseline: t uniform queries, then one consistent guess,
/// repeated until the guess is optimal. Exact feasible-set pruning; hard
/// n <= 24 budget.
RunReport run_random_sampling(const Parameters& p, Oracle& oracle, Rng& rng);

/// Unary baseline: single-bit-flip hill climber accepting non-worsening
/// moves.
RunReport run_rls(const Parameters& p, Oracle& oracle, Rng& rng);

/// Largest distinct-parent count any operator used during the run.
int audit_arity(const RunReport& report);

/// m + 5: the chooseConsistent arity; kappa + 7 in the classic layout.
int predicted_max_arity(const Parameters& p);

}  // namespace ombb
