#include "ombb/runner.hpp"

#include <algorithm>
#include <cmath>

#include "ombb/errors.hpp"

namespace ombb {

namespace {

constexpr int kSamplingBudgetN = 24;

int desk_default_m(int n, int kappa) {
    if ((1LL << (kappa + 3)) <= n) return kappa + 3;
    return kappa + 2;
}

void track(int& max_arity, int arity) { max_arity = std::max(max_arity, arity); }

}  // namespace

int Parameters::last_t() const {
    const int rest = last_block_len();
    if (rest == 0) return 0;
    return std::min(rest + 1, sequence_capacity());
}

Parameters Parameters::make(int n, int kappa, Mode mode, std::uint64_t seed,
                            std::optional<int> m_override,
                            std::optional<int> t_override) {
    Parameters p;
    p.n = n;
    p.kappa = kappa;
    p.mode = mode;
    p.seed = seed;
    if (kappa < 1) throw ConfigError("kappa must be at least 1");
    if (mode == Mode::kPaper) {
        p.m = kappa + 2;
        if (m_override && *m_override != p.m) {
            throw ConfigError("paper mode pins m = kappa + 2");
        }
        p.t = t_override.value_or(paper_t(p.ell()));
    } else {
        p.m = m_override.value_or(desk_default_m(n, kappa));
        p.t = t_override.value_or(std::min(p.ell() + 1, p.sequence_capacity()));
    }
    p.validate();
    return p;
}

void Parameters::validate() const {
    if (kappa < 1) throw ConfigError("kappa must be at least 1");
    frame_config().validate();  // m >= kappa+2, 2^m <= n, ell power of two
    if (t < 1) throw ConfigError("sequence length t must be at least 1");
    if (static_cast<std::int64_t>(t) * (kappa + 1) > storage_size()) {
        throw ConfigError(
            "storage bound violated: t*(kappa+1) = " +
            std::to_string(static_cast<std::int64_t>(t) * (kappa + 1)) +
            " exceeds 2^m = " + std::to_string(storage_size()) +
            (mode == Mode::kPaper ? " (paper layout needs kappa >= 7)" : ""));
    }
    if (mode == Mode::kPaper && m != kappa + 2) {
        throw ConfigError("paper mode pins m = kappa + 2");
    }
    const int rest = last_block_len();
    if (rest != 0 &&
        static_cast<std::int64_t>(last_t()) * (kappa + 1) > storage_size()) {
        throw ConfigError("remainder block sequence does not fit the storage");
    }
}

std::uint64_t per_block_queries(int m, int t) {
    if (t < 1) throw ConfigError("t must be at least 1");
    return static_cast<std::uint64_t>(m + 1) + 1 + 2 * static_cast<std::uint64_t>(t) + 2;
}

QueryBound query_bound(const Parameters& p) {
    p.validate();
    QueryBound b;
    b.per_block_full = per_block_queries(p.m, p.t);
    const int full_blocks = p.n / p.ell();
    b.total = 2 + static_cast<std::uint64_t>(full_blocks) * b.per_block_full;
    if (p.last_block_len() != 0) {
        b.per_block_last = per_block_queries(p.m, p.last_t());
        b.total += b.per_block_last;
    }
    return b;
}

std::uint64_t paper_total_bound(const Parameters& p) {
    const std::uint64_t blocks =
        static_cast<std::uint64_t>((p.n + p.ell() - 1) / p.ell());
    return blocks * per_block_queries(p.m, p.t) + 2;
}

RunReport run_algorithm3(const Parameters& p, Oracle& oracle,
                         const SequenceSet& sequences, Rng& rng,
                         const BlockHook& hook) {
    p.validate();
    if (p.ell() > kDefaultEnumerationLimit) {
        throw BudgetError(
            "block length 2^kappa exceeds the enumeration budget (kappa <= 4 "
            "is runnable); larger kappa remains valid for query accounting");
    }
    if (oracle.length() != p.n) throw ConfigError("oracle length differs from n");
    if (sequences.full.ell != p.ell() || sequences.full.t() != p.t) {
        throw ConfigError("full-block sequence does not match the parameters");
    }
    if (p.last_block_len() != 0) {
        if (!sequences.last || sequences.last->ell != p.last_block_len() ||
            sequences.last->t() != p.last_t()) {
            throw ConfigError("remainder-block sequence missing or mismatched");
        }
    }
    const FaultPolicy policy =
        p.strict ? FaultPolicy::kStrict : FaultPolicy::kSample;
    RunReport report;
    report.predicted_total = query_bound(p).total;

    BitString x = sample_uniform(p.n, rng);
    int fitness_x = oracle.query(x);
    track(report.max_arity, kAritySampleUniform);

    BitString y = complement(x);
    oracle.query(y);
    track(report.max_arity, kArityComplement);

    const int total_blocks = (p.n + p.ell() - 1) / p.ell();
    const int kappa = p.kappa;
    bool aborted = false;

    for (int b = 1; b <= total_blocks && !aborted; ++b) {
        const std::uint64_t block_start = oracle.count();
        const int remaining = x.hamming_distance(y);
        if (remaining == 0) break;  // defensive; cannot happen mid-run

        StorageFrame frame = StorageFrame::begin(x, y, p.frame_config());
        const int block_len = frame.block_len;
        const DistinguishingSequence& seq =
            block_len == p.ell() ? sequences.full : *sequences.last;

        frame.levels.push_back(find_storage(x, y, p.frame_config(), rng));
        oracle.query(frame.levels.back());
        track(report.max_arity, kArityFindStorage);
        for (int s = 0; s < p.m; ++s) {
            frame.levels.push_back(refine_storage(frame, rng));
            oracle.query(frame.levels.back());
            track(report.max_arity, refine_arity(s));
        }
        const SigmaMap sigma = SigmaMap::build(frame);

        const BitString y_b = make_block_reference(frame, sigma);
        const int fitness_y_b = oracle.query(y_b);
        track(report.max_arity, block_reference_arity(p.frame_config(), block_len));

        // The contribution of the positions outside the block; integer for
        // honest fitness values.
        const int offset = (fitness_x + fitness_y_b - block_len) / 2;

        std::vector<int> deltas(static_cast<std::size_t>(seq.t()));
        for (int i = 1; i <= seq.t(); ++i) {
            const BitString probe = write_bits(
                WriteRequest::block_probe(seq.strings[static_cast<std::size_t>(i - 1)],
                                          block_len),
                x, frame, sigma, policy, rng);
            const int fitness_probe = oracle.query(probe);
            track(report.max_arity, write_arity(p.m));
            const int delta = fitness_probe - offset;
            if (delta < 0 || delta > block_len) {
                throw InvariantError("block fitness outside [0..block_len]");
            }
            deltas[static_cast<std::size_t>(i - 1)] = delta;
        }

        BitString s_str = x;
        for (int i = 1; i <= seq.t(); ++i) {
            s_str = write_bits(
                WriteRequest::delta_record(
                    static_cast<std::uint64_t>(deltas[static_cast<std::size_t>(i - 1)]),
                    i, kappa),
                s_str, frame, sigma, policy, rng);
            oracle.query(s_str);
            track(report.max_arity, write_arity(p.m));
        }

        BlockReport block{b, block_len, 0, 0, false};
        BitString q(p.n);
        int fitness_q = -1;
        while (true) {
            ChooseConsistentResult res = choose_consistent(
                frame, sigma, y_b, s_str, seq, fitness_x, fitness_y_b, policy, rng);
            fitness_q = oracle.query(res.q);
            track(report.max_arity, choose_consistent_arity(p.m));
            ++block.repeat_iterations;
            if (res.fallback) {
                block.feasible_empty = true;
                report.anomaly = true;
            }
            if (fitness_q - offset == block_len) {
                q = std::move(res.q);
                break;
            }
            const std::uint64_t cap =
                64ULL * static_cast<std::uint64_t>(std::max(1, res.feasible_count));
            if (static_cast<std::uint64_t>(block.repeat_iterations) >= cap) {
                report.anomaly = true;
                aborted = true;
                q = std::move(res.q);
                break;
            }
        }

        if (!aborted) {
            y = update_y(x, y, y_b, q);
            oracle.query(y);
            track(report.max_arity, kArityUpdateY);
            x = std::move(q);
            fitness_x = fitness_q;
        }

        block.queries = oracle.count() - block_start;
        report.repeat_iterations +=
            static_cast<std::uint64_t>(block.repeat_iterations);
        report.blocks.push_back(std::move(block));
        if (!aborted && hook) hook(x, y, b);
    }

    report.total_queries = oracle.count();
    report.first_hit = oracle.first_hit();
    report.success = report.first_hit.has_value();
    return report;
}

int sampling_t(int n) {
    if (n < 2) throw ConfigError("random sampling needs n >= 2");
    const double log_n = std::log2(static_cast<double>(n));
    const double factor = 1.0 + 4.0 * std::log2(log_n) / log_n;
    return static_cast<int>(std::ceil(factor * 2.0 * n / log_n - 1e-12));
}

RunReport run_random_sampling(const Parameters& p, Oracle& oracle, Rng& rng) {
    const int n = p.n;
    if (oracle.length() != n) throw ConfigError("oracle length differs from n");
    if (n > kSamplingBudgetN) {
        throw BudgetError("random sampling enumerates 2^n candidates; n <= " +
                          std::to_string(kSamplingBudgetN) + " required");
    }
    const int t = sampling_t(n);
    RunReport report;

    auto as_mask = [n](const BitString& b) {
        std::uint32_t m = 0;
        for (int j = 1; j <= n; ++j) {
            if (b.get(j)) m |= 1u << (j - 1);
        }
        return m;
    };
    auto from_mask = [n](std::uint32_t m) {
        BitString b(n);
        for (int j = 1; j <= n; ++j) {
            if ((m >> (j - 1)) & 1u) b.set(j, true);
        }
        return b;
    };

    while (true) {
        ++report.repeat_iterations;
        std::vector<std::uint32_t> queries(static_cast<std::size_t>(t));
        std::vector<int> values(static_cast<std::size_t>(t));
        for (int i = 0; i < t; ++i) {
            const BitString x = sample_uniform(n, rng);
            queries[static_cast<std::size_t>(i)] = as_mask(x);
            values[static_cast<std::size_t>(i)] = oracle.query(x);
            track(report.max_arity, kAritySampleUniform);
        }
        // Feasible targets, pruned constraint by constraint.
        std::vector<std::uint32_t> feasible;
        for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
            const auto cand = static_cast<std::uint32_t>(v);
            if (n - std::popcount(cand ^ queries[0]) == values[0]) {
                feasible.push_back(cand);
            }
        }
        for (int i = 1; i < t && !feasible.empty(); ++i) {
            std::vector<std::uint32_t> next;
            next.reserve(feasible.size());
            for (std::uint32_t cand : feasible) {
                if (n - std::popcount(cand ^ queries[static_cast<std::size_t>(i)]) ==
                    values[static_cast<std::size_t>(i)]) {
                    next.push_back(cand);
                }
            }
            feasible.swap(next);
        }
        if (feasible.empty()) {
            throw InvariantError("feasible set lost the hidden target");
        }
        const BitString guess = from_mask(
            feasible[static_cast<std::size_t>(uniform_below(rng, feasible.size()))]);
        const int fitness = oracle.query(guess);
        track(report.max_arity, t);  // chooseConsistent over the t samples
        if (fitness == n) break;
    }
    report.total_queries = oracle.count();
    report.first_hit = oracle.first_hit();
    report.success = report.first_hit.has_value();
    return report;
}

RunReport run_rls(const Parameters& p, Oracle& oracle, Rng& rng) {
    const int n = p.n;
    if (oracle.length() != n) throw ConfigError("oracle length differs from n");
    RunReport report;
    BitString x = sample_uniform(n, rng);
    int fitness = oracle.query(x);
    track(report.max_arity, kAritySampleUniform);
    while (fitness < n) {
        BitString cand = x;
        cand.flip(1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n))));
        const int f = oracle.query(cand);
        track(report.max_arity, 1);
        if (f >= fitness) {
            x = std::move(cand);
            fitness = f;
        }
    }
    report.total_queries = oracle.count();
    report.first_hit = oracle.first_hit();
    report.success = report.first_hit.has_value();
    return report;
}

int audit_arity(const RunReport& report) { return report.max_arity; }

int predicted_max_arity(const Parameters& p) {
    return choose_consistent_arity(p.m);
}

}  // namespace ombb
