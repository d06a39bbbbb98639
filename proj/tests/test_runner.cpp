#include <doctest.h>

#include <cmath>

#include "ombb/errors.hpp"
#include "ombb/runner.hpp"

using namespace ombb;

namespace {

DistinguishingSequence sequence_with_length(int ell, int t) {
    if (t == ell + 1) return canonical_sequence(ell);
    if (t == ell) return compact_sequence(ell);
    throw ConfigError("test helper only builds t = ell or ell + 1");
}

SequenceSet sequences_for(const Parameters& p) {
    SequenceSet s;
    s.full = sequence_with_length(p.ell(), p.t);
    if (p.last_block_len() != 0) {
        s.last = sequence_with_length(p.last_block_len(), p.last_t());
    }
    return s;
}

}  // namespace

TEST_CASE("per-block count matches the closed form for the classic layout") {
    // m = kappa + 2 must reproduce kappa + 2t + 6
    for (int kappa = 1; kappa <= 10; ++kappa) {
        const int t = paper_t(1 << kappa);
        CHECK(per_block_queries(kappa + 2, t) ==
              static_cast<std::uint64_t>(kappa + 2 * t + 6));
    }
    CHECK(paper_t(128) == 64);
    CHECK(per_block_queries(9, 64) == 141);  // kappa = 7
}

TEST_CASE("desk defaults and the pinned 154 total") {
    const Parameters p = Parameters::make(32, 2, Mode::kDesk, 1);
    CHECK(p.ell() == 4);
    CHECK(p.m == 5);  // one spare storage level at kappa=2
    CHECK(p.t == 5);  // canonical
    const QueryBound bound = query_bound(p);
    CHECK(bound.per_block_full == 19);
    CHECK(bound.total == 154);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(Parameters::make(32, 0, Mode::kDesk, 1), ConfigError);
    // t = 0 rejected
    CHECK_THROWS_AS(Parameters::make(32, 2, Mode::kDesk, 1, std::nullopt, 0),
                    ConfigError);
    // storage bound: t too large for m
    CHECK_THROWS_AS(Parameters::make(32, 2, Mode::kDesk, 1, 4, 9), ConfigError);
    // paper mode below kappa 7 violates the storage bound
    CHECK_THROWS_AS(Parameters::make(1024, 3, Mode::kPaper, 1), ConfigError);
    // paper mode pins m
    CHECK_THROWS_AS(Parameters::make(1024, 7, Mode::kPaper, 1, 10), ConfigError);
    // kappa = 7 paper parameters are arithmetically valid given enough n
    const Parameters paper = Parameters::make(512, 7, Mode::kPaper, 1);
    CHECK(paper.m == 9);
    CHECK(paper.t == 64);
    CHECK(query_bound(paper).per_block_full == 141);
    // n too small for any storage
    CHECK_THROWS_AS(Parameters::make(8, 2, Mode::kDesk, 1), ConfigError);
}

TEST_CASE("algorithm 3 is exact, correct, and deterministic at (32, 2)") {
    const Parameters p = Parameters::make(32, 2, Mode::kDesk, 99);
    const SequenceSet seqs = sequences_for(p);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Oracle oracle = Oracle::with_random_target(32, 7000 + seed);
        const BitString& z = WhiteBox::target(oracle);
        Rng rng(seed);
        int blocks_seen = 0;
        const RunReport report = run_algorithm3(
            p, oracle, seqs, rng, [&](const BitString& x, const BitString& y, int) {
                ++blocks_seen;
                for (int j = 1; j <= 32; ++j) {
                    if (x.get(j) == y.get(j)) CHECK(x.get(j) == z.get(j));
                }
            });
        CHECK(report.success);
        CHECK_FALSE(report.anomaly);
        CHECK(report.total_queries == 154);
        CHECK(report.predicted_total == 154);
        CHECK(blocks_seen == 8);
        CHECK(report.repeat_iterations == 8);  // one per block
        CHECK(*report.first_hit <= report.total_queries);
        // the final query is an optimum
        const QueryLedger ledger = oracle.report();
        CHECK(ledger.history.back().second == 32);
    }
    // byte-for-byte determinism in the report
    Oracle o1 = Oracle::with_random_target(32, 5);
    Oracle o2 = Oracle::with_random_target(32, 5);
    Rng r1(5), r2(5);
    const RunReport a = run_algorithm3(p, o1, seqs, r1);
    const RunReport b = run_algorithm3(p, o2, seqs, r2);
    CHECK(a.total_queries == b.total_queries);
    CHECK(a.first_hit == b.first_hit);
    CHECK(a.max_arity == b.max_arity);
    CHECK(a.repeat_iterations == b.repeat_iterations);
}

TEST_CASE("exact totals across the (n, kappa) grid") {
    for (int kappa : {1, 2, 3}) {
        for (int n : {32, 64, 128, 256}) {
            const Parameters p = Parameters::make(n, kappa, Mode::kDesk, 1);
            const SequenceSet seqs = sequences_for(p);
            const QueryBound bound = query_bound(p);
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                Oracle oracle = Oracle::with_random_target(
                    n, seed * 31 + static_cast<std::uint64_t>(n), HistoryRetention::kCountOnly);
                Rng rng(seed);
                const RunReport report = run_algorithm3(p, oracle, seqs, rng);
                CHECK(report.success);
                CHECK(report.total_queries == bound.total);
                CHECK(report.total_queries <= paper_total_bound(p));
                CHECK(report.max_arity == p.m + 5);
            }
        }
    }
}

TEST_CASE("remainder blocks get their own exact accounting") {
    const Parameters p = Parameters::make(38, 2, Mode::kDesk, 1);
    CHECK(p.last_block_len() == 2);
    CHECK(p.last_t() == 3);
    const QueryBound bound = query_bound(p);
    CHECK(bound.per_block_full == 19);
    CHECK(bound.per_block_last == 15);
    CHECK(bound.total == 2 + 9 * 19 + 15);
    const SequenceSet seqs = sequences_for(p);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Oracle oracle = Oracle::with_random_target(38, 400 + seed);
        Rng rng(seed);
        const RunReport report = run_algorithm3(p, oracle, seqs, rng);
        CHECK(report.success);
        CHECK(report.total_queries == bound.total);
        CHECK(paper_total_bound(p) >= report.total_queries);
    }
}

TEST_CASE("kappa=3 at n=32 uses the compact sequence") {
    const Parameters p = Parameters::make(32, 3, Mode::kDesk, 1);
    CHECK(p.m == 5);
    CHECK(p.t == 8);  // canonical t=9 would not fit 2^5 addresses
    const SequenceSet seqs = sequences_for(p);
    const QueryBound bound = query_bound(p);
    CHECK(bound.total == 2 + 4 * 25);
    Oracle oracle = Oracle::with_random_target(32, 8);
    Rng rng(8);
    const RunReport report = run_algorithm3(p, oracle, seqs, rng);
    CHECK(report.success);
    CHECK(report.total_queries == bound.total);
}

TEST_CASE("linear scaling at fixed kappa") {
    std::vector<std::uint64_t> totals;
    for (int n : {128, 256, 512, 1024}) {
        const Parameters p = Parameters::make(n, 3, Mode::kDesk, 1);
        totals.push_back(query_bound(p).total);
    }
    for (std::size_t i = 0; i + 1 < totals.size(); ++i) {
        const double ratio = static_cast<double>(totals[i + 1]) /
                             static_cast<double>(totals[i]);
        CHECK(ratio > 1.9);
        CHECK(ratio < 2.1);
    }
}

TEST_CASE("rls baseline") {
    // n = 1: at most two queries
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Parameters p;
        p.n = 1;
        Oracle oracle = Oracle::with_random_target(1, seed);
        Rng rng(seed);
        const RunReport report = run_rls(p, oracle, rng);
        CHECK(report.success);
        CHECK(report.total_queries <= 2);
        CHECK(report.max_arity <= 1);
    }
    // n = 64: loose empirical band on the mean
    double sum = 0;
    const int seeds = 200;
    for (int seed = 0; seed < seeds; ++seed) {
        Parameters p;
        p.n = 64;
        Oracle oracle = Oracle::with_random_target(64, 9000 + static_cast<std::uint64_t>(seed),
                                                   HistoryRetention::kCountOnly);
        Rng rng(static_cast<std::uint64_t>(seed));
        const RunReport report = run_rls(p, oracle, rng);
        CHECK(report.success);
        CHECK(report.max_arity == 1);
        CHECK(*report.first_hit == report.total_queries);
        sum += static_cast<double>(report.total_queries);
    }
    const double mean = sum / seeds;
    CHECK(mean >= 64.0);
    CHECK(mean <= 10.0 * 64.0 * std::log(64.0));
}

TEST_CASE("random sampling baseline at n=16") {
    const int t = sampling_t(16);
    CHECK(t == 24);  // ceil((1 + 4*2/4) * 32/4)
    double sum = 0;
    int single_round = 0;
    const int seeds = 200;
    for (int seed = 0; seed < seeds; ++seed) {
        Parameters p;
        p.n = 16;
        Oracle oracle = Oracle::with_random_target(16, 100 + static_cast<std::uint64_t>(seed),
                                                   HistoryRetention::kCountOnly);
        Rng rng(static_cast<std::uint64_t>(seed));
        const RunReport report = run_random_sampling(p, oracle, rng);
        CHECK(report.success);
        sum += static_cast<double>(report.total_queries);
        if (report.repeat_iterations == 1) ++single_round;
    }
    const double mean = sum / seeds;
    CHECK(mean <= 3.0 * (t + 1));
    MESSAGE("sampling single-round success: ", single_round, "/", seeds,
            ", mean queries ", mean);
    // budget guard
    Parameters big;
    big.n = 25;
    Oracle oracle = Oracle::with_random_target(25, 1);
    Rng rng(1);
    CHECK_THROWS_AS(run_random_sampling(big, oracle, rng), BudgetError);
}

TEST_CASE("arity audit") {
    // desk run with explicit m=4 at kappa=2 records max arity 9
    {
        const Parameters p = Parameters::make(32, 2, Mode::kDesk, 1, 4);
        CHECK(p.m == 4);
        const SequenceSet seqs = sequences_for(p);
        Oracle oracle = Oracle::with_random_target(32, 3);
        Rng rng(3);
        const RunReport report = run_algorithm3(p, oracle, seqs, rng);
        CHECK(audit_arity(report) == 9);
        CHECK(predicted_max_arity(p) == 9);
    }
    // paper-layout arithmetic: kappa + 7
    for (int kappa = 7; kappa <= 10; ++kappa) {
        const Parameters p =
            Parameters::make(1 << (kappa + 2), kappa, Mode::kPaper, 1);
        CHECK(predicted_max_arity(p) == kappa + 7);
    }
    // rls is unary (oracle and run seeds deliberately decoupled)
    Parameters p;
    p.n = 16;
    Oracle oracle = Oracle::with_random_target(16, 400);
    Rng rng(4);
    CHECK(audit_arity(run_rls(p, oracle, rng)) == 1);
}

TEST_CASE("sequence mismatches are rejected") {
    const Parameters p = Parameters::make(32, 2, Mode::kDesk, 1);
    SequenceSet wrong;
    wrong.full = canonical_sequence(8);
    Oracle oracle = Oracle::with_random_target(32, 1);
    Rng rng(1);
    CHECK_THROWS_AS(run_algorithm3(p, oracle, wrong, rng), ConfigError);
}
