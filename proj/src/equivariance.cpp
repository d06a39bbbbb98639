#include "ombb/equivariance.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ombb/distinguishing.hpp"
#include "ombb/errors.hpp"
#include "ombb/operators.hpp"
#include "ombb/oracle.hpp"

namespace ombb {

namespace {

std::vector<BitString> transform_all(const Automorphism& alpha,
                                     const std::vector<BitString>& inputs) {
    std::vector<BitString> out;
    out.reserve(inputs.size());
    for (const auto& b : inputs) out.push_back(alpha.apply(b));
    return out;
}

std::string describe(const Automorphism& alpha) {
    std::ostringstream os;
    os << "perm=[";
    for (std::size_t i = 0; i < alpha.perm.size(); ++i) {
        if (i) os << ',';
        os << alpha.perm[i];
    }
    os << "] shift=" << alpha.shift.str();
    return os.str();
}

bool check_one_deterministic(const DeterministicOp& op,
                             const std::vector<BitString>& inputs,
                             const Automorphism& alpha, std::string* detail) {
    const BitString expected = alpha.apply(op(inputs));
    const BitString actual = op(transform_all(alpha, inputs));
    if (expected == actual) return true;
    *detail = "counterexample " + describe(alpha) + ": expected " +
              expected.str() + ", got " + actual.str();
    return false;
}

bool check_one_support(const SupportFn& support,
                       const std::vector<BitString>& inputs,
                       const std::vector<BitString>& base_support,
                       const Automorphism& alpha, std::string* detail) {
    std::vector<BitString> expected;
    expected.reserve(base_support.size());
    for (const auto& b : base_support) expected.push_back(alpha.apply(b));
    std::sort(expected.begin(), expected.end());
    std::vector<BitString> actual = support(transform_all(alpha, inputs));
    std::sort(actual.begin(), actual.end());
    if (expected == actual) return true;
    *detail = "support mismatch under " + describe(alpha) + ": |expected|=" +
              std::to_string(expected.size()) + ", |actual|=" +
              std::to_string(actual.size());
    return false;
}

std::vector<Automorphism> sampled_automorphisms(int n, int trials, Rng& rng) {
    std::vector<Automorphism> out;
    out.reserve(static_cast<std::size_t>(trials) + 1);
    out.push_back(Automorphism::identity(n));
    for (int i = 0; i < trials; ++i) out.push_back(Automorphism::random(n, rng));
    return out;
}

/// All length-n strings; the support of the fallback branches and of the
/// 0-ary uniform sampler.
std::vector<BitString> full_space(int n) {
    std::vector<BitString> all;
    all.reserve(1u << n);
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
        BitString b(n);
        for (int j = 1; j <= n; ++j) {
            if ((v >> (j - 1)) & 1u) b.set(j, true);
        }
        all.push_back(std::move(b));
    }
    return all;
}

}  // namespace

void for_each_automorphism(int n,
                           const std::function<bool(const Automorphism&)>& visit) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 1);
    do {
        for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
            Automorphism alpha{perm, BitString(n)};
            for (int j = 1; j <= n; ++j) {
                if ((v >> (j - 1)) & 1u) alpha.shift.set(j, true);
            }
            if (!visit(alpha)) return;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
}

EquivarianceReport check_deterministic_exhaustive(
    const std::string& name, const DeterministicOp& op,
    const std::vector<BitString>& inputs) {
    EquivarianceReport report;
    report.op_name = name;
    const int n = inputs.at(0).length();
    if (n > 8) {
        throw BudgetError("exhaustive automorphism check: shrink n to <= 8");
    }
    for_each_automorphism(n, [&](const Automorphism& alpha) {
        ++report.checks;
        if (!check_one_deterministic(op, inputs, alpha, &report.failure_detail)) {
            report.passed = false;
            return false;
        }
        return true;
    });
    return report;
}

EquivarianceReport check_deterministic_sampled(const std::string& name,
                                               const DeterministicOp& op,
                                               const std::vector<BitString>& inputs,
                                               int trials, Rng& rng) {
    EquivarianceReport report;
    report.op_name = name;
    const int n = inputs.at(0).length();
    for (const auto& alpha : sampled_automorphisms(n, trials, rng)) {
        ++report.checks;
        if (!check_one_deterministic(op, inputs, alpha, &report.failure_detail)) {
            report.passed = false;
            break;
        }
    }
    return report;
}

EquivarianceReport check_support_sampled(const std::string& name,
                                         const SupportFn& support,
                                         const std::vector<BitString>& inputs,
                                         int trials, Rng& rng) {
    EquivarianceReport report;
    report.op_name = name;
    const int n = inputs.at(0).length();
    if (n > 16) {
        throw BudgetError("support enumeration check: shrink n to <= 16");
    }
    const std::vector<BitString> base = support(inputs);
    for (const auto& alpha : sampled_automorphisms(n, trials, rng)) {
        ++report.checks;
        if (!check_one_support(support, inputs, base, alpha,
                               &report.failure_detail)) {
            report.passed = false;
            break;
        }
    }
    return report;
}

namespace {

/// Honest end-of-block state for the chooseConsistent check: a valid frame
/// plus y^B and a storage string s that really carries the block fitness
/// values of a hidden target.
struct BlockFixture {
    StorageFrame frame;
    SigmaMap sigma;
    BitString y_b;
    BitString s;
    DistinguishingSequence seq;
    int fitness_x;
    int fitness_y_b;
};

BlockFixture make_block_fixture(int n, int m, int ell, Rng& rng) {
    const FrameConfig cfg{n, ell, m};
    const BitString z = BitString::random(n, rng);
    const BitString x = BitString::random(n, rng);
    const BitString y = x.complemented();
    StorageFrame frame = StorageFrame::create(x, y, cfg, rng);
    SigmaMap sigma = SigmaMap::build(frame);
    BitString y_b = make_block_reference(frame, sigma);
    const int kappa = cfg.kappa();
    DistinguishingSequence seq = canonical_sequence(frame.block_len);

    const int fitness_x = onemax(x, z);
    const int fitness_y_b = onemax(y_b, z);
    const int offset = (fitness_x + fitness_y_b - frame.block_len) / 2;
    BitString s = x;
    for (int i = 1; i <= seq.t(); ++i) {
        const BitString probe =
            write_bits(WriteRequest::block_probe(seq.strings[static_cast<std::size_t>(i - 1)],
                                                 frame.block_len),
                       x, frame, sigma, FaultPolicy::kStrict, rng);
        const int delta = onemax(probe, z) - offset;
        s = write_bits(WriteRequest::delta_record(static_cast<std::uint64_t>(delta), i, kappa),
                       s, frame, sigma, FaultPolicy::kStrict, rng);
    }
    return BlockFixture{std::move(frame), std::move(sigma), std::move(y_b),
                        std::move(s),     std::move(seq),   fitness_x,
                        fitness_y_b};
}

/// Rebuilds frame structures from a flat input vector
/// [x, y, y^0..y^m]; the geometry is a fixed operator parameter.
StorageFrame frame_from_inputs(const std::vector<BitString>& inputs,
                               const FrameConfig& cfg) {
    StorageFrame frame{inputs.at(0), inputs.at(1), cfg, {}, 0};
    const int d_xy = frame.x.hamming_distance(frame.y);
    frame.block_len = std::min(cfg.ell, d_xy);
    for (std::size_t i = 2; i < inputs.size(); ++i) {
        frame.levels.push_back(inputs[i]);
    }
    return frame;
}

std::vector<BitString> flatten_frame(const StorageFrame& frame) {
    std::vector<BitString> flat{frame.x, frame.y};
    for (const auto& level : frame.levels) flat.push_back(level);
    return flat;
}

}  // namespace

std::vector<EquivarianceReport> standard_equivariance_suite(Rng& rng,
                                                            int sampled_trials) {
    std::vector<EquivarianceReport> reports;

    // complement: deterministic, frame-free.
    {
        const DeterministicOp op = [](const std::vector<BitString>& in) {
            return complement(in.at(0));
        };
        reports.push_back(check_deterministic_exhaustive(
            "complement", op, {BitString::random(6, rng)}));
        reports.push_back(check_deterministic_sampled(
            "complement/n10", op, {BitString::random(10, rng)}, sampled_trials, rng));
    }

    // update_y: deterministic 4-ary rule on arbitrary strings.
    {
        const DeterministicOp op = [](const std::vector<BitString>& in) {
            return update_y(in.at(0), in.at(1), in.at(2), in.at(3));
        };
        std::vector<BitString> inputs;
        for (int i = 0; i < 4; ++i) inputs.push_back(BitString::random(6, rng));
        reports.push_back(check_deterministic_exhaustive("update_y", op, inputs));
    }

    // sample_uniform: support is the whole cube.
    {
        const SupportFn support = [](const std::vector<BitString>& in) {
            return full_space(in.at(0).length());
        };
        reports.push_back(check_support_sampled(
            "sample_uniform", support, {BitString::random(6, rng)}, sampled_trials, rng));
    }

    // find_storage on the smallest geometry (m=2, ell=1) and a richer one.
    for (const auto& [n, m, ell] : {std::array<int, 3>{6, 2, 1},
                                    std::array<int, 3>{8, 3, 2}}) {
        const FrameConfig cfg{n, ell, m};
        const SupportFn support = [cfg](const std::vector<BitString>& in) {
            std::vector<BitString> out;
            for (auto& w : full_space(cfg.n)) {
                if (in_storage_support(in.at(0), in.at(1), cfg, w)) {
                    out.push_back(std::move(w));
                }
            }
            return out;
        };
        const BitString x = BitString::random(n, rng);
        BitString y = BitString::random(n, rng);
        if (x == y) y = x.complemented();
        reports.push_back(check_support_sampled(
            "find_storage/n" + std::to_string(n), support, {x, y}, sampled_trials, rng));
    }

    // refine_storage at every level of an n=8, m=3 frame. The support of an
    // invalid prefix is the whole cube (the literal fallback branch).
    {
        const FrameConfig cfg{8, 2, 3};
        const BitString x = BitString::random(8, rng);
        const BitString y = x.complemented();
        StorageFrame frame = StorageFrame::create(x, y, cfg, rng);
        for (int s = 0; s < cfg.m; ++s) {
            const SupportFn support = [cfg, s](const std::vector<BitString>& in) {
                StorageFrame f = frame_from_inputs(in, cfg);
                f.levels.erase(f.levels.begin() + s + 1, f.levels.end());
                if (f.block_len == 0 || !frame_prefix_valid(f)) {
                    return full_space(cfg.n);
                }
                std::vector<BitString> out;
                for (auto& w : full_space(cfg.n)) {
                    if (in_refine_support(f, w)) out.push_back(std::move(w));
                }
                return out;
            };
            std::vector<BitString> inputs{frame.x, frame.y};
            for (int u = 0; u <= s; ++u) {
                inputs.push_back(frame.levels[static_cast<std::size_t>(u)]);
            }
            reports.push_back(check_support_sampled(
                "refine_storage/level" + std::to_string(s + 1), support, inputs,
                sampled_trials, rng));
        }
    }

    // make_block_reference and write: deterministic on a valid frame;
    // exhaustive on the smallest frame geometry.
    {
        const FrameConfig cfg{6, 1, 2};
        const BitString x = BitString::random(6, rng);
        const BitString y = x.complemented();
        StorageFrame frame = StorageFrame::create(x, y, cfg, rng);

        const DeterministicOp block_ref_op = [cfg](const std::vector<BitString>& in) {
            StorageFrame f = frame_from_inputs(in, cfg);
            SigmaMap sigma = SigmaMap::build(f);
            return make_block_reference(f, sigma);
        };
        reports.push_back(check_deterministic_exhaustive(
            "make_block_reference", block_ref_op, flatten_frame(frame)));

        const WriteRequest req(BitString::parse("11"), {1, 3});
        const BitString w = BitString::random(6, rng);
        const DeterministicOp write_op = [cfg, req](const std::vector<BitString>& in) {
            std::vector<BitString> frame_part(in.begin(), in.end() - 1);
            StorageFrame f = frame_from_inputs(frame_part, cfg);
            SigmaMap sigma = SigmaMap::build(f);
            Rng unused(0);
            return write_bits(req, in.back(), f, sigma, FaultPolicy::kStrict, unused);
        };
        std::vector<BitString> inputs = flatten_frame(frame);
        inputs.push_back(w);
        reports.push_back(check_deterministic_exhaustive("write", write_op, inputs));
    }

    // write on a richer frame, sampled.
    {
        const FrameConfig cfg{8, 2, 3};
        const BitString x = BitString::random(8, rng);
        const BitString y = x.complemented();
        StorageFrame frame = StorageFrame::create(x, y, cfg, rng);
        const WriteRequest req(BitString::parse("101"), {2, 3, 7});
        const DeterministicOp write_op = [cfg, req](const std::vector<BitString>& in) {
            std::vector<BitString> frame_part(in.begin(), in.end() - 1);
            StorageFrame f = frame_from_inputs(frame_part, cfg);
            SigmaMap sigma = SigmaMap::build(f);
            Rng unused(0);
            return write_bits(req, in.back(), f, sigma, FaultPolicy::kStrict, unused);
        };
        std::vector<BitString> inputs = flatten_frame(frame);
        inputs.push_back(BitString::random(8, rng));
        reports.push_back(
            check_deterministic_sampled("write/n8", write_op, inputs, sampled_trials, rng));
    }

    // choose_consistent: support equality on an honest block state. The
    // support enumerator is a direct brute-force reading of the definition,
    // independent of the sampler's implementation path.
    {
        BlockFixture fx = make_block_fixture(8, 3, 2, rng);
        const FrameConfig cfg = fx.frame.cfg;
        const DistinguishingSequence seq = fx.seq;
        const SupportFn support = [cfg, seq](const std::vector<BitString>& in) {
            // inputs: [x, y, y^0..y^m, y^B, s]
            std::vector<BitString> frame_part(in.begin(), in.end() - 2);
            StorageFrame f = frame_from_inputs(frame_part, cfg);
            const BitString& y_b = in[in.size() - 2];
            const BitString& s = in[in.size() - 1];
            SigmaMap sigma = SigmaMap::build(f);
            if (!choose_consistent_inputs_valid(f, sigma, y_b, s)) {
                return full_space(cfg.n);
            }
            const int kappa = cfg.kappa();
            std::vector<int> deltas;
            for (int i = 1; i <= seq.t(); ++i) {
                deltas.push_back(decode_delta(f, sigma, s, i, kappa,
                                              FaultPolicy::kStrict));
            }
            const std::vector<int> block = sigma.block(f.block_len);
            std::vector<BitString> probes;
            Rng unused(0);
            for (const auto& r : seq.strings) {
                probes.push_back(write_bits(WriteRequest::block_probe(r, f.block_len),
                                            f.x, f, sigma, FaultPolicy::kStrict,
                                            unused));
            }
            std::vector<BitString> out;
            for (auto& w : full_space(cfg.n)) {
                bool ok = true;
                for (int j = 1; j <= cfg.n && ok; ++j) {
                    const bool in_b = std::find(block.begin(), block.end(), j) != block.end();
                    if (!in_b && w.get(j) != f.x.get(j)) ok = false;
                }
                for (std::size_t i = 0; i < probes.size() && ok; ++i) {
                    int agree_on_block = 0;
                    for (int j : block) {
                        if (probes[i].get(j) == w.get(j)) ++agree_on_block;
                    }
                    if (agree_on_block != deltas[i]) ok = false;
                }
                if (ok) out.push_back(std::move(w));
            }
            if (out.empty()) return full_space(cfg.n);
            return out;
        };
        std::vector<BitString> inputs = flatten_frame(fx.frame);
        inputs.push_back(fx.y_b);
        inputs.push_back(fx.s);
        reports.push_back(check_support_sampled("choose_consistent", support, inputs,
                                                sampled_trials, rng));
    }

    // Planted mutant: always flips position 1. Permutation invariance fails.
    {
        const DeterministicOp mutant = [](const std::vector<BitString>& in) {
            return in.at(0) ^ BitString::unit(in.at(0).length(), 1);
        };
        EquivarianceReport r = check_deterministic_exhaustive(
            "biased_flip_first(mutant)", mutant, {BitString::random(6, rng)});
        r.must_fail = true;
        reports.push_back(std::move(r));
    }

    return reports;
}

bool suite_passed(const std::vector<EquivarianceReport>& reports) {
    for (const auto& r : reports) {
        if (r.must_fail ? r.passed : !r.passed) return false;
    }
    return true;
}

std::string render_report(const EquivarianceReport& report) {
    std::ostringstream os;
    const bool ok = report.must_fail ? !report.passed : report.passed;
    os << (ok ? "PASS" : "FAIL") << "  " << report.op_name << "  checks="
       << report.checks;
    if (report.must_fail) {
        os << (report.passed ? "  (mutant was NOT caught)" : "  (mutant caught)");
    }
    if (!report.passed && !report.must_fail) {
        os << "  " << report.failure_detail;
    }
    return os.str();
}

}  // namespace ombb
