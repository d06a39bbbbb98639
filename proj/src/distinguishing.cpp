#include "ombb/distinguishing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "ombb/errors.hpp"

namespace ombb {

namespace {

void check_budget(int ell, int limit, const char* what) {
    if (ell < 1) throw InputError("ell must be positive");
    if (ell > limit) {
        throw BudgetError(std::string(what) + ": ell=" + std::to_string(ell) +
                          " exceeds enumeration limit " + std::to_string(limit));
    }
}

void check_uniform_length(const std::vector<BitString>& seq, int ell) {
    for (const auto& s : seq) {
        if (s.length() != ell) {
            throw InputError("sequence string length differs from ell");
        }
    }
}

BitString nth_string(std::uint64_t v, int ell) {
    // Enumeration order: v's bit (j-1) is position j. Order is irrelevant to
    // callers; it just has to cover all 2^ell strings once.
    BitString b(ell);
    for (int j = 1; j <= ell; ++j) {
        if ((v >> (j - 1)) & 1u) b.set(j, true);
    }
    return b;
}

std::uint64_t fingerprint_key(const Fingerprint& fp) {
    std::uint64_t h = 0x2545f4914f6cdd1dULL;
    for (int v : fp) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL +
             (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdULL;
    }
    return h;
}

}  // namespace

Fingerprint fingerprint(const BitString& z, const std::vector<BitString>& seq) {
    Fingerprint fp;
    fp.reserve(seq.size());
    for (const auto& s : seq) fp.push_back(onemax(s, z));
    return fp;
}

std::vector<BitString> feasible_set(const Fingerprint& fp,
                                    const std::vector<BitString>& seq,
                                    int ell, int limit) {
    check_budget(ell, limit, "feasible_set");
    check_uniform_length(seq, ell);
    if (fp.size() != seq.size()) {
        throw InputError("fingerprint length differs from sequence length");
    }
    std::vector<BitString> result;
    const std::uint64_t total = 1ULL << ell;
    for (std::uint64_t v = 0; v < total; ++v) {
        BitString y = nth_string(v, ell);
        bool ok = true;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (onemax(seq[i], y) != fp[i]) {
                ok = false;
                break;
            }
        }
        if (ok) result.push_back(std::move(y));
    }
    return result;
}

bool is_distinguishing(const DistinguishingSequence& seq, int limit) {
    check_budget(seq.ell, limit, "is_distinguishing");
    check_uniform_length(seq.strings, seq.ell);
    const std::uint64_t total = 1ULL << seq.ell;

    // Injectivity via hashed fingerprints; hash ties are re-checked exactly
    // so a collision of the mixer cannot produce a wrong verdict.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> keys;  // (hash, z)
    keys.reserve(total);
    for (std::uint64_t v = 0; v < total; ++v) {
        keys.emplace_back(fingerprint_key(fingerprint(nth_string(v, seq.ell),
                                                      seq.strings)),
                          v);
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if (keys[i].first != keys[i - 1].first) continue;
        const Fingerprint a =
            fingerprint(nth_string(keys[i - 1].second, seq.ell), seq.strings);
        const Fingerprint b =
            fingerprint(nth_string(keys[i].second, seq.ell), seq.strings);
        if (a == b) return false;
    }
    return true;
}

DistinguishingSequence canonical_sequence(int ell, int limit) {
    if (ell < 1) throw InputError("ell must be positive");
    DistinguishingSequence seq;
    seq.ell = ell;
    seq.strings.push_back(BitString::zeros(ell));
    for (int j = 1; j <= ell; ++j) {
        seq.strings.push_back(BitString::unit(ell, j));
    }
    seq.verified = ell <= limit ? is_distinguishing(seq, limit) : true;
    return seq;
}

DistinguishingSequence compact_sequence(int ell, int limit) {
    if (ell < 1) throw InputError("ell must be positive");
    DistinguishingSequence seq;
    seq.ell = ell;
    seq.strings.push_back(BitString::zeros(ell));
    for (int j = 1; j <= ell - 1; ++j) {
        seq.strings.push_back(BitString::unit(ell, j));
    }
    seq.verified = ell <= limit ? is_distinguishing(seq, limit) : true;
    return seq;
}

std::optional<DistinguishingSequence> find_sequence(int ell, int t,
                                                    int attempts, Rng& rng,
                                                    int limit) {
    check_budget(ell, limit, "find_sequence");
    if (t < 1) throw InputError("t must be positive");
    for (int a = 0; a < attempts; ++a) {
        DistinguishingSequence cand;
        cand.ell = ell;
        cand.strings.reserve(static_cast<std::size_t>(t));
        for (int i = 0; i < t; ++i) {
            cand.strings.push_back(BitString::random(ell, rng));
        }
        if (is_distinguishing(cand, limit)) {
            cand.verified = true;
            return cand;
        }
    }
    return std::nullopt;
}

DistinguishingSequence transform_sequence(const DistinguishingSequence& seq,
                                          const BitString& shift,
                                          const std::vector<int>& perm,
                                          int limit) {
    if (!seq.verified) throw InputError("transform_sequence needs a verified input");
    if (shift.length() != seq.ell ||
        static_cast<int>(perm.size()) != seq.ell) {
        throw InputError("transform dimensions differ from ell");
    }
    const Automorphism alpha{perm, shift};
    DistinguishingSequence out;
    out.ell = seq.ell;
    out.strings.reserve(seq.strings.size());
    for (const auto& r : seq.strings) out.strings.push_back(alpha.apply(r));
    out.verified = seq.ell <= limit ? is_distinguishing(out, limit) : true;
    return out;
}

int paper_t(int ell) {
    if (ell < 2) throw InputError("paper_t requires ell >= 2");
    const double v = 3.5 * ell / std::log2(static_cast<double>(ell));
    return static_cast<int>(std::ceil(v - 1e-9));
}

void save_sequence(const std::filesystem::path& path,
                   const DistinguishingSequence& seq) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw InputError("cannot write sequence file " + tmp.string());
        out << seq.ell << ' ' << seq.t() << ' ' << (seq.verified ? 1 : 0) << '\n';
        for (const auto& s : seq.strings) out << s.str() << '\n';
    }
    std::filesystem::rename(tmp, path);
}

DistinguishingSequence load_sequence(const std::filesystem::path& path,
                                     int limit) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open sequence file " + path.string());
    int ell = 0, t = 0, flag = 0;
    {
        std::string header;
        if (!std::getline(in, header)) {
            throw InputError("sequence file missing header: " + path.string());
        }
        std::istringstream hs(header);
        if (!(hs >> ell >> t >> flag) || ell < 1 || t < 0 ||
            (flag != 0 && flag != 1)) {
            throw InputError("malformed sequence header: " + path.string());
        }
    }
    DistinguishingSequence seq;
    seq.ell = ell;
    for (int i = 0; i < t; ++i) {
        std::string line;
        if (!std::getline(in, line)) {
            throw InputError("sequence file truncated: " + path.string());
        }
        BitString s = BitString::parse(line);
        if (s.length() != ell) {
            throw InputError("sequence string width differs from header: " +
                             path.string());
        }
        seq.strings.push_back(std::move(s));
    }
    seq.verified = flag == 1;
    if (seq.verified && ell <= limit && !is_distinguishing(seq, limit)) {
        throw InputError("sequence file claims verified but fails re-check: " +
                         path.string());
    }
    return seq;
}

}  // namespace ombb
