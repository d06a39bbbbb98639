#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "ombb/bitstring.hpp"
#include "ombb/rng.hpp"

namespace ombb {

/// Exhaustive verification enumerates all 2^ell targets; this is the default
/// ceiling on ell for any such enumeration.
inline constexpr int kDefaultEnumerationLimit = 24;

/// A sequence of length-ell query strings. verified == true means the
/// fingerprint map over all 2^ell targets is injective: any hidden target is
/// pinned down by the fitness values of these queries alone. Sequences with
/// ell above the enumeration limit can carry verified == true only via a
/// construction argument (see canonical_sequence / compact_sequence).
struct DistinguishingSequence {
    int ell = 0;
    std::vector<BitString> strings;
    bool verified = false;

    int t() const { return static_cast<int>(strings.size()); }
};

/// Fitness values (OM_z(x^1), ..., OM_z(x^t)); each entry in [0..ell].
using Fingerprint = std::vector<int>;

Fingerprint fingerprint(const BitString& z,
                        const std::vector<BitString>& seq);

/// All y with onemax(x^i, y) = fp_i for every i. Enumerates 2^ell
/// candidates; throws BudgetError above the limit. The generating target is
/// always a member.
std::vector<BitString> feasible_set(const Fingerprint& fp,
                                    const std::vector<BitString>& seq,
                                    int ell,
                                    int limit = kDefaultEnumerationLimit);

/// True iff z -> fingerprint(z) is injective over all 2^ell targets.
/// Equivalent to the pairwise separation condition; the pairwise scan lives
/// in the tests as the independent oracle.
bool is_distinguishing(const DistinguishingSequence& seq,
                       int limit = kDefaultEnumerationLimit);

/// {0^ell, e_1, ..., e_ell}: t = ell + 1. OM_z(0^ell) yields the number of
/// zeros of z and OM_z(e_i) then yields z_i, so the sequence distinguishes
/// by construction; below the limit it is additionally re-checked
/// exhaustively.
DistinguishingSequence canonical_sequence(int ell,
                                          int limit = kDefaultEnumerationLimit);

/// {0^ell, e_1, ..., e_(ell-1)}: t = ell. The last bit is recovered from the
/// count of ones, so dropping one unit vector keeps the sequence
/// distinguishing. Useful when storage capacity caps t at ell.
DistinguishingSequence compact_sequence(int ell,
                                        int limit = kDefaultEnumerationLimit);

/// Random search: draws `attempts` candidate sequences of t i.i.d. uniform
/// strings and returns the first verified one, or nullopt.
std::optional<DistinguishingSequence> find_sequence(
    int ell, int t, int attempts, Rng& rng,
    int limit = kDefaultEnumerationLimit);

/// Maps every string r to perm(r ^ shift) and re-verifies. A verified input
/// always re-verifies (the distinguishing property is closed under
/// Hamming-automorphisms).
DistinguishingSequence transform_sequence(const DistinguishingSequence& seq,
                                          const BitString& shift,
                                          const std::vector<int>& perm,
                                          int limit = kDefaultEnumerationLimit);

/// ceil(3.5 * ell / log2(ell)); requires ell >= 2.
int paper_t(int ell);

/// Cache file: line 1 "ell t verified_flag", then one string per line.
void save_sequence(const std::filesystem::path& path,
                   const DistinguishingSequence& seq);

/// Loads and, when the flag is set and ell is within the limit, re-verifies.
/// Any mismatch is a hard error.
DistinguishingSequence load_sequence(const std::filesystem::path& path,
                                     int limit = kDefaultEnumerationLimit);

}  // namespace ombb
