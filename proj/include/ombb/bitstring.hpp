#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ombb/rng.hpp"

namespace ombb {

/// Fixed-length binary string, the universal search-point representation.
/// Positions are 1-based everywhere in this codebase. The textual form puts
/// position 1 first: "1011" has bit 1 at position 1, bit 0 at position 2.
///
/// Length is fixed at construction. set() exists for building values; once
/// shared, treat instances as immutable (all operations return copies).
class BitString {
public:
    explicit BitString(int n);

    static BitString zeros(int n) { return BitString(n); }
    static BitString ones(int n);
    /// Unit vector e_j: single 1 at position j.
    static BitString unit(int n, int j);
    /// Parses "0101..."; rejects any other character.
    static BitString parse(std::string_view text);
    static BitString random(int n, Rng& rng);

    int length() const { return n_; }
    bool get(int j) const;      // 1-based
    void set(int j, bool v);    // 1-based
    void flip(int j);

    int count_ones() const;
    /// Number of positions where the two strings agree; n - Hamming distance.
    int agreements(const BitString& other) const;
    int hamming_distance(const BitString& other) const;

    BitString operator^(const BitString& other) const;
    BitString complemented() const;

    bool operator==(const BitString& other) const = default;
    /// Lexicographic by position; lets values key std::map / std::set.
    bool operator<(const BitString& other) const;

    std::string str() const;

    /// Word view for hashing; trailing bits beyond length are zero.
    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    int n_;
    std::vector<std::uint64_t> words_;

    void check_pos(int j) const;
};

struct BitStringHash {
    std::size_t operator()(const BitString& b) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(b.length());
        for (std::uint64_t w : b.words()) {
            h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

/// Set of distinct 1-based indices inside a universe [1..n].
/// Members are kept sorted.
class IndexSet {
public:
    IndexSet(int universe, std::vector<int> members);
    static IndexSet empty(int universe) { return IndexSet(universe, {}); }
    static IndexSet full(int universe);

    int universe() const { return universe_; }
    int size() const { return static_cast<int>(members_.size()); }
    bool contains(int j) const;
    const std::vector<int>& members() const { return members_; }

    IndexSet complement() const;
    int intersection_size(const IndexSet& other) const;

    bool operator==(const IndexSet& other) const = default;

private:
    int universe_;
    std::vector<int> members_;
};

/// Hamming-distance-preserving map alpha(x) = perm(x ^ shift), where
/// perm(u) is the string u_perm(1) ... u_perm(n).
struct Automorphism {
    std::vector<int> perm;  // 1-based image table: perm[j-1] = pi(j)
    BitString shift;

    static Automorphism identity(int n);
    static Automorphism random(int n, Rng& rng);

    int length() const { return shift.length(); }
    BitString apply(const BitString& x) const;
    Automorphism inverse() const;
};

/// OM_z(x): number of positions where x and z agree.
int onemax(const BitString& x, const BitString& z);

BitString apply_automorphism(const Automorphism& a, const BitString& x);

/// Splits [1..n] into the agreement set A and disagreement set D of x and y.
std::pair<IndexSet, IndexSet> agreement_and_disagreement(const BitString& x,
                                                         const BitString& y);

/// Binary value of w (position 1 is the most significant bit):
/// sum over j of 2^(b-j) * w_j.
std::uint64_t binary_value(const BitString& w);

/// Inverse of binary_value at the given width.
BitString binary_value_inverse(std::uint64_t v, int width);

/// Width-(kappa+1) representation of v, i.e. the width-(kappa+2)
/// representation with its leading zero dropped. Requires v < 2^(kappa+1).
BitString truncated_inverse(std::uint64_t v, int kappa);

}  // namespace ombb
