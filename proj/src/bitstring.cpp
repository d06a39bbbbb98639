#include "ombb/bitstring.hpp"

#include <algorithm>
#include <bit>

#include "ombb/errors.hpp"

namespace ombb {

namespace {
constexpr int kWordBits = 64;

int word_count(int n) { return (n + kWordBits - 1) / kWordBits; }

void require_same_length(const BitString& a, const BitString& b) {
    if (a.length() != b.length()) {
        throw InputError("bit string length mismatch: " +
                         std::to_string(a.length()) + " vs " +
                         std::to_string(b.length()));
    }
}
}  // namespace

BitString::BitString(int n) : n_(n), words_(word_count(n), 0) {
    if (n < 1) throw InputError("bit string length must be positive");
}

BitString BitString::ones(int n) {
    BitString b(n);
    for (int j = 1; j <= n; ++j) b.set(j, true);
    return b;
}

BitString BitString::unit(int n, int j) {
    BitString b(n);
    b.set(j, true);
    return b;
}

BitString BitString::parse(std::string_view text) {
    BitString b(static_cast<int>(text.size()));
    for (int j = 1; j <= b.length(); ++j) {
        char c = text[static_cast<std::size_t>(j - 1)];
        if (c == '1') {
            b.set(j, true);
        } else if (c != '0') {
            throw InputError("bit string may contain only '0'/'1'");
        }
    }
    return b;
}

BitString BitString::random(int n, Rng& rng) {
    BitString b(n);
    for (auto& w : b.words_) w = rng();
    const int tail = n % kWordBits;
    if (tail != 0) b.words_.back() &= (~0ULL) >> (kWordBits - tail);
    return b;
}

void BitString::check_pos(int j) const {
    if (j < 1 || j > n_) {
        throw InputError("position " + std::to_string(j) +
                         " outside [1.." + std::to_string(n_) + "]");
    }
}

bool BitString::get(int j) const {
    check_pos(j);
    return (words_[static_cast<std::size_t>((j - 1) / kWordBits)] >>
            ((j - 1) % kWordBits)) & 1u;
}

void BitString::set(int j, bool v) {
    check_pos(j);
    const std::uint64_t mask = 1ULL << ((j - 1) % kWordBits);
    auto& w = words_[static_cast<std::size_t>((j - 1) / kWordBits)];
    if (v) {
        w |= mask;
    } else {
        w &= ~mask;
    }
}

void BitString::flip(int j) {
    check_pos(j);
    words_[static_cast<std::size_t>((j - 1) / kWordBits)] ^=
        1ULL << ((j - 1) % kWordBits);
}

int BitString::count_ones() const {
    int c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
}

int BitString::hamming_distance(const BitString& other) const {
    require_same_length(*this, other);
    int d = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        d += std::popcount(words_[i] ^ other.words_[i]);
    }
    return d;
}

int BitString::agreements(const BitString& other) const {
    return n_ - hamming_distance(other);
}

BitString BitString::operator^(const BitString& other) const {
    require_same_length(*this, other);
    BitString r(n_);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        r.words_[i] = words_[i] ^ other.words_[i];
    }
    return r;
}

BitString BitString::complemented() const {
    BitString r(n_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = ~words_[i];
    const int tail = n_ % kWordBits;
    if (tail != 0) r.words_.back() &= (~0ULL) >> (kWordBits - tail);
    return r;
}

bool BitString::operator<(const BitString& other) const {
    if (n_ != other.n_) return n_ < other.n_;
    for (int j = 1; j <= n_; ++j) {
        const bool a = get(j);
        const bool b = other.get(j);
        if (a != b) return b;  // '0' sorts before '1'
    }
    return false;
}

std::string BitString::str() const {
    std::string s;
    s.reserve(static_cast<std::size_t>(n_));
    for (int j = 1; j <= n_; ++j) s.push_back(get(j) ? '1' : '0');
    return s;
}

IndexSet::IndexSet(int universe, std::vector<int> members)
    : universe_(universe), members_(std::move(members)) {
    if (universe < 1) throw InputError("index set universe must be positive");
    std::sort(members_.begin(), members_.end());
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i] < 1 || members_[i] > universe_) {
            throw InputError("index outside universe");
        }
        if (i > 0 && members_[i] == members_[i - 1]) {
            throw InputError("duplicate index in index set");
        }
    }
}

IndexSet IndexSet::full(int universe) {
    std::vector<int> all(static_cast<std::size_t>(universe));
    for (int j = 1; j <= universe; ++j) all[static_cast<std::size_t>(j - 1)] = j;
    return IndexSet(universe, std::move(all));
}

bool IndexSet::contains(int j) const {
    return std::binary_search(members_.begin(), members_.end(), j);
}

IndexSet IndexSet::complement() const {
    std::vector<int> rest;
    rest.reserve(static_cast<std::size_t>(universe_ - size()));
    std::size_t i = 0;
    for (int j = 1; j <= universe_; ++j) {
        if (i < members_.size() && members_[i] == j) {
            ++i;
        } else {
            rest.push_back(j);
        }
    }
    return IndexSet(universe_, std::move(rest));
}

int IndexSet::intersection_size(const IndexSet& other) const {
    int c = 0;
    std::size_t i = 0, k = 0;
    while (i < members_.size() && k < other.members_.size()) {
        if (members_[i] < other.members_[k]) {
            ++i;
        } else if (members_[i] > other.members_[k]) {
            ++k;
        } else {
            ++c;
            ++i;
            ++k;
        }
    }
    return c;
}

Automorphism Automorphism::identity(int n) {
    Automorphism a{std::vector<int>(static_cast<std::size_t>(n)), BitString(n)};
    for (int j = 1; j <= n; ++j) a.perm[static_cast<std::size_t>(j - 1)] = j;
    return a;
}

Automorphism Automorphism::random(int n, Rng& rng) {
    Automorphism a = identity(n);
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(i + 1)));
        std::swap(a.perm[static_cast<std::size_t>(i)], a.perm[static_cast<std::size_t>(j)]);
    }
    a.shift = BitString::random(n, rng);
    return a;
}

BitString Automorphism::apply(const BitString& x) const {
    if (x.length() != length() ||
        static_cast<int>(perm.size()) != length()) {
        throw InputError("automorphism length mismatch");
    }
    const BitString shifted = x ^ shift;
    BitString r(x.length());
    for (int j = 1; j <= x.length(); ++j) {
        r.set(j, shifted.get(perm[static_cast<std::size_t>(j - 1)]));
    }
    return r;
}

Automorphism Automorphism::inverse() const {
    const int n = length();
    Automorphism inv{std::vector<int>(static_cast<std::size_t>(n)), BitString(n)};
    for (int j = 1; j <= n; ++j) {
        inv.perm[static_cast<std::size_t>(perm[static_cast<std::size_t>(j - 1)] - 1)] = j;
    }
    // beta(alpha(x)) = x requires beta's shift u with u_j = v_{pi(j)},
    // i.e. u = pi(v) under the same indexing convention as apply().
    for (int j = 1; j <= n; ++j) {
        inv.shift.set(j, shift.get(perm[static_cast<std::size_t>(j - 1)]));
    }
    return inv;
}

int onemax(const BitString& x, const BitString& z) {
    require_same_length(x, z);
    return x.agreements(z);
}

BitString apply_automorphism(const Automorphism& a, const BitString& x) {
    return a.apply(x);
}

std::pair<IndexSet, IndexSet> agreement_and_disagreement(const BitString& x,
                                                         const BitString& y) {
    require_same_length(x, y);
    std::vector<int> agree, disagree;
    for (int j = 1; j <= x.length(); ++j) {
        (x.get(j) == y.get(j) ? agree : disagree).push_back(j);
    }
    return {IndexSet(x.length(), std::move(agree)),
            IndexSet(x.length(), std::move(disagree))};
}

std::uint64_t binary_value(const BitString& w) {
    if (w.length() > 63) throw InputError("binary_value width over 63");
    std::uint64_t v = 0;
    for (int j = 1; j <= w.length(); ++j) {
        v = (v << 1) | (w.get(j) ? 1u : 0u);
    }
    return v;
}

BitString binary_value_inverse(std::uint64_t v, int width) {
    if (width < 1 || width > 63) throw InputError("binary_value width outside [1..63]");
    if (v >> width != 0) throw InputError("value does not fit in width");
    BitString w(width);
    for (int j = width; j >= 1; --j) {
        w.set(j, (v & 1u) != 0);
        v >>= 1;
    }
    return w;
}

BitString truncated_inverse(std::uint64_t v, int kappa) {
    if (kappa < 0) throw InputError("kappa must be nonnegative");
    const int width = kappa + 1;
    if (v >> width != 0) {
        throw InputError("value does not fit in kappa+1 bits");
    }
    return binary_value_inverse(v, width);
}

}  // namespace ombb
