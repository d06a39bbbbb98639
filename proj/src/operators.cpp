#include "ombb/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "ombb/errors.hpp"

namespace ombb {

namespace {

double lchoose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Index draw proportional to exp(log_weights[i]); log-space keeps the
/// binomial weights finite at any n.
std::size_t weighted_pick(const std::vector<double>& log_weights, Rng& rng) {
    const double top = *std::max_element(log_weights.begin(), log_weights.end());
    std::vector<double> cum(log_weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        total += std::exp(log_weights[i] - top);
        cum[i] = total;
    }
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
    for (std::size_t i = 0; i + 1 < cum.size(); ++i) {
        if (u < cum[i]) return i;
    }
    return cum.size() - 1;
}

std::vector<int> disagreement_positions(const BitString& a, const BitString& b) {
    std::vector<int> out;
    for (int j = 1; j <= a.length(); ++j) {
        if (a.get(j) != b.get(j)) out.push_back(j);
    }
    return out;
}

/// Storage positions (D(x, y^0)) in increasing order.
std::vector<int> storage_positions(const StorageFrame& frame) {
    return disagreement_positions(frame.x, frame.levels.front());
}

/// Cell id of each storage position at the given depth: one bit per level,
/// level 1 compares y^1 against x and level u >= 2 compares y^u against
/// y^(u-1). The first level's bit is the most significant.
std::vector<int> cell_ids(const StorageFrame& frame, const std::vector<int>& storage,
                          int depth) {
    std::vector<int> ids(storage.size(), 0);
    for (int u = 1; u <= depth; ++u) {
        const BitString& cur = frame.levels[static_cast<std::size_t>(u)];
        const BitString& ref =
            u == 1 ? frame.x : frame.levels[static_cast<std::size_t>(u - 1)];
        for (std::size_t i = 0; i < storage.size(); ++i) {
            const int j = storage[i];
            ids[i] = (ids[i] << 1) | (cur.get(j) != ref.get(j) ? 1 : 0);
        }
    }
    return ids;
}

/// How many of the cell's positions must belong to D(x,y): the overlap of
/// the cell's address range with the block addresses [1..block_len].
int need_of_cell(const FrameConfig& cfg, int block_len, int depth, int cell_id) {
    const int cell_size = 1 << (cfg.m - depth);
    const int lo = cell_id * cell_size;
    return std::clamp(block_len - lo, 0, cell_size);
}

void require_length(const BitString& b, int n, const char* what) {
    if (b.length() != n) {
        throw InputError(std::string(what) + ": length differs from frame's n");
    }
}

}  // namespace

int FrameConfig::kappa() const {
    if (ell < 1 || (ell & (ell - 1)) != 0) {
        throw ConfigError("block length ell must be a power of two");
    }
    return std::countr_zero(static_cast<unsigned>(ell));
}

void FrameConfig::validate() const {
    if (n < 1) throw ConfigError("n must be positive");
    const int k = kappa();
    if (m < k + 2) {
        throw ConfigError("storage exponent m must be at least kappa + 2");
    }
    if (m >= 31 || storage_size() > n) {
        throw ConfigError("storage size 2^m must fit inside [1..n]");
    }
}

StorageFrame StorageFrame::begin(BitString x, BitString y, FrameConfig cfg) {
    cfg.validate();
    require_length(x, cfg.n, "x");
    require_length(y, cfg.n, "y");
    const int d_xy = x.hamming_distance(y);
    const int block_len = std::min(cfg.ell, d_xy);
    if (block_len == 0) {
        throw InputError("degenerate frame: x and y agree everywhere");
    }
    return StorageFrame{std::move(x), std::move(y), cfg, {}, block_len};
}

StorageFrame StorageFrame::create(BitString x, BitString y, FrameConfig cfg,
                                  Rng& rng) {
    StorageFrame frame = begin(std::move(x), std::move(y), cfg);
    frame.levels.push_back(find_storage(frame.x, frame.y, frame.cfg, rng));
    for (int s = 0; s < cfg.m; ++s) {
        frame.levels.push_back(refine_storage(frame, rng));
    }
    return frame;
}

BitString sample_uniform(int n, Rng& rng) { return BitString::random(n, rng); }

BitString complement(const BitString& x) { return x.complemented(); }

BitString find_storage(const BitString& x, const BitString& y,
                       const FrameConfig& cfg, Rng& rng) {
    cfg.validate();
    require_length(x, cfg.n, "x");
    require_length(y, cfg.n, "y");
    const std::vector<int> d_xy = disagreement_positions(x, y);
    const int d = static_cast<int>(d_xy.size());
    const int size = cfg.storage_size();
    const int block_len = std::min(cfg.ell, d);
    if (block_len == 0) throw InputError("find_storage: x and y agree everywhere");

    // Uniform over S(x,y): first draw how much of the storage overlaps
    // D(x,y) with the hypergeometric-style weight C(d,c) * C(n-d, size-c),
    // then place both parts uniformly.
    const int c_min = std::max(block_len, size - (cfg.n - d));
    const int c_max = std::min(d, size);
    if (c_min > c_max) throw InvariantError("find_storage: empty support");
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(c_max - c_min + 1));
    for (int c = c_min; c <= c_max; ++c) {
        weights.push_back(lchoose(d, c) + lchoose(cfg.n - d, size - c));
    }
    const int c = c_min + static_cast<int>(weighted_pick(weights, rng));

    std::vector<int> agree_positions;
    agree_positions.reserve(static_cast<std::size_t>(cfg.n - d));
    {
        std::size_t i = 0;
        for (int j = 1; j <= cfg.n; ++j) {
            if (i < d_xy.size() && d_xy[i] == j) {
                ++i;
            } else {
                agree_positions.push_back(j);
            }
        }
    }
    BitString w = x;
    for (int j : sample_without_replacement(d_xy, static_cast<std::size_t>(c), rng)) {
        w.flip(j);
    }
    for (int j : sample_without_replacement(agree_positions,
                                            static_cast<std::size_t>(size - c), rng)) {
        w.flip(j);
    }
    return w;
}

BitString refine_storage(const StorageFrame& frame, Rng& rng) {
    if (frame.levels.empty()) {
        throw InputError("refine_storage: frame has no storage level yet");
    }
    const int s = static_cast<int>(frame.levels.size()) - 1;
    if (s >= frame.cfg.m) {
        throw InputError("refine_storage: frame already fully refined");
    }
    const std::vector<int> storage = storage_positions(frame);
    if (static_cast<int>(storage.size()) != frame.cfg.storage_size()) {
        throw InvariantError("refine_storage: storage region has wrong size");
    }
    const std::vector<int> ids = cell_ids(frame, storage, s);
    const int cell_count = 1 << s;
    const int cell_size = frame.cfg.storage_size() >> s;
    const int half = cell_size / 2;

    std::vector<std::vector<int>> in_block(static_cast<std::size_t>(cell_count));
    std::vector<std::vector<int>> outside(static_cast<std::size_t>(cell_count));
    const BitString diff_xy = frame.x ^ frame.y;
    for (std::size_t i = 0; i < storage.size(); ++i) {
        auto& bucket = diff_xy.get(storage[i]) ? in_block : outside;
        bucket[static_cast<std::size_t>(ids[i])].push_back(storage[i]);
    }

    // Flips are applied against the previous comparison base: x when
    // creating y^1, the top level afterwards. Either way the result keeps
    // agreeing with x off the storage region.
    BitString next = s == 0 ? frame.x : frame.levels.back();

    for (int c = 0; c < cell_count; ++c) {
        auto& g_members = in_block[static_cast<std::size_t>(c)];
        auto& h_members = outside[static_cast<std::size_t>(c)];
        const int g = static_cast<int>(g_members.size());
        const int h = static_cast<int>(h_members.size());
        if (g + h != cell_size) {
            throw InvariantError("refine_storage: cell has wrong size");
        }
        const int need_low = need_of_cell(frame.cfg, frame.block_len, s + 1, 2 * c);
        const int need_high = need_of_cell(frame.cfg, frame.block_len, s + 1, 2 * c + 1);
        if (g < need_low + need_high) {
            throw InvariantError("refine_storage: cell lost required block positions");
        }
        // a = number of D(x,y) members kept on the low (unflipped) side.
        const int a_min = std::max(need_low, half - h);
        const int a_max = std::min(g - need_high, std::min(half, g));
        if (a_min > a_max) throw InvariantError("refine_storage: empty split range");
        std::vector<double> weights;
        weights.reserve(static_cast<std::size_t>(a_max - a_min + 1));
        for (int a = a_min; a <= a_max; ++a) {
            weights.push_back(lchoose(g, a) + lchoose(h, half - a));
        }
        const int a = a_min + static_cast<int>(weighted_pick(weights, rng));

        std::vector<int> low = sample_without_replacement(
            g_members, static_cast<std::size_t>(a), rng);
        for (int j : sample_without_replacement(
                 h_members, static_cast<std::size_t>(half - a), rng)) {
            low.push_back(j);
        }
        std::sort(low.begin(), low.end());
        // Flip everything in the cell that is not kept low.
        std::vector<int> cell_all = g_members;
        cell_all.insert(cell_all.end(), h_members.begin(), h_members.end());
        for (int j : cell_all) {
            if (!std::binary_search(low.begin(), low.end(), j)) next.flip(j);
        }
    }
    return next;
}

bool in_storage_support(const BitString& x, const BitString& y,
                        const FrameConfig& cfg, const BitString& w) {
    if (w.length() != x.length() || y.length() != x.length()) return false;
    const BitString d_xw = x ^ w;
    if (d_xw.count_ones() != cfg.storage_size()) return false;
    const BitString d_xy = x ^ y;
    int inter = 0;
    for (int j = 1; j <= x.length(); ++j) {
        if (d_xw.get(j) && d_xy.get(j)) ++inter;
    }
    const int block_len = std::min(cfg.ell, d_xy.count_ones());
    return inter >= block_len;
}

bool in_refine_support(const StorageFrame& frame, const BitString& w) {
    if (frame.levels.empty()) return false;
    const int s = static_cast<int>(frame.levels.size()) - 1;
    if (s >= frame.cfg.m || w.length() != frame.cfg.n) return false;
    const std::vector<int> storage = storage_positions(frame);
    if (static_cast<int>(storage.size()) != frame.cfg.storage_size()) return false;

    // w must agree with x everywhere off the storage region.
    {
        const BitString moved = frame.x ^ w;
        std::size_t i = 0;
        for (int j = 1; j <= frame.cfg.n; ++j) {
            if (i < storage.size() && storage[i] == j) {
                ++i;
                continue;
            }
            if (moved.get(j)) return false;
        }
    }

    const std::vector<int> ids = cell_ids(frame, storage, s);
    const int cell_count = 1 << s;
    const int cell_size = frame.cfg.storage_size() >> s;
    const BitString& ref = s == 0 ? frame.x : frame.levels.back();
    const BitString diff_xy = frame.x ^ frame.y;

    std::vector<int> high_total(static_cast<std::size_t>(cell_count), 0);
    std::vector<int> low_block(static_cast<std::size_t>(cell_count), 0);
    std::vector<int> high_block(static_cast<std::size_t>(cell_count), 0);
    for (std::size_t i = 0; i < storage.size(); ++i) {
        const int j = storage[i];
        const bool high = w.get(j) != ref.get(j);
        const std::size_t c = static_cast<std::size_t>(ids[i]);
        if (high) ++high_total[c];
        if (diff_xy.get(j)) ++(high ? high_block : low_block)[c];
    }
    for (int c = 0; c < cell_count; ++c) {
        if (high_total[static_cast<std::size_t>(c)] != cell_size / 2) return false;
        if (low_block[static_cast<std::size_t>(c)] <
            need_of_cell(frame.cfg, frame.block_len, s + 1, 2 * c)) {
            return false;
        }
        if (high_block[static_cast<std::size_t>(c)] <
            need_of_cell(frame.cfg, frame.block_len, s + 1, 2 * c + 1)) {
            return false;
        }
    }
    return true;
}

bool frame_prefix_valid(const StorageFrame& frame) {
    if (frame.levels.empty()) return false;
    if (!in_storage_support(frame.x, frame.y, frame.cfg, frame.levels.front())) {
        return false;
    }
    StorageFrame prefix{frame.x, frame.y, frame.cfg, {frame.levels.front()},
                        frame.block_len};
    for (std::size_t s = 1; s < frame.levels.size(); ++s) {
        if (!in_refine_support(prefix, frame.levels[s])) return false;
        prefix.levels.push_back(frame.levels[s]);
    }
    return true;
}

bool frame_valid(const StorageFrame& frame) {
    return frame.complete() && frame_prefix_valid(frame);
}

SigmaMap SigmaMap::build(const StorageFrame& frame) {
    if (!frame.complete()) {
        throw PreconditionError("sigma needs a fully refined frame");
    }
    const std::vector<int> storage = storage_positions(frame);
    const int size = frame.cfg.storage_size();
    if (static_cast<int>(storage.size()) != size) {
        throw PreconditionError("sigma: storage region has wrong size");
    }
    const std::vector<int> ids = cell_ids(frame, storage, frame.cfg.m);
    SigmaMap map;
    map.addr_to_pos_.assign(static_cast<std::size_t>(size), 0);
    map.pos_to_addr_.assign(static_cast<std::size_t>(frame.cfg.n), 0);
    for (std::size_t i = 0; i < storage.size(); ++i) {
        const int addr = ids[i] + 1;
        if (map.addr_to_pos_[static_cast<std::size_t>(addr - 1)] != 0) {
            throw InvariantError("sigma: split paths are not distinct");
        }
        map.addr_to_pos_[static_cast<std::size_t>(addr - 1)] = storage[i];
        map.pos_to_addr_[static_cast<std::size_t>(storage[i] - 1)] = addr;
    }
    return map;
}

int SigmaMap::pos(int addr) const {
    if (addr < 1 || addr > size()) throw InputError("sigma address out of range");
    return addr_to_pos_[static_cast<std::size_t>(addr - 1)];
}

int SigmaMap::addr(int pos) const {
    if (pos < 1 || pos > static_cast<int>(pos_to_addr_.size())) {
        throw InputError("sigma position out of range");
    }
    return pos_to_addr_[static_cast<std::size_t>(pos - 1)];
}

std::vector<int> SigmaMap::block(int block_len) const {
    if (block_len < 0 || block_len > size()) {
        throw InputError("block length out of range");
    }
    std::vector<int> b(static_cast<std::size_t>(block_len));
    for (int a = 1; a <= block_len; ++a) {
        b[static_cast<std::size_t>(a - 1)] = pos(a);
    }
    return b;
}

BitString make_block_reference(const StorageFrame& frame, const SigmaMap& sigma) {
    BitString out = frame.x;
    for (int j : sigma.block(frame.block_len)) out.flip(j);
    return out;
}

WriteRequest::WriteRequest(BitString payload_in, std::vector<int> addrs_in)
    : payload(std::move(payload_in)), addrs(std::move(addrs_in)) {
    if (payload.length() != static_cast<int>(addrs.size())) {
        throw InputError("write payload length differs from address count");
    }
    for (std::size_t i = 0; i < addrs.size(); ++i) {
        if (addrs[i] < 1 || (i > 0 && addrs[i] <= addrs[i - 1])) {
            throw InputError("write addresses must be strictly increasing and >= 1");
        }
    }
}

WriteRequest WriteRequest::block_probe(const BitString& r, int block_len) {
    if (r.length() != block_len) {
        throw InputError("block probe payload must have the block's length");
    }
    std::vector<int> addrs(static_cast<std::size_t>(block_len));
    for (int a = 1; a <= block_len; ++a) addrs[static_cast<std::size_t>(a - 1)] = a;
    return WriteRequest(r, std::move(addrs));
}

WriteRequest WriteRequest::delta_record(std::uint64_t delta, int record_index,
                                        int kappa) {
    if (record_index < 1) throw InputError("record index must be >= 1");
    const int width = kappa + 1;
    std::vector<int> addrs(static_cast<std::size_t>(width));
    const int base = (record_index - 1) * width;
    for (int j = 1; j <= width; ++j) {
        addrs[static_cast<std::size_t>(j - 1)] = base + j;
    }
    return WriteRequest(truncated_inverse(delta, kappa), std::move(addrs));
}

BitString write_bits(const WriteRequest& req, const BitString& w,
                     const StorageFrame& frame, const SigmaMap& sigma,
                     FaultPolicy policy, Rng& rng) {
    require_length(w, frame.cfg.n, "w");
    if (!req.addrs.empty() && req.addrs.back() > sigma.size()) {
        throw InputError("write address beyond storage size");
    }
    if (!frame_valid(frame)) {
        if (policy == FaultPolicy::kStrict) {
            throw PreconditionError("write on an invalid frame");
        }
        return BitString::random(frame.cfg.n, rng);
    }
    BitString out = w;
    for (std::size_t k = 0; k < req.addrs.size(); ++k) {
        if (req.payload.get(static_cast<int>(k) + 1)) {
            out.flip(sigma.pos(req.addrs[k]));
        }
    }
    return out;
}

int decode_delta(const StorageFrame& frame, const SigmaMap& sigma,
                 const BitString& s, int record_index, int kappa,
                 FaultPolicy policy) {
    require_length(s, frame.cfg.n, "s");
    if (record_index < 1 || kappa < 0) {
        throw InputError("decode_delta: bad record index or kappa");
    }
    const int width = kappa + 1;
    if (record_index * width > sigma.size()) {
        throw InputError("decode_delta: record beyond storage size");
    }
    if (policy == FaultPolicy::kStrict) {
        for (int j = 1; j <= frame.cfg.n; ++j) {
            if (s.get(j) != frame.x.get(j) && sigma.addr(j) == 0) {
                throw PreconditionError(
                    "decode_delta: s differs from x outside the storage");
            }
        }
    }
    int delta = 0;
    const int base = (record_index - 1) * width;
    for (int j = 1; j <= width; ++j) {
        const int p = sigma.pos(base + j);
        delta = (delta << 1) | (frame.x.get(p) != s.get(p) ? 1 : 0);
    }
    return delta;
}

bool choose_consistent_inputs_valid(const StorageFrame& frame,
                                    const SigmaMap& sigma, const BitString& y_b,
                                    const BitString& s) {
    if (!frame.complete() || !frame_valid(frame)) return false;
    if (y_b.length() != frame.cfg.n || s.length() != frame.cfg.n) return false;
    if (!(y_b == make_block_reference(frame, sigma))) return false;
    for (int j = 1; j <= frame.cfg.n; ++j) {
        if (s.get(j) != frame.x.get(j) && sigma.addr(j) == 0) return false;
    }
    return true;
}

ChooseConsistentResult choose_consistent(const StorageFrame& frame,
                                         const SigmaMap& sigma,
                                         const BitString& y_b,
                                         const BitString& s,
                                         const DistinguishingSequence& seq,
                                         int fitness_x, int fitness_y_b,
                                         FaultPolicy policy, Rng& rng) {
    const int block_len = frame.block_len;
    if (seq.ell != block_len) {
        throw InputError("sequence width differs from block length");
    }
    const int kappa = frame.cfg.kappa();
    if (seq.t() * (kappa + 1) > frame.cfg.storage_size()) {
        throw InputError("sequence does not fit the storage");
    }
    const bool inputs_ok = choose_consistent_inputs_valid(frame, sigma, y_b, s) &&
                           (fitness_x + fitness_y_b - block_len) % 2 == 0;
    if (!inputs_ok) {
        if (policy == FaultPolicy::kStrict) {
            throw PreconditionError("choose_consistent inputs violate event E3");
        }
        return {BitString::random(frame.cfg.n, rng), 0, true};
    }

    Fingerprint deltas(static_cast<std::size_t>(seq.t()));
    for (int i = 1; i <= seq.t(); ++i) {
        deltas[static_cast<std::size_t>(i - 1)] =
            decode_delta(frame, sigma, s, i, kappa, policy);
    }
    // Candidates live on the block: v encodes, address by address, whether
    // the output flips x there. Agreement of v with r^i equals the stored
    // block fitness of write(r^i, [block_len], x), so the feasible v's are
    // exactly the block patterns consistent with every stored value.
    const std::vector<BitString> candidates =
        feasible_set(deltas, seq.strings, block_len);
    if (candidates.empty()) {
        return {BitString::random(frame.cfg.n, rng), 0, true};
    }
    const auto& v =
        candidates[static_cast<std::size_t>(uniform_below(rng, candidates.size()))];
    BitString q = frame.x;
    for (int a = 1; a <= block_len; ++a) {
        if (v.get(a)) q.flip(sigma.pos(a));
    }
    return {std::move(q), static_cast<int>(candidates.size()), false};
}

BitString update_y(const BitString& x, const BitString& y, const BitString& y_b,
                   const BitString& q) {
    const int n = x.length();
    if (y.length() != n || y_b.length() != n || q.length() != n) {
        throw InputError("update_y: length mismatch");
    }
    BitString out(n);
    for (int j = 1; j <= n; ++j) {
        out.set(j, y_b.get(j) == x.get(j) ? y.get(j) : q.get(j));
    }
    return out;
}

int refine_arity(int s) {
    if (s < 0) throw InputError("refine level must be nonnegative");
    return s <= 1 ? s + 3 : s + 2;
}

int block_reference_arity(const FrameConfig& cfg, int block_len) {
    if (block_len < 1 || block_len > cfg.ell) {
        throw InputError("block length out of range");
    }
    const int depth = cfg.m - std::countr_zero(static_cast<unsigned>(block_len));
    return depth + 2;
}

int write_arity(int m) { return m + 4; }

int choose_consistent_arity(int m) { return m + 5; }

}  // namespace ombb
