#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ombb/bitstring.hpp"
#include "ombb/distinguishing.hpp"
#include "ombb/rng.hpp"

namespace ombb {

/// How an operator reacts when a structural precondition (the events that
/// honest callers always satisfy) is violated: strict mode faults so bugs
/// surface; sample mode implements the fallback branch literally (a uniform
/// random output), which makes every operator a total distribution and lets
/// the equivariance harness exercise it.
enum class FaultPolicy { kStrict, kSample };

/// Geometry of one storage frame: block length ell (a power of two) and
/// storage exponent m. The storage region has 2^m positions; the classic
/// layout uses m = kappa + 2, i.e. storage 4*ell.
struct FrameConfig {
    int n = 0;
    int ell = 0;
    int m = 0;

    int kappa() const;          // log2(ell)
    int storage_size() const { return 1 << m; }
    void validate() const;      // throws ConfigError
};

/// The strings x (current base), y (optimized-position encoder) and the
/// levels y^0..y^m produced by repeated halving of D(x, y^0). block_len is
/// ell' = min(ell, |D(x,y)|), fixed when the frame is started.
struct StorageFrame {
    BitString x;
    BitString y;
    FrameConfig cfg;
    std::vector<BitString> levels;
    int block_len = 0;

    /// Starts an empty frame (no levels yet). Rejects block_len == 0.
    static StorageFrame begin(BitString x, BitString y, FrameConfig cfg);

    /// Convenience: begin + find_storage + m refine steps.
    static StorageFrame create(BitString x, BitString y, FrameConfig cfg,
                               Rng& rng);

    bool complete() const {
        return static_cast<int>(levels.size()) == cfg.m + 1;
    }
};

// ---- variation operators -------------------------------------------------

/// 0-ary: uniform over {0,1}^n.
BitString sample_uniform(int n, Rng& rng);

/// 1-ary: bit-wise complement.
BitString complement(const BitString& x);

/// 2-ary: samples y^0 uniformly over
///   S(x,y) = { w : |D(x,w)| = 2^m and |D(x,w) ∩ D(x,y)| >= min(ell,|D(x,y)|) }.
BitString find_storage(const BitString& x, const BitString& y,
                       const FrameConfig& cfg, Rng& rng);

/// Samples the next level y^(s+1) uniformly over the refinement set: every
/// current cell is split into halves, and enough not-yet-optimized positions
/// are kept in the low-address cells that the first block_len storage
/// addresses stay inside D(x,y). levels must hold y^0..y^s with s < m.
BitString refine_storage(const StorageFrame& frame, Rng& rng);

// ---- membership predicates (strict validation + support enumeration) -----

/// w ∈ S(x,y) for the given geometry.
bool in_storage_support(const BitString& x, const BitString& y,
                        const FrameConfig& cfg, const BitString& w);

/// w is a valid next level for the frame's current prefix.
bool in_refine_support(const StorageFrame& frame, const BitString& w);

/// The levels collected so far are structurally valid (y^0 in S, every
/// later level inside its refinement set).
bool frame_prefix_valid(const StorageFrame& frame);

/// Event E1: complete frame with a valid prefix.
bool frame_valid(const StorageFrame& frame);

// ---- storage addressing ---------------------------------------------------

/// The bijection sigma : [2^m] -> D(x, y^0) built from the singleton cells
/// of a complete frame, ordered by the binary value of their split path.
/// B := { sigma(1), ..., sigma(block_len) } is the block being optimized.
class SigmaMap {
public:
    static SigmaMap build(const StorageFrame& frame);

    int size() const { return static_cast<int>(addr_to_pos_.size()); }
    int pos(int addr) const;   // addr in [1..2^m] -> position in [1..n]
    int addr(int pos) const;   // inverse; 0 when pos is outside the storage
    std::vector<int> block(int block_len) const;  // sigma(1..block_len)

private:
    std::vector<int> addr_to_pos_;
    std::vector<int> pos_to_addr_;
};

/// 4-ary in the classic layout: y^B = x with exactly the block positions
/// flipped; D(x, y^B) = B.
BitString make_block_reference(const StorageFrame& frame, const SigmaMap& sigma);

/// Payload to storage addresses. addrs must be strictly increasing and the
/// payload supplies one bit per address, most significant first.
struct WriteRequest {
    BitString payload;
    std::vector<int> addrs;

    WriteRequest(BitString payload, std::vector<int> addrs);

    /// (r, [ell']): the block probe used to query sequence strings.
    static WriteRequest block_probe(const BitString& r, int block_len);

    /// Stores delta in kappa+1 bits at the record's address range
    /// {(i-1)(kappa+1)+1, ..., i(kappa+1)}.
    static WriteRequest delta_record(std::uint64_t delta, int record_index,
                                     int kappa);
};

/// (kappa+6)-ary in the classic layout (m+4 in general): flips w at the
/// addressed positions whose payload bit is 1. Deterministic given a valid
/// frame; on an invalid frame faults (strict) or samples uniformly (sample).
BitString write_bits(const WriteRequest& req, const BitString& w,
                     const StorageFrame& frame, const SigmaMap& sigma,
                     FaultPolicy policy, Rng& rng);

/// Reads back the record stored by write_bits(delta_record(...)): compares
/// s against x at the record's addresses. Requires s == x outside the
/// storage region (strict mode validates).
int decode_delta(const StorageFrame& frame, const SigmaMap& sigma,
                 const BitString& s, int record_index, int kappa,
                 FaultPolicy policy);

struct ChooseConsistentResult {
    BitString q;
    /// |F_B| as enumerated; 0 triggers the random fallback and is flagged.
    int feasible_count = 0;
    bool fallback = false;
};

/// (kappa+7)-ary in the classic layout (m+5 in general). Reconstructs the
/// stored block fitness values from s, enumerates the block strings
/// consistent with all of them, and samples uniformly from that set. With a
/// verified sequence the set is a singleton whose block bits equal the
/// hidden target's. fitness_x / fitness_y_b feed the strict-mode parity
/// check of the contribution identity.
ChooseConsistentResult choose_consistent(const StorageFrame& frame,
                                         const SigmaMap& sigma,
                                         const BitString& y_b,
                                         const BitString& s,
                                         const DistinguishingSequence& seq,
                                         int fitness_x, int fitness_y_b,
                                         FaultPolicy policy, Rng& rng);

/// Event E3: frame valid, y_b correctly formed, s untouched off the storage.
bool choose_consistent_inputs_valid(const StorageFrame& frame,
                                    const SigmaMap& sigma,
                                    const BitString& y_b, const BitString& s);

/// 4-ary: keeps y where y^B agrees with x and copies q elsewhere, so that
/// after x <- q the agreement set grows by exactly the block.
BitString update_y(const BitString& x, const BitString& y,
                   const BitString& y_b, const BitString& q);

// ---- arity accounting ------------------------------------------------------

inline constexpr int kAritySampleUniform = 0;
inline constexpr int kArityComplement = 1;
inline constexpr int kArityFindStorage = 2;
inline constexpr int kArityUpdateY = 4;

/// Creating y^(s+1): (x, y, y^0..y^s) while the refinement still references
/// D(x,y), i.e. s <= 1; (x, y^0..y^s) afterwards.
int refine_arity(int s);

/// Parents needed to pin down the block: (x, y^0..y^d) where d is the depth
/// at which the first block_len addresses become whole cells. Classic
/// full-block layout: 4.
int block_reference_arity(const FrameConfig& cfg, int block_len);

int write_arity(int m);              // m + 4
int choose_consistent_arity(int m);  // m + 5

}  // namespace ombb
