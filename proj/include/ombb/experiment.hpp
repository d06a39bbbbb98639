#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ombb/distinguishing.hpp"
#include "ombb/runner.hpp"

namespace ombb {

enum class AlgorithmKind { kAlg3 = 1, kSampling = 2, kRls = 3 };

std::string algorithm_name(AlgorithmKind kind);
std::optional<AlgorithmKind> parse_algorithm(const std::string& name);

struct ExperimentConfig {
    std::vector<AlgorithmKind> algorithms;
    std::vector<int> n_list;
    std::vector<int> kappa_list;
    Mode mode = Mode::kDesk;
    int trials = 10;
    std::uint64_t base_seed = 1;
    std::filesystem::path out_path = "results.csv";
    std::filesystem::path cache_dir = "seqcache";
    bool strict = true;
    int jobs = 1;
};

struct CsvRow {
    std::uint64_t run_id = 0;
    std::string algorithm;
    int n = 0;
    int kappa = 0;
    int ell = 0;
    int m = 0;
    int t = 0;
    std::string mode;
    std::uint64_t seed = 0;
    std::uint64_t queries = 0;
    std::uint64_t predicted_queries = 0;
    std::uint64_t repeat_iterations = 0;
    int max_arity = 0;
    bool success = false;
    std::uint64_t wall_ms = 0;
};

std::string csv_header();
std::string csv_line(const CsvRow& row);
std::vector<CsvRow> parse_csv(const std::filesystem::path& path);

/// Loads the cached verified sequence for (ell, t) or constructs one:
/// canonical for t = ell + 1, the unit-basis variant for t = ell, random
/// search below that. The search seed is a fixed function of (ell, t), so
/// the cache content is reproducible.
DistinguishingSequence provide_sequence(int ell, int t,
                                        const std::filesystem::path& cache_dir);

struct SequenceCheck {
    int ell = 0;
    int t = 0;
    bool ok = false;
    bool skipped = false;  // over the enumeration limit; not an error
    bool from_cache = false;
    std::string note;
};

/// Guarantees a verified cached sequence per ell (searching for t = ell
/// first, falling back to the canonical t = ell + 1). Repeated calls reuse
/// the cache.
std::vector<SequenceCheck> verify_sequences(const std::vector<int>& ells,
                                            const std::filesystem::path& cache_dir);

/// Runs the whole sweep and writes the CSV atomically. Returns the process
/// exit code: 0 ok, 1 configuration error, 2 runtime anomaly under strict
/// mode. Row order and content are independent of the job count.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

std::string summarize_csv(const std::filesystem::path& csv_path);

}  // namespace ombb
