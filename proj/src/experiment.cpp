#include "ombb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "ombb/errors.hpp"

namespace ombb {

namespace {

std::string mode_name(Mode mode) {
    return mode == Mode::kPaper ? "paper" : "desk";
}

std::filesystem::path sequence_path(const std::filesystem::path& dir, int ell,
                                    int t) {
    return dir / ("ell" + std::to_string(ell) + "_t" + std::to_string(t) + ".seq");
}

struct Task {
    AlgorithmKind algorithm;
    Parameters params;
    SequenceSet sequences;  // alg3 only
    int trial = 0;
    std::size_t row_index = 0;
};

struct TaskResult {
    CsvRow row;
    bool anomaly = false;
    std::string note;
};

TaskResult execute(const Task& task) {
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t run_seed =
        mix_seed(task.params.seed, static_cast<std::uint64_t>(task.algorithm),
                 static_cast<std::uint64_t>(task.params.n),
                 static_cast<std::uint64_t>(task.params.kappa),
                 static_cast<std::uint64_t>(task.trial));
    Rng rng(run_seed);
    std::uint64_t target_state = run_seed;
    Oracle oracle = Oracle::with_random_target(task.params.n,
                                               splitmix64(target_state),
                                               HistoryRetention::kCountOnly);
    RunReport report;
    CsvRow row;
    switch (task.algorithm) {
        case AlgorithmKind::kAlg3:
            report = run_algorithm3(task.params, oracle, task.sequences, rng);
            row.ell = task.params.ell();
            row.m = task.params.m;
            row.t = task.params.t;
            break;
        case AlgorithmKind::kSampling:
            report = run_random_sampling(task.params, oracle, rng);
            row.t = sampling_t(task.params.n);
            break;
        case AlgorithmKind::kRls:
            report = run_rls(task.params, oracle, rng);
            break;
    }
    row.run_id = task.row_index;
    row.algorithm = algorithm_name(task.algorithm);
    row.n = task.params.n;
    row.kappa = task.params.kappa;
    row.mode = mode_name(task.params.mode);
    row.seed = run_seed;
    row.queries = report.total_queries;
    row.predicted_queries = report.predicted_total;
    row.repeat_iterations = report.repeat_iterations;
    row.max_arity = report.max_arity;
    row.success = report.success && !report.anomaly;
    row.wall_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0)
            .count());
    TaskResult result{std::move(row), report.anomaly, {}};
    if (result.anomaly) {
        result.note = "runtime anomaly in " + result.row.algorithm +
                      " n=" + std::to_string(result.row.n) +
                      " kappa=" + std::to_string(result.row.kappa) +
                      " trial=" + std::to_string(task.trial);
    }
    return result;
}

}  // namespace

std::string algorithm_name(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::kAlg3: return "alg3";
        case AlgorithmKind::kSampling: return "sampling";
        case AlgorithmKind::kRls: return "rls";
    }
    return "?";
}

std::optional<AlgorithmKind> parse_algorithm(const std::string& name) {
    if (name == "alg3") return AlgorithmKind::kAlg3;
    if (name == "sampling") return AlgorithmKind::kSampling;
    if (name == "rls") return AlgorithmKind::kRls;
    return std::nullopt;
}

std::string csv_header() {
    return "run_id,algorithm,n,kappa,ell,m,t,mode,seed,queries,"
           "predicted_queries,repeat_iterations,max_arity,success,wall_ms";
}

std::string csv_line(const CsvRow& r) {
    std::ostringstream os;
    os << r.run_id << ',' << r.algorithm << ',' << r.n << ',' << r.kappa << ','
       << r.ell << ',' << r.m << ',' << r.t << ',' << r.mode << ',' << r.seed
       << ',' << r.queries << ',' << r.predicted_queries << ','
       << r.repeat_iterations << ',' << r.max_arity << ','
       << (r.success ? "true" : "false") << ',' << r.wall_ms;
    return os.str();
}

std::vector<CsvRow> parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open CSV " + path.string());
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& why) {
        throw InputError("CSV parse error at line " + std::to_string(line_no) +
                         ": " + why);
    };
    if (!std::getline(in, line)) fail("missing header");
    ++line_no;
    if (line != csv_header()) fail("unexpected header");
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 15) fail("expected 15 fields, got " + std::to_string(f.size()));
        CsvRow r;
        try {
            r.run_id = std::stoull(f[0]);
            r.algorithm = f[1];
            r.n = std::stoi(f[2]);
            r.kappa = std::stoi(f[3]);
            r.ell = std::stoi(f[4]);
            r.m = std::stoi(f[5]);
            r.t = std::stoi(f[6]);
            r.mode = f[7];
            r.seed = std::stoull(f[8]);
            r.queries = std::stoull(f[9]);
            r.predicted_queries = std::stoull(f[10]);
            r.repeat_iterations = std::stoull(f[11]);
            r.max_arity = std::stoi(f[12]);
        } catch (const std::exception&) {
            fail("malformed number");
        }
        if (f[13] == "true") {
            r.success = true;
        } else if (f[13] == "false") {
            r.success = false;
        } else {
            fail("success must be true/false");
        }
        try {
            r.wall_ms = std::stoull(f[14]);
        } catch (const std::exception&) {
            fail("malformed wall_ms");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

DistinguishingSequence provide_sequence(int ell, int t,
                                        const std::filesystem::path& cache_dir) {
    std::filesystem::create_directories(cache_dir);
    const std::filesystem::path path = sequence_path(cache_dir, ell, t);
    if (std::filesystem::exists(path)) {
        DistinguishingSequence seq = load_sequence(path);
        if (seq.ell != ell || seq.t() != t || !seq.verified) {
            throw InputError("cached sequence does not match request: " +
                             path.string());
        }
        return seq;
    }
    DistinguishingSequence seq;
    if (t == ell + 1) {
        seq = canonical_sequence(ell);
    } else if (t == ell) {
        seq = compact_sequence(ell);
    } else if (t < ell) {
        std::uint64_t s = 0x5eedULL;
        Rng rng(mix_seed(s, 17, static_cast<std::uint64_t>(ell),
                         static_cast<std::uint64_t>(t), 0));
        auto found = find_sequence(ell, t, 5000, rng);
        if (!found) {
            throw ConfigError("no verified sequence found for ell=" +
                              std::to_string(ell) + ", t=" + std::to_string(t));
        }
        seq = std::move(*found);
    } else {
        throw ConfigError("requested sequence longer than canonical");
    }
    if (!seq.verified) {
        throw ConfigError("constructed sequence failed verification (ell=" +
                          std::to_string(ell) + ")");
    }
    save_sequence(path, seq);
    return seq;
}

std::vector<SequenceCheck> verify_sequences(const std::vector<int>& ells,
                                            const std::filesystem::path& cache_dir) {
    std::vector<SequenceCheck> checks;
    for (int ell : ells) {
        SequenceCheck c;
        c.ell = ell;
        if (ell < 1) {
            c.skipped = true;
            c.note = "skipped: ell must be positive";
            checks.push_back(c);
            continue;
        }
        if (ell > kDefaultEnumerationLimit) {
            c.skipped = true;
            c.note = "skipped: ell exceeds the enumeration limit";
            checks.push_back(c);
            continue;
        }
        std::filesystem::create_directories(cache_dir);
        bool cached = false;
        for (int t : {ell, ell + 1}) {
            const auto path = sequence_path(cache_dir, ell, t);
            if (std::filesystem::exists(path)) {
                DistinguishingSequence seq = load_sequence(path);
                c.t = seq.t();
                c.ok = seq.verified;
                c.from_cache = true;
                c.note = "cached";
                cached = true;
                break;
            }
        }
        if (cached) {
            checks.push_back(c);
            continue;
        }
        // Prefer the shorter t = ell; random search first, then the
        // deterministic unit-basis construction, then canonical.
        Rng rng(mix_seed(0x5eedULL, 23, static_cast<std::uint64_t>(ell), 0, 0));
        std::optional<DistinguishingSequence> seq = find_sequence(ell, ell, 500, rng);
        std::string how = "random search";
        if (!seq) {
            seq = compact_sequence(ell);
            how = "unit-basis construction";
        }
        if (!seq->verified) {
            seq = canonical_sequence(ell);
            how = "canonical construction";
        }
        save_sequence(sequence_path(cache_dir, ell, seq->t()), *seq);
        c.t = seq->t();
        c.ok = seq->verified;
        c.note = how;
        checks.push_back(c);
    }
    return checks;
}

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
    try {
        if (config.algorithms.empty()) throw ConfigError("no algorithm selected");
        if (config.n_list.empty()) throw ConfigError("empty n list");
        if (config.kappa_list.empty()) throw ConfigError("empty kappa list");
        if (config.trials < 1) throw ConfigError("trials must be at least 1");
        if (config.jobs < 1) throw ConfigError("jobs must be at least 1");

        // Validate every combination and provision sequences before any run.
        std::vector<Task> prototypes;
        for (AlgorithmKind algo : config.algorithms) {
            for (int n : config.n_list) {
                for (int kappa : config.kappa_list) {
                    Task proto;
                    proto.algorithm = algo;
                    if (algo == AlgorithmKind::kAlg3) {
                        proto.params = Parameters::make(n, kappa, config.mode,
                                                        config.base_seed);
                        proto.params.strict = config.strict;
                        if (proto.params.ell() > kDefaultEnumerationLimit) {
                            throw ConfigError(
                                "kappa=" + std::to_string(kappa) +
                                " gives block length " +
                                std::to_string(proto.params.ell()) +
                                ", beyond the enumeration budget (kappa <= 4)");
                        }
                        proto.sequences.full = provide_sequence(
                            proto.params.ell(), proto.params.t, config.cache_dir);
                        if (proto.params.last_block_len() != 0) {
                            proto.sequences.last = provide_sequence(
                                proto.params.last_block_len(), proto.params.last_t(),
                                config.cache_dir);
                        }
                    } else {
                        proto.params.n = n;
                        proto.params.kappa = kappa;
                        proto.params.mode = config.mode;
                        proto.params.seed = config.base_seed;
                        proto.params.strict = config.strict;
                        if (algo == AlgorithmKind::kSampling && n > 24) {
                            throw ConfigError(
                                "sampling baseline is capped at n <= 24 (got n=" +
                                std::to_string(n) + ")");
                        }
                        if (algo == AlgorithmKind::kSampling && n < 2) {
                            throw ConfigError("sampling baseline needs n >= 2");
                        }
                    }
                    prototypes.push_back(std::move(proto));
                }
            }
        }

        std::vector<Task> tasks;
        tasks.reserve(prototypes.size() * static_cast<std::size_t>(config.trials));
        for (const Task& proto : prototypes) {
            for (int trial = 0; trial < config.trials; ++trial) {
                Task task = proto;
                task.trial = trial;
                task.row_index = tasks.size();
                tasks.push_back(std::move(task));
            }
        }

        std::vector<CsvRow> rows(tasks.size());
        std::atomic<std::size_t> next{0};
        std::atomic<bool> anomaly{false};
        std::vector<std::string> anomaly_messages;
        std::mutex anomaly_mutex;
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                try {
                    TaskResult result = execute(tasks[i]);
                    rows[i] = std::move(result.row);
                    if (result.anomaly) {
                        anomaly = true;
                        std::lock_guard<std::mutex> lock(anomaly_mutex);
                        anomaly_messages.push_back(result.note);
                    }
                } catch (const std::exception& e) {
                    anomaly = true;
                    std::lock_guard<std::mutex> lock(anomaly_mutex);
                    anomaly_messages.emplace_back(e.what());
                    rows[i].run_id = tasks[i].row_index;
                    rows[i].algorithm = algorithm_name(tasks[i].algorithm);
                    rows[i].n = tasks[i].params.n;
                    rows[i].kappa = tasks[i].params.kappa;
                    rows[i].mode = mode_name(tasks[i].params.mode);
                    rows[i].success = false;
                }
            }
        };
        const int thread_count =
            std::min<std::size_t>(static_cast<std::size_t>(config.jobs), tasks.size());
        std::vector<std::thread> pool;
        for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();

        // Atomic write: rows are already in deterministic (task) order.
        const std::filesystem::path tmp = config.out_path.string() + ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw ConfigError("cannot write " + tmp.string());
            out << csv_header() << '\n';
            for (const auto& row : rows) out << csv_line(row) << '\n';
        }
        std::filesystem::rename(tmp, config.out_path);
        log << "wrote " << rows.size() << " rows to " << config.out_path.string()
            << "\n";
        if (anomaly) {
            for (const auto& msg : anomaly_messages) log << "anomaly: " << msg << "\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
}

std::string summarize_csv(const std::filesystem::path& csv_path) {
    const std::vector<CsvRow> rows = parse_csv(csv_path);
    struct Group {
        std::uint64_t count = 0, success = 0, discrepancies = 0;
        std::uint64_t min_q = UINT64_MAX, max_q = 0, sum_q = 0;
        int max_arity = 0;
    };
    std::map<std::tuple<std::string, int, int>, Group> groups;
    for (const auto& r : rows) {
        Group& g = groups[{r.algorithm, r.n, r.kappa}];
        ++g.count;
        if (r.success) ++g.success;
        g.min_q = std::min(g.min_q, r.queries);
        g.max_q = std::max(g.max_q, r.queries);
        g.sum_q += r.queries;
        g.max_arity = std::max(g.max_arity, r.max_arity);
        if (r.algorithm == "alg3" && r.predicted_queries != 0 &&
            r.predicted_queries != r.queries) {
            ++g.discrepancies;
        }
    }
    std::ostringstream os;
    os << "algorithm  n  kappa  runs  success_rate  mean_queries  min  max  "
          "max_arity  predicted_mismatches\n";
    for (const auto& [key, g] : groups) {
        const auto& [algo, n, kappa] = key;
        os << algo << "  " << n << "  " << kappa << "  " << g.count << "  "
           << static_cast<double>(g.success) / static_cast<double>(g.count)
           << "  "
           << static_cast<double>(g.sum_q) / static_cast<double>(g.count) << "  "
           << g.min_q << "  " << g.max_q << "  " << g.max_arity << "  "
           << g.discrepancies << "\n";
    }
    return os.str();
}

}  // namespace ombb
