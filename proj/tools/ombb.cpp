// Batch driver for the OneMax black-box experiments: seed sweeps with CSV
// output, sequence-cache management, CSV summaries, and the operator
// unbiasedness audit.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "ombb/equivariance.hpp"
#include "ombb/errors.hpp"
#include "ombb/experiment.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(std::stoi(item));
    }
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OneMax black-box optimization lab"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run a seed sweep and write a CSV");
    std::string algo_list = "alg3";
    std::string n_list = "32";
    std::string kappa_list = "2";
    std::string mode = "desk";
    int trials = 10;
    std::uint64_t seed = 1;
    std::string out = "results.csv";
    std::string cache = "seqcache";
    bool no_strict = false;
    int jobs = 1;
    run->add_option("--algo", algo_list, "comma list: alg3,sampling,rls");
    run->add_option("--n", n_list, "comma list of problem sizes");
    run->add_option("--kappa", kappa_list, "comma list of kappa values");
    run->add_option("--mode", mode, "desk | paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    run->add_option("--trials", trials, "seeds per combination");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--out", out, "output CSV path");
    run->add_option("--cache", cache, "sequence cache directory");
    run->add_flag("--no-strict", no_strict, "disable strict fault mode");
    run->add_option("--jobs", jobs, "worker threads");

    // verify-seqs
    auto* verify = app.add_subcommand(
        "verify-seqs", "ensure verified sequences exist in the cache");
    std::string ell_list = "2,4,8";
    std::string verify_cache = "seqcache";
    verify->add_option("--ell", ell_list, "comma list of block lengths");
    verify->add_option("--cache", verify_cache, "sequence cache directory");

    // summarize
    auto* summarize = app.add_subcommand("summarize", "summarize a results CSV");
    std::string csv_path;
    summarize->add_option("csv", csv_path, "CSV file to summarize")->required();

    // audit
    auto* audit = app.add_subcommand(
        "audit", "run the operator unbiasedness (equivariance) suite");
    std::uint64_t audit_seed = 7;
    int audit_trials = 200;
    audit->add_option("--seed", audit_seed, "harness seed");
    audit->add_option("--trials", audit_trials, "automorphisms per sampled check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            ombb::ExperimentConfig config;
            for (const std::string& name : [&] {
                     std::vector<std::string> out_names;
                     std::string item;
                     std::stringstream ss(algo_list);
                     while (std::getline(ss, item, ','))
                         if (!item.empty()) out_names.push_back(item);
                     return out_names;
                 }()) {
                auto kind = ombb::parse_algorithm(name);
                if (!kind) {
                    std::cerr << "error: unknown algorithm '" << name << "'\n";
                    return 1;
                }
                config.algorithms.push_back(*kind);
            }
            config.n_list = parse_int_list(n_list);
            config.kappa_list = parse_int_list(kappa_list);
            config.mode = mode == "paper" ? ombb::Mode::kPaper : ombb::Mode::kDesk;
            config.trials = trials;
            config.base_seed = seed;
            config.out_path = out;
            config.cache_dir = cache;
            config.strict = !no_strict;
            config.jobs = jobs;
            return ombb::run_experiment(config, std::cerr);
        }
        if (verify->parsed()) {
            const auto checks =
                ombb::verify_sequences(parse_int_list(ell_list), verify_cache);
            bool all_ok = true;
            for (const auto& c : checks) {
                std::cout << "ell=" << c.ell;
                if (c.ok) {
                    std::cout << "  t=" << c.t << "  " << c.note << "\n";
                } else {
                    std::cout << "  " << c.note << "\n";
                    if (!c.skipped) all_ok = false;
                }
            }
            return all_ok ? 0 : 1;
        }
        if (summarize->parsed()) {
            std::cout << ombb::summarize_csv(csv_path);
            return 0;
        }
        if (audit->parsed()) {
            ombb::Rng rng(audit_seed);
            const auto reports = ombb::standard_equivariance_suite(rng, audit_trials);
            for (const auto& r : reports) {
                std::cout << ombb::render_report(r) << "\n";
            }
            const bool ok = ombb::suite_passed(reports);
            std::cout << (ok ? "suite: PASS" : "suite: FAIL") << "\n";
            return ok ? 0 : 2;
        }
    } catch (const ombb::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ombb::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
