#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ombb/bitstring.hpp"
#include "ombb/rng.hpp"

namespace ombb {

/// Outcome of one equivariance check. For deterministic operators the check
/// is alpha(op(inputs)) == op(alpha(inputs)); for randomized ones it is
/// support(op | alpha(inputs)) == alpha-image of support(op | inputs),
/// which implies distribution equality because every operator here is
/// uniform over its support.
struct EquivarianceReport {
    std::string op_name;
    int checks = 0;
    bool passed = true;
    bool must_fail = false;  // set for planted mutants
    std::string failure_detail;
};

using DeterministicOp = std::function<BitString(const std::vector<BitString>&)>;
using SupportFn =
    std::function<std::vector<BitString>(const std::vector<BitString>&)>;

/// Visits every Hamming-automorphism of {0,1}^n (n! * 2^n of them).
void for_each_automorphism(int n, const std::function<bool(const Automorphism&)>& visit);

EquivarianceReport check_deterministic_exhaustive(const std::string& name,
                                                  const DeterministicOp& op,
                                                  const std::vector<BitString>& inputs);

EquivarianceReport check_deterministic_sampled(const std::string& name,
                                               const DeterministicOp& op,
                                               const std::vector<BitString>& inputs,
                                               int trials, Rng& rng);

EquivarianceReport check_support_sampled(const std::string& name,
                                         const SupportFn& support,
                                         const std::vector<BitString>& inputs,
                                         int trials, Rng& rng);

/// Runs every variation operator through the harness on honestly
/// constructed frames, plus a deliberately biased mutant that must fail.
/// Deterministic frame-free operators are checked exhaustively at n <= 6;
/// frame operators get exhaustive small-frame checks and sampled checks on
/// richer geometry.
std::vector<EquivarianceReport> standard_equivariance_suite(Rng& rng,
                                                            int sampled_trials = 200);

/// True iff every genuine operator passed and every planted mutant failed.
bool suite_passed(const std::vector<EquivarianceReport>& reports);

std::string render_report(const EquivarianceReport& report);

}  // namespace ombb
