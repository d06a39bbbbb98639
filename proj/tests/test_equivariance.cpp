#include <doctest.h>

#include "ombb/equivariance.hpp"
#include "ombb/errors.hpp"
#include "ombb/operators.hpp"

using namespace ombb;

TEST_CASE("identity automorphism always passes") {
    Rng rng(71);
    const DeterministicOp op = [](const std::vector<BitString>& in) {
        return complement(in.at(0));
    };
    EquivarianceReport r =
        check_deterministic_sampled("complement", op, {BitString::random(8, rng)}, 0, rng);
    CHECK(r.passed);
    CHECK(r.checks == 1);  // just the identity
}

TEST_CASE("complement passes 200 random automorphisms at n=10") {
    Rng rng(73);
    const DeterministicOp op = [](const std::vector<BitString>& in) {
        return complement(in.at(0));
    };
    EquivarianceReport r = check_deterministic_sampled(
        "complement", op, {BitString::random(10, rng)}, 200, rng);
    CHECK(r.passed);
    CHECK(r.checks == 201);
}

TEST_CASE("the planted biased operator fails with a counterexample") {
    Rng rng(79);
    const DeterministicOp mutant = [](const std::vector<BitString>& in) {
        return in.at(0) ^ BitString::unit(in.at(0).length(), 1);
    };
    EquivarianceReport r = check_deterministic_exhaustive(
        "flip_first", mutant, {BitString::random(6, rng)});
    CHECK_FALSE(r.passed);
    CHECK_FALSE(r.failure_detail.empty());
}

TEST_CASE("oversized inputs hit the enumeration budget") {
    Rng rng(89);
    const DeterministicOp op = [](const std::vector<BitString>& in) {
        return complement(in.at(0));
    };
    CHECK_THROWS_AS(
        check_deterministic_exhaustive("c", op, {BitString::random(12, rng)}),
        BudgetError);
    const SupportFn support = [](const std::vector<BitString>& in) {
        return std::vector<BitString>{in.at(0)};
    };
    CHECK_THROWS_AS(
        check_support_sampled("s", support, {BitString::random(20, rng)}, 1, rng),
        BudgetError);
}

TEST_CASE("automorphism iteration covers n! * 2^n maps") {
    int count = 0;
    for_each_automorphism(3, [&](const Automorphism&) {
        ++count;
        return true;
    });
    CHECK(count == 6 * 8);
}

TEST_CASE("standard suite: genuine operators pass, mutant is caught") {
    Rng rng(83);
    const auto reports = standard_equivariance_suite(rng, 60);
    for (const auto& r : reports) {
        INFO(render_report(r));
        if (r.must_fail) {
            CHECK_FALSE(r.passed);
        } else {
            CHECK(r.passed);
        }
    }
    CHECK(suite_passed(reports));
}
