#include <doctest.h>

#include "ombb/oracle.hpp"

using namespace ombb;

TEST_CASE("oracle evaluates and counts") {
    Oracle oracle(BitString::parse("0110"));
    CHECK(oracle.length() == 4);
    CHECK(oracle.query(BitString::parse("1111")) == 2);
    CHECK(oracle.query(BitString::parse("0110")) == 4);
    CHECK(oracle.query(BitString::parse("0000")) == 2);
    const QueryLedger ledger = oracle.report();
    CHECK(ledger.count == 3);
    CHECK(ledger.first_hit == 2);
    CHECK(ledger.history.size() == 3);
    CHECK(ledger.history[1].second == 4);
}

TEST_CASE("fresh oracle has an empty ledger") {
    Oracle oracle(BitString::parse("10"));
    const QueryLedger ledger = oracle.report();
    CHECK(ledger.count == 0);
    CHECK_FALSE(ledger.first_hit.has_value());
    CHECK(ledger.history.empty());
}

TEST_CASE("first hit is write-once and points at a full-fitness entry") {
    Oracle oracle(BitString::parse("11"));
    oracle.query(BitString::parse("00"));
    oracle.query(BitString::parse("11"));
    oracle.query(BitString::parse("11"));
    const QueryLedger ledger = oracle.report();
    CHECK(ledger.first_hit == 2);
    CHECK(ledger.history[*ledger.first_hit - 1].second == 2);
    for (std::size_t i = 0; i + 1 < *ledger.first_hit; ++i) {
        CHECK(ledger.history[i].second < 2);
    }
}

TEST_CASE("seeded targets are reproducible") {
    const Oracle a = Oracle::with_random_target(32, 424242);
    const Oracle b = Oracle::with_random_target(32, 424242);
    CHECK(WhiteBox::target(a) == WhiteBox::target(b));
}

TEST_CASE("distinct seeds give distinct targets") {
    int collisions = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Oracle a = Oracle::with_random_target(32, 2 * s);
        const Oracle b = Oracle::with_random_target(32, 2 * s + 1);
        if (WhiteBox::target(a) == WhiteBox::target(b)) ++collisions;
    }
    CHECK(collisions == 0);
}

TEST_CASE("count-only retention skips history") {
    Oracle oracle(BitString::parse("01"), HistoryRetention::kCountOnly);
    oracle.query(BitString::parse("01"));
    const QueryLedger ledger = oracle.report();
    CHECK(ledger.count == 1);
    CHECK(ledger.first_hit == 1);
    CHECK(ledger.history.empty());
}
