#include <catch_amalgamated.hpp>

#include <set>
#include <string>

#include "synchro/state_set.hpp"
#include "synchro/util.hpp"

using namespace synchro;

TEST_CASE("StateSet basic operations") {
  StateSet s(100);
  REQUIRE(s.size() == 0);
  s.insert(0);
  s.insert(99);
  s.insert(64);
  REQUIRE(s.size() == 3);
  REQUIRE(s.test(0));
  REQUIRE(s.test(64));
  REQUIRE(s.test(99));
  REQUIRE_FALSE(s.test(1));
  s.insert(64);
  REQUIRE(s.size() == 3);
  s.erase(64);
  REQUIRE(s.size() == 2);
  REQUIRE(s.to_string() == "{0,99}");
}

TEST_CASE("StateSet universe and complement keep tail bits clear") {
  for (u32 n : {1u, 63u, 64u, 65u, 100u, 128u}) {
    StateSet u = StateSet::universe(n);
    REQUIRE(u.size() == n);
    REQUIRE(u.recompute_cardinality() == n);
    StateSet e = u;
    e.complement();
    REQUIRE(e.size() == 0);
    for (std::size_t i = 0; i < e.word_count(); ++i) REQUIRE(e.words()[i] == 0);
    StateSet one = StateSet::singleton(n, n - 1);
    one.complement();
    REQUIRE(one.size() == n - 1);
    REQUIRE_FALSE(one.test(n - 1));
  }
}

TEST_CASE("StateSet cardinality matches popcount on random sets") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const u32 n = 1 + static_cast<u32>(rng.below(130));
    StateSet s(n);
    std::set<u32> model;
    for (int ops = 0; ops < 50; ++ops) {
      const u32 q = static_cast<u32>(rng.below(n));
      if (rng.below(3) == 0) {
        s.erase(q);
        model.erase(q);
      } else {
        s.insert(q);
        model.insert(q);
      }
    }
    REQUIRE(s.size() == model.size());
    REQUIRE(s.recompute_cardinality() == model.size());
    for (u32 q = 0; q < n; ++q) REQUIRE(s.test(q) == (model.count(q) > 0));
  }
}

TEST_CASE("lex order matches characteristic-string comparison, bit 0 most significant") {
  const u32 n = 70;
  SplitMix64 rng(11);
  const auto as_string = [&](const StateSet& s) {
    std::string str(n, '0');
    s.for_each_state([&](u32 q) { str[q] = '1'; });
    return str;
  };
  for (int trial = 0; trial < 500; ++trial) {
    StateSet a(n), b(n);
    for (u32 q = 0; q < n; ++q) {
      if (rng.unit() < 0.5) a.insert(q);
      if (rng.unit() < 0.5) b.insert(q);
    }
    REQUIRE(a.lex_less(b) == (as_string(a) < as_string(b)));
  }
}

TEST_CASE("subset test against the definition") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const u32 n = 1 + static_cast<u32>(rng.below(90));
    StateSet a(n), b(n);
    for (u32 q = 0; q < n; ++q) {
      if (rng.unit() < 0.3) a.insert(q);
      if (rng.unit() < 0.6) b.insert(q);
    }
    bool expected = true;
    a.for_each_state([&](u32 q) { expected = expected && b.test(q); });
    REQUIRE(a.is_subset_of(b) == expected);
  }
}

TEST_CASE("for_each_state visits in ascending order") {
  StateSet s(130, {5, 0, 77, 129, 64, 63});
  std::vector<u32> seen;
  s.for_each_state([&](u32 q) { seen.push_back(q); });
  REQUIRE(seen == std::vector<u32>{0, 5, 63, 64, 77, 129});
  REQUIRE(s.first_state() == 0);
}
