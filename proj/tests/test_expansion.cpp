#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "efcg/error.hpp"
#include "efcg/expansion.hpp"
#include "support/expansion_oracle.hpp"

using namespace efcg;
using namespace efcg::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an efcg::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("expand_one: lone seed is exhausted immediately") {
  Fixture f({{"s", {1, 0}, {1, 0}}});
  const auto o = expand_one("s", f.pool, f.store, small_config(0.85, 1, 5), 5);
  CHECK(ids_of(o.set) == std::vector<std::string>{"s"});
  CHECK(o.exhausted);
  CHECK_FALSE(o.reached_target);
  CHECK(o.rejected_redundant == 0);
  CHECK(o.set.target_size == 5);
}

TEST_CASE("expand_one: duplicates of the seed are all rejected") {
  Fixture f({{"s", {1, 2}, {3, 1}}, {"d1", {1, 2.1}, {3, 1}}, {"d2", {1, 1.9}, {6, 2}},
             {"d3", {2, 4}, {3, 1}}});
  const auto o = expand_one("s", f.pool, f.store, small_config(0.85, 2, 4), 4);
  CHECK(ids_of(o.set) == std::vector<std::string>{"s"});
  CHECK(o.rejected_redundant == 3);
  CHECK(o.exhausted);
}

TEST_CASE("expand_one: six 2-D vectors against the brute-force greedy oracle") {
  // Correlation angles set the visiting order; semantic angles set redundancy.
  // cos(25 deg) = 0.906 is redundant at 0.9, cos(26 deg) = 0.899 is not.
  Fixture f({{"s", unit(0), unit(0)},
             {"b", unit(5), unit(20)},
             {"c", unit(10), unit(50)},
             {"d", unit(15), unit(60)},
             {"e", unit(20), unit(-30)},
             {"g", unit(40), unit(100)}});
  const auto o = expand_one("s", f.pool, f.store, small_config(0.9, 1, 10), 4);
  const auto expected = oracle_expand(f.rows, "s", 1024, 0.9, 4, false);
  CHECK(ids_of(o.set) == expected);
  CHECK(expected == std::vector<std::string>{"s", "c", "e", "g"});
  CHECK(o.rejected_redundant == 2);
  CHECK(o.reached_target);
  CHECK_FALSE(o.exhausted);

  auto seed_only = small_config(0.9, 1, 10);
  seed_only.redundancy_mode = RedundancyMode::SeedOnly;
  const auto so = expand_one("s", f.pool, f.store, seed_only, 4);
  CHECK(ids_of(so.set) == oracle_expand(f.rows, "s", 1024, 0.9, 4, true));
  CHECK(ids_of(so.set) == std::vector<std::string>{"s", "c", "d", "e"});
}

TEST_CASE("expand_one: errors") {
  Fixture f({{"s", {1, 0}, {1, 0}}, {"t", {0, 1}, {0, 1}}});
  f.pool.add(Attribute::soft("novec", "x"));
  f.store.add("corr_only", {{1, 1}, Space::Correlation});
  f.pool.add(Attribute::soft("corr_only", "y"));
  const auto cfg = small_config(0.85, 1, 5);
  CHECK(code_of([&] { expand_one("missing", f.pool, f.store, cfg, 2); }) == ErrorCode::UnknownSeed);
  CHECK(code_of([&] { expand_one("novec", f.pool, f.store, cfg, 2); }) == ErrorCode::MissingVector);
  CHECK(code_of([&] { expand_one("s", f.pool, f.store, cfg, 5); }) == ErrorCode::MissingVector);
  CHECK(code_of([&] { expand_one("s", f.pool, f.store, cfg, 6); }) == ErrorCode::OutOfRange);
  auto bad = cfg;
  bad.redundancy_threshold = 0;
  CHECK(code_of([&] { expand_one("s", f.pool, f.store, bad, 2); }) == ErrorCode::ConfigError);
  bad = cfg;
  bad.size_max = 0;
  CHECK(code_of([&] { validate_expansion_config(bad); }) == ErrorCode::ConfigError);
}

TEST_CASE("expand_one: soft-only flag controls hard candidates") {
  Fixture f({{"s", unit(0), unit(0)}, {"h", unit(5), unit(90), true}, {"t", unit(10), unit(-90)}});
  auto cfg = small_config(0.85, 1, 3);
  CHECK(ids_of(expand_one("s", f.pool, f.store, cfg, 3).set) == std::vector<std::string>{"s", "t"});
  cfg.soft_only_candidates = false;
  CHECK(ids_of(expand_one("s", f.pool, f.store, cfg, 3).set) ==
        std::vector<std::string>{"s", "h", "t"});
}

TEST_CASE("property: expansion matches the oracle and keeps its invariants") {
  std::mt19937_64 rng(404);
  for (int iter = 0; iter < 60; ++iter) {
    auto f = random_fixture(rng, 10 + rng() % 50, 2 + rng() % 6);
    auto cfg = small_config(0.3 + 0.6 * static_cast<double>(rng() % 100) / 100, 1, 30);
    cfg.retrieval_k = 1 + static_cast<std::int64_t>(rng() % 40);
    cfg.redundancy_mode = rng() % 2 ? RedundancyMode::SeedOnly : RedundancyMode::AllMembers;
    for (const auto& row : f.rows) {
      if (row.hard) continue;
      const auto target = 1 + static_cast<std::int64_t>(rng() % 30);
      const auto o = expand_one(row.id, f.pool, f.store, cfg, target);
      const auto ids = ids_of(o.set);
      CHECK(ids == oracle_expand(f.rows, row.id, static_cast<std::size_t>(cfg.retrieval_k),
                                 cfg.redundancy_threshold, static_cast<std::size_t>(target),
                                 cfg.redundancy_mode == RedundancyMode::SeedOnly));
      CHECK(ids.front() == row.id);
      CHECK(static_cast<std::int64_t>(ids.size()) <= target);
      CHECK(o.reached_target == (static_cast<std::int64_t>(ids.size()) == target));

      const auto top = f.store.top_k(row.id, static_cast<std::size_t>(cfg.retrieval_k),
                                     Space::Correlation);
      // Coherence and greedy dominance: members follow the ranked list in order.
      std::size_t pos = 0;
      for (std::size_t m = 1; m < ids.size(); ++m) {
        while (pos < top.size() && top[pos].id != ids[m]) ++pos;
        CHECK(pos < top.size());
        ++pos;
      }
      if (cfg.redundancy_mode == RedundancyMode::AllMembers) {
        for (std::size_t a = 0; a < ids.size(); ++a) {
          for (std::size_t b = a + 1; b < ids.size(); ++b) {
            CHECK(f.store.similarity(ids[a], ids[b], Space::Semantic) < cfg.redundancy_threshold);
          }
        }
      }
      auto unfiltered = cfg;
      unfiltered.redundancy_threshold = 1.0;
      CHECK(expand_one(row.id, f.pool, f.store, unfiltered, target).set.attributes.size() >=
            ids.size());
    }
  }
}

TEST_CASE("draw_seeds: without replacement and reproducible") {
  ExpansionConfig cfg;
  cfg.seed_count = 50;
  cfg.rng_seed = 9;
  const auto a = draw_seeds(50, cfg);
  std::set<std::size_t> seen;
  for (const auto& d : a) {
    seen.insert(d.eligible_index);
    CHECK(d.target_size >= 10);
    CHECK(d.target_size <= 110);
  }
  CHECK(seen.size() == 50);
  const auto b = draw_seeds(50, cfg);
  CHECK(std::equal(a.begin(), a.end(), b.begin(), [](const SeedDraw& x, const SeedDraw& y) {
    return x.eligible_index == y.eligible_index && x.target_size == y.target_size;
  }));
  cfg.rng_seed = 10;
  const auto c = draw_seeds(50, cfg);
  CHECK_FALSE(std::equal(a.begin(), a.end(), c.begin(), [](const SeedDraw& x, const SeedDraw& y) {
    return x.eligible_index == y.eligible_index;
  }));
  CHECK(code_of([&] { draw_seeds(49, cfg); }) == ErrorCode::PoolTooSmall);
}

TEST_CASE("draw_seeds: target sizes pass a chi-square uniformity test") {
  ExpansionConfig cfg;
  cfg.seed_count = 20000;
  cfg.rng_seed = 12345;
  const auto draws = draw_seeds(20000, cfg);
  std::vector<double> counts(101, 0.0);
  for (const auto& d : draws) counts[static_cast<std::size_t>(d.target_size - 10)] += 1;
  const double expected = 20000.0 / 101;
  double stat = 0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(100), stat));
  INFO("chi2=" << stat << " p=" << p);
  CHECK(p > 0.01);
}

TEST_CASE("expand_batch: determinism, full coverage and degenerate size range") {
  std::mt19937_64 rng(77);
  auto f = random_fixture(rng, 80, 4);
  const auto eligible = eligible_seeds(f.pool, f.store);
  ExpansionConfig cfg;
  cfg.seed_count = static_cast<std::int64_t>(eligible.size());
  cfg.retrieval_k = 30;
  cfg.size_min = cfg.size_max = 10;
  cfg.redundancy_threshold = 0.6;
  cfg.rng_seed = 1;
  const auto one = expand_batch(f.pool, f.store, cfg);
  cfg.max_workers = 4;
  const auto two = expand_batch(f.pool, f.store, cfg);
  CHECK(one == two);
  std::vector<json> j1, j2;
  for (const auto& o : one) j1.push_back(expansion_outcome_to_json(o));
  for (const auto& o : two) j2.push_back(expansion_outcome_to_json(o));
  CHECK(json(j1).dump() == json(j2).dump());

  std::multiset<std::string> seeds;
  for (const auto& o : one) {
    seeds.insert(o.seed_id);
    if (o.reached_target) CHECK(o.set.attributes.size() == 10);
  }
  CHECK(seeds == std::multiset<std::string>(eligible.begin(), eligible.end()));

  const auto stats = summarize(one);
  CHECK(stats.sets == static_cast<std::int64_t>(one.size()));
  CHECK(stats.reached_target + stats.exhausted == stats.sets);
  CHECK(stats.target_histogram.at(10) == stats.sets);

  cfg.seed_count = static_cast<std::int64_t>(eligible.size()) + 1;
  CHECK(code_of([&] { expand_batch(f.pool, f.store, cfg); }) == ErrorCode::PoolTooSmall);
}
