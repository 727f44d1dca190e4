#include "efcg/expansion.hpp"

#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "efcg/error.hpp"
#include "efcg/parallel.hpp"
#include "efcg/random.hpp"

namespace efcg {

std::string_view redundancy_mode_name(RedundancyMode m) {
  return m == RedundancyMode::AllMembers ? "all_members" : "seed_only";
}

std::optional<RedundancyMode> parse_redundancy_mode(std::string_view name) {
  if (name == "all_members") return RedundancyMode::AllMembers;
  if (name == "seed_only") return RedundancyMode::SeedOnly;
  return std::nullopt;
}

void validate_expansion_config(const ExpansionConfig& cfg) {
  auto fail = [](std::string msg) { throw Error(ErrorCode::ConfigError, std::move(msg)); };
  if (cfg.seed_count < 1) fail(fmt::format("expansion.seed_count must be >= 1, got {}", cfg.seed_count));
  if (cfg.retrieval_k < 1) fail(fmt::format("expansion.retrieval_k must be >= 1, got {}", cfg.retrieval_k));
  if (!(cfg.redundancy_threshold > 0.0 && cfg.redundancy_threshold <= 1.0)) {
    fail(fmt::format("expansion.redundancy_threshold must be in (0, 1], got {}",
                     cfg.redundancy_threshold));
  }
  if (cfg.size_min < 1) fail(fmt::format("expansion.size_min must be >= 1, got {}", cfg.size_min));
  if (cfg.size_max < cfg.size_min) {
    fail(fmt::format("expansion.size_max ({}) must be >= size_min ({})", cfg.size_max, cfg.size_min));
  }
}

namespace {

void require_vectors(const VectorStore& store, std::string_view id) {
  for (Space s : {Space::Correlation, Space::Semantic}) {
    if (!store.contains(id, s)) {
      throw Error(ErrorCode::MissingVector, fmt::format("'{}' has no {} vector", id, space_name(s)));
    }
  }
}

}  // namespace

ExpansionOutcome expand_one(std::string_view seed_id, const AttributePool& pool,
                            const VectorStore& store, const ExpansionConfig& cfg,
                            std::int64_t target_size) {
  validate_expansion_config(cfg);
  const Attribute* seed = pool.find(seed_id);
  if (seed == nullptr) throw Error(ErrorCode::UnknownSeed, fmt::format("seed '{}' not in pool", seed_id));
  require_vectors(store, seed_id);
  if (target_size < cfg.size_min || target_size > cfg.size_max) {
    throw Error(ErrorCode::OutOfRange, fmt::format("target size {} outside [{}, {}]", target_size,
                                                   cfg.size_min, cfg.size_max));
  }

  ExpansionOutcome out;
  out.seed_id = std::string(seed_id);
  out.target_size = target_size;
  out.set.id = fmt::format("set-{}", seed_id);
  out.set.target_size = target_size;
  out.set.attributes.push_back(*seed);

  const auto target = static_cast<std::size_t>(target_size);
  const auto candidates =
      store.top_k(seed_id, static_cast<std::size_t>(cfg.retrieval_k), Space::Correlation);
  std::size_t next = 0;
  for (; next < candidates.size() && out.set.attributes.size() < target; ++next) {
    const auto& id = candidates[next].id;
    const Attribute* cand = pool.find(id);
    if (cand == nullptr) continue;
    if (cfg.soft_only_candidates && !cand->is_soft()) continue;
    if (!store.contains(id, Space::Semantic)) {
      throw Error(ErrorCode::MissingVector, fmt::format("candidate '{}' has no semantic vector", id));
    }
    bool redundant = false;
    if (cfg.redundancy_mode == RedundancyMode::SeedOnly) {
      redundant = store.similarity(id, seed_id, Space::Semantic) >= cfg.redundancy_threshold;
    } else {
      for (const auto& member : out.set.attributes) {
        if (store.similarity(id, member.id, Space::Semantic) >= cfg.redundancy_threshold) {
          redundant = true;
          break;
        }
      }
    }
    if (redundant) {
      ++out.rejected_redundant;
    } else {
      out.set.attributes.push_back(*cand);
    }
  }
  out.reached_target = out.set.attributes.size() == target;
  out.exhausted = !out.reached_target;
  return out;
}

std::vector<std::string> eligible_seeds(const AttributePool& pool, const VectorStore& store) {
  std::vector<std::string> out;
  for (const auto& a : pool.attributes()) {
    if (a.is_soft() && store.contains(a.id, Space::Semantic) &&
        store.contains(a.id, Space::Correlation)) {
      out.push_back(a.id);
    }
  }
  return out;
}

std::vector<SeedDraw> draw_seeds(std::size_t eligible_count, const ExpansionConfig& cfg) {
  validate_expansion_config(cfg);
  const auto count = static_cast<std::size_t>(cfg.seed_count);
  if (eligible_count < count) {
    throw Error(ErrorCode::PoolTooSmall,
                fmt::format("{} seeds requested but only {} eligible soft attributes", count,
                            eligible_count));
  }
  Rng rng(cfg.rng_seed);
  // Partial Fisher-Yates over the index range.
  std::vector<std::size_t> order(eligible_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<SeedDraw> draws;
  draws.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(rng, eligible_count - i));
    std::swap(order[i], order[j]);
    draws.push_back({order[i], uniform_between(rng, cfg.size_min, cfg.size_max)});
  }
  return draws;
}

std::vector<ExpansionOutcome> expand_batch(const AttributePool& pool, const VectorStore& store,
                                           const ExpansionConfig& cfg) {
  const auto eligible = eligible_seeds(pool, store);
  const auto draws = draw_seeds(eligible.size(), cfg);
  std::vector<ExpansionOutcome> outcomes(draws.size());
  parallel_for(draws.size(), cfg.max_workers, [&](std::size_t i) {
    outcomes[i] = expand_one(eligible[draws[i].eligible_index], pool, store, cfg, draws[i].target_size);
  });
  const auto stats = summarize(outcomes);
  spdlog::info("expanded {} sets: {} reached target, {} exhausted, {} redundant rejections",
               stats.sets, stats.reached_target, stats.exhausted, stats.rejected_redundant);
  return outcomes;
}

ExpansionStats summarize(const std::vector<ExpansionOutcome>& outcomes) {
  ExpansionStats s;
  for (const auto& o : outcomes) {
    ++s.sets;
    s.reached_target += o.reached_target ? 1 : 0;
    s.exhausted += o.exhausted ? 1 : 0;
    s.rejected_redundant += o.rejected_redundant;
    ++s.size_histogram[static_cast<std::int64_t>(o.set.attributes.size())];
    ++s.target_histogram[o.target_size];
  }
  return s;
}

json expansion_stats_to_json(const ExpansionStats& stats, const ExpansionConfig& cfg) {
  auto histogram = [](const std::map<std::int64_t, std::int64_t>& h) {
    json j = json::object();
    for (const auto& [size, n] : h) j[std::to_string(size)] = n;
    return j;
  };
  return {
      {"sets", stats.sets},
      {"reached_target", stats.reached_target},
      {"exhausted", stats.exhausted},
      {"rejected_redundant", stats.rejected_redundant},
      {"size_histogram", histogram(stats.size_histogram)},
      {"target_histogram", histogram(stats.target_histogram)},
      {"config",
       {{"seed_count", cfg.seed_count},
        {"retrieval_k", cfg.retrieval_k},
        {"redundancy_threshold", cfg.redundancy_threshold},
        {"redundancy_mode", redundancy_mode_name(cfg.redundancy_mode)},
        {"size_min", cfg.size_min},
        {"size_max", cfg.size_max},
        {"rng_seed", cfg.rng_seed},
        {"soft_only_candidates", cfg.soft_only_candidates}}},
  };
}

json expansion_outcome_to_json(const ExpansionOutcome& o) {
  return {{"set", attribute_set_to_json(o.set)},
          {"seed_id", o.seed_id},
          {"target_size", o.target_size},
          {"reached_target", o.reached_target},
          {"rejected_redundant", o.rejected_redundant},
          {"exhausted", o.exhausted}};
}

}  // namespace efcg
