#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "efcg/embedding.hpp"
#include "efcg/pool.hpp"
#include "efcg/serialization.hpp"
#include "efcg/types.hpp"

namespace efcg {

enum class RedundancyMode {
  AllMembers,  // candidate must be below threshold against every member
  SeedOnly,    // candidate is compared with the seed only
};

std::string_view redundancy_mode_name(RedundancyMode m);
std::optional<RedundancyMode> parse_redundancy_mode(std::string_view name);

struct ExpansionConfig {
  std::int64_t seed_count = 2000;
  std::int64_t retrieval_k = 1024;
  // Invented default; tune per encoder.
  double redundancy_threshold = 0.85;
  std::int64_t size_min = 10;
  std::int64_t size_max = 110;
  std::uint64_t rng_seed = 0;
  RedundancyMode redundancy_mode = RedundancyMode::AllMembers;
  bool soft_only_candidates = true;
  std::size_t max_workers = 1;
};

// Throws ConfigError.
void validate_expansion_config(const ExpansionConfig& cfg);

struct ExpansionOutcome {
  AttributeSet set;
  std::string seed_id;
  std::int64_t target_size = 0;
  bool reached_target = false;
  std::int64_t rejected_redundant = 0;
  bool exhausted = false;

  bool operator==(const ExpansionOutcome&) const = default;
};

// Grows a set from seed_id: correlation-ranked candidates are admitted
// greedily while their semantic similarity stays below the threshold.
// Throws UnknownSeed, MissingVector, OutOfRange (target_size outside
// [size_min, size_max]) or ConfigError.
ExpansionOutcome expand_one(std::string_view seed_id, const AttributePool& pool,
                            const VectorStore& store, const ExpansionConfig& cfg,
                            std::int64_t target_size);

// Soft attributes that have vectors in both spaces, in pool order.
std::vector<std::string> eligible_seeds(const AttributePool& pool, const VectorStore& store);

struct SeedDraw {
  std::size_t eligible_index = 0;
  std::int64_t target_size = 0;
};

// seed_count seeds without replacement from [0, eligible_count), each
// followed by its target size, all from one stream seeded with rng_seed.
// Throws PoolTooSmall.
std::vector<SeedDraw> draw_seeds(std::size_t eligible_count, const ExpansionConfig& cfg);

// Outcomes in seed-draw order. Throws PoolTooSmall and anything expand_one
// throws.
std::vector<ExpansionOutcome> expand_batch(const AttributePool& pool, const VectorStore& store,
                                           const ExpansionConfig& cfg);

struct ExpansionStats {
  std::int64_t sets = 0;
  std::int64_t reached_target = 0;
  std::int64_t exhausted = 0;
  std::int64_t rejected_redundant = 0;
  std::map<std::int64_t, std::int64_t> size_histogram;
  std::map<std::int64_t, std::int64_t> target_histogram;
};

ExpansionStats summarize(const std::vector<ExpansionOutcome>& outcomes);
json expansion_stats_to_json(const ExpansionStats& stats, const ExpansionConfig& cfg);
json expansion_outcome_to_json(const ExpansionOutcome& o);

}  // namespace efcg
