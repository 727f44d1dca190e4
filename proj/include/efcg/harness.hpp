#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "efcg/embedding.hpp"
#include "efcg/expansion.hpp"
#include "efcg/llm.hpp"
#include "efcg/pool.hpp"
#include "efcg/rational.hpp"
#include "efcg/serialization.hpp"
#include "efcg/types.hpp"
#include "efcg/verifier.hpp"

namespace efcg {

// Position bias: a probe constraint is moved through the hard-attribute list
// of each set and its satisfaction rate is measured per position.

struct PositionBiasConfig {
  // Relative positions in [0, 1]; the probe goes to index round(f * n_hard)
  // of the hard-attribute sublist. Ignored when indices is nonempty.
  std::vector<double> fractions = {0.0, 0.25, 0.5, 0.75, 1.0};
  // Absolute insertion indices into the hard-attribute sublist.
  std::vector<std::int64_t> indices;
  std::size_t samples = 1;  // generations per (set, position)
  std::size_t max_inflight = 4;
  bool best_effort = false;  // drop failed cells instead of failing the run
  VerifierOptions verifier;
};

struct PositionBucket {
  double position_fraction = 0.0;  // mean realized fraction in index mode
  std::optional<std::int64_t> position_index;
  std::int64_t n = 0;
  std::int64_t satisfied = 0;
  Rational hard_score;
};

struct PositionBiasReport {
  std::string probe_type;
  std::string probe_instruction;
  std::vector<PositionBucket> buckets;
  std::int64_t failed_cells = 0;
  std::size_t samples = 1;
};

inline constexpr std::string_view kProbeId = "probe";

// Copy of set with the probe inserted before the hard attribute at
// hard_index (after the last one when hard_index == hard count). Throws
// PositionOutOfRange.
AttributeSet insert_probe(const AttributeSet& set, const HardConstraint& probe,
                          std::int64_t hard_index);

// Throws PositionOutOfRange, EmptyInput or GeneratorError.
PositionBiasReport run_position_bias(const std::vector<AttributeSet>& sets,
                                     const HardConstraint& probe, const PositionBiasConfig& cfg,
                                     ChatModel& generator);

json position_bias_to_json(const PositionBiasReport& r);
std::string position_bias_to_csv(const PositionBiasReport& r);

// Attribute-count tradeoff sweep.

enum class CsrMode {
  Micro,       // satisfied / total over all attributes of an instruction
  SplitMacro,  // mean of the hard rate and the soft rate
};
std::string_view csr_mode_name(CsrMode m);
std::optional<CsrMode> parse_csr_mode(std::string_view name);

// Optional quality score for one generated response.
using QualityScorer =
    std::function<std::optional<double>(const AttributeSet& set, const std::string& response)>;

// Token-level F1 of normalized words. This is a lexical overlap score, not
// BERTScore.
double token_f1(std::string_view candidate, std::string_view reference);

// Scores against the source document of the set's seed (its first
// attribute), looked up by source_doc id.
QualityScorer token_f1_scorer(std::map<std::string, std::string> documents);

// Looks up precomputed scores by set id.
QualityScorer external_scorer(std::map<std::string, double> by_set_id);

struct TradeoffConfig {
  std::vector<std::int64_t> counts = {10, 20, 30, 40, 50};
  std::int64_t per_count_sets = 20;
  ExpansionConfig expansion;  // size bounds and seed_count are overridden
  CsrMode csr_mode = CsrMode::Micro;
  std::size_t max_inflight = 4;
  bool best_effort = false;
  std::string label = "default";
  std::string quality_metric = "token_f1 (not BERTScore)";
  VerifierOptions verifier;
};

struct TradeoffPoint {
  std::int64_t n_attributes = 0;
  std::int64_t sets = 0;
  Rational csr;
  std::optional<double> quality;
  std::int64_t failed_cells = 0;
};

struct TradeoffReport {
  std::string label;
  CsrMode csr_mode = CsrMode::Micro;
  std::string quality_metric;
  std::vector<TradeoffPoint> points;
};

// Sets of exactly c attributes for each count c, expanded from seeds in
// seeded draw order. Throws PoolTooSmall when fewer than per_count_sets
// seeds reach size c.
std::vector<AttributeSet> tradeoff_sets(const AttributePool& pool, const VectorStore& store,
                                        const TradeoffConfig& cfg, std::int64_t count);

// Throws PoolTooSmall, ConfigError, GeneratorError or JudgeError. The judge
// is only called for sets with soft attributes.
TradeoffReport run_tradeoff(const AttributePool& pool, const VectorStore& store,
                            const TradeoffConfig& cfg, ChatModel& generator, ChatModel& judge,
                            const QualityScorer& quality = {});

json tradeoff_to_json(const TradeoffReport& r);
std::string tradeoff_to_csv(const TradeoffReport& r);

}  // namespace efcg
