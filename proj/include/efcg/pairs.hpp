#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "efcg/llm.hpp"
#include "efcg/rational.hpp"
#include "efcg/serialization.hpp"
#include "efcg/types.hpp"
#include "efcg/verifier.hpp"

namespace efcg {

struct PairConfig {
  std::int64_t k_candidates = 4;
  double min_margin = 0.0;
  std::size_t max_inflight = 4;
  // Send candidate_seed(set id, index) with each generation request.
  bool candidate_seeds = true;
  VerifierOptions verifier;
};

// Sampling seed for candidate `index` of a set, in [0, 2^31).
std::int64_t candidate_seed(std::string_view set_id, std::int64_t index);

// Throws ConfigError.
void validate_pair_config(const PairConfig& cfg);

// Judge scores for the soft attributes of one response, in order. A reply
// with the wrong number of scores is retried once with a repair
// instruction; failures after that, or client errors, throw JudgeError.
std::vector<bool> judge_soft(ChatModel& judge, std::string_view text,
                             const std::vector<Attribute>& soft);

// Hard score: macro accuracy over the set's hard constraints. Soft score:
// fraction of soft attributes the judge accepts. Throws DegenerateSet when
// the set lacks hard or soft attributes, and JudgeError.
ScoredResponse score_response(const AttributeSet& set, std::string_view text, ChatModel& judge,
                              const VerifierOptions& opts = {});

// Candidate indices best first: combined score, then hard score, both
// descending, then index ascending.
std::vector<std::size_t> rank_candidates(const std::vector<ScoredResponse>& candidates);

struct PreferencePair {
  std::string set_id;
  std::string prompt;
  ScoredResponse chosen;
  ScoredResponse rejected;
  Rational margin;
  std::size_t chosen_index = 0;
  std::size_t rejected_index = 0;
};

enum class SkipReason { ZeroMargin, BelowMinMargin };
std::string_view skip_reason_name(SkipReason r);

struct PairOutcome {
  std::string set_id;
  std::optional<PreferencePair> pair;
  std::optional<SkipReason> skipped;
  Rational best_margin;  // chosen minus rejected, also for skipped sets
};

// Picks chosen/rejected among already scored candidates.
PairOutcome select_pair(std::string set_id, std::string prompt,
                        std::vector<ScoredResponse> candidates, const PairConfig& cfg);

// Generates k_candidates responses to the same prompt, scores them and
// selects a pair. Throws DegenerateSet, GeneratorError or JudgeError.
PairOutcome build_pair(const AttributeSet& set, ChatModel& generator, ChatModel& judge,
                       const PairConfig& cfg);

// Runs sets with at most max_inflight in progress; outcomes keep input order.
std::vector<PairOutcome> build_pairs(const std::vector<AttributeSet>& sets, ChatModel& generator,
                                     ChatModel& judge, const PairConfig& cfg);

// {set_id, prompt, chosen, rejected, margin}.
json preference_pair_to_json(const PreferencePair& p);
// {set_id, reason, margin} for a skipped set.
json skipped_pair_to_json(const PairOutcome& o);

}  // namespace efcg
