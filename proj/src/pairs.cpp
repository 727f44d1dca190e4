#include "efcg/pairs.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "efcg/error.hpp"
#include "efcg/parallel.hpp"
#include "efcg/random.hpp"
#include "efcg/prompts.hpp"
#include "efcg/scoring.hpp"

namespace efcg {

void validate_pair_config(const PairConfig& cfg) {
  if (cfg.k_candidates < 2) {
    throw Error(ErrorCode::ConfigError,
                fmt::format("pairs.k_candidates must be >= 2, got {}", cfg.k_candidates));
  }
  if (!(cfg.min_margin >= 0.0)) {
    throw Error(ErrorCode::ConfigError, fmt::format("pairs.min_margin must be >= 0, got {}", cfg.min_margin));
  }
  if (cfg.max_inflight == 0) throw Error(ErrorCode::ConfigError, "pairs.max_inflight must be >= 1");
}

std::vector<bool> judge_soft(ChatModel& judge, std::string_view text,
                             const std::vector<Attribute>& soft) {
  const auto prompt = render_judge_prompt(text, soft);
  std::string reply;
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      reply = judge.complete(attempt == 0 ? prompt : prompt + judge_repair_instruction(soft.size()));
    } catch (const Error& e) {
      throw Error(ErrorCode::JudgeError, fmt::format("judge request failed: {}", e.what()));
    }
    try {
      return parse_judge_reply(reply, soft.size());
    } catch (const Error& e) {
      if (attempt == 1) throw Error(ErrorCode::JudgeError, fmt::format("unusable judge reply: {}", e.what()));
      spdlog::warn("retrying judge: {}", e.what());
    }
  }
  throw Error(ErrorCode::JudgeError, "unreachable");
}

ScoredResponse score_response(const AttributeSet& set, std::string_view text, ChatModel& judge,
                              const VerifierOptions& opts) {
  if (set.hard_count() == 0 || set.soft_count() == 0) {
    throw Error(ErrorCode::DegenerateSet,
                fmt::format("set '{}' needs hard and soft attributes ({} hard, {} soft)", set.id,
                            set.hard_count(), set.soft_count()));
  }
  const auto tokens = tokenize(std::string(text));
  std::vector<VerificationResult> hard_results;
  std::vector<std::pair<HardConstraint, VerificationResult>> typed;
  std::vector<Attribute> soft;
  for (const auto& a : set.attributes) {
    if (a.is_hard()) {
      hard_results.push_back(verify(a.constraint(), tokens, a.id, opts));
      typed.emplace_back(a.constraint(), hard_results.back());
    } else {
      soft.push_back(a);
    }
  }
  const auto scores = judge_soft(judge, text, soft);
  std::vector<VerificationResult> soft_results;
  for (std::size_t i = 0; i < soft.size(); ++i) {
    soft_results.push_back({soft[i].id, scores[i], scores[i] ? "judge score 1" : "judge score 0"});
  }
  return ScoredResponse(std::string(text), std::move(hard_results),
                        compute_macro(typed).macro_accuracy, std::move(soft_results));
}

std::vector<std::size_t> rank_candidates(const std::vector<ScoredResponse>& candidates) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = candidates[a];
    const auto& y = candidates[b];
    if (x.combined_score() != y.combined_score()) return x.combined_score() > y.combined_score();
    if (x.hard_score() != y.hard_score()) return x.hard_score() > y.hard_score();
    return a < b;
  });
  return order;
}

std::string_view skip_reason_name(SkipReason r) {
  return r == SkipReason::ZeroMargin ? "zero_margin" : "below_min_margin";
}

PairOutcome select_pair(std::string set_id, std::string prompt,
                        std::vector<ScoredResponse> candidates, const PairConfig& cfg) {
  if (candidates.size() < 2) {
    throw Error(ErrorCode::ConfigError, "at least two candidates are needed to form a pair");
  }
  const auto order = rank_candidates(candidates);
  const auto best = order.front();
  const auto worst = order.back();
  PairOutcome out;
  out.set_id = set_id;
  out.best_margin = candidates[best].combined_score() - candidates[worst].combined_score();
  if (out.best_margin == 0) {
    out.skipped = SkipReason::ZeroMargin;
  } else if (to_double(out.best_margin) < cfg.min_margin) {
    out.skipped = SkipReason::BelowMinMargin;
  } else {
    out.pair = PreferencePair{std::move(set_id), std::move(prompt), candidates[best],
                              candidates[worst], out.best_margin, best, worst};
  }
  return out;
}

std::int64_t candidate_seed(std::string_view set_id, std::int64_t index) {
  return static_cast<std::int64_t>(mix_seed(static_cast<std::uint64_t>(index), set_id) & 0x7FFFFFFFULL);
}

PairOutcome build_pair(const AttributeSet& set, ChatModel& generator, ChatModel& judge,
                       const PairConfig& cfg) {
  validate_pair_config(cfg);
  if (set.hard_count() == 0 || set.soft_count() == 0) {
    throw Error(ErrorCode::DegenerateSet,
                fmt::format("set '{}' needs hard and soft attributes ({} hard, {} soft)", set.id,
                            set.hard_count(), set.soft_count()));
  }
  const auto prompt = render_generation_prompt(set);
  std::vector<ScoredResponse> candidates;
  for (std::int64_t i = 0; i < cfg.k_candidates; ++i) {
    std::string text;
    try {
      CompletionOptions opts;
      if (cfg.candidate_seeds) opts.seed = candidate_seed(set.id, i);
      text = generator.complete(prompt, opts);
    } catch (const Error& e) {
      throw Error(ErrorCode::GeneratorError,
                  fmt::format("set '{}' candidate {}: {}", set.id, i, e.what()));
    }
    candidates.push_back(score_response(set, text, judge, cfg.verifier));
  }
  auto out = select_pair(set.id, prompt, std::move(candidates), cfg);
  if (out.skipped) {
    spdlog::info("set '{}' skipped: {}", set.id, skip_reason_name(*out.skipped));
  }
  return out;
}

std::vector<PairOutcome> build_pairs(const std::vector<AttributeSet>& sets, ChatModel& generator,
                                     ChatModel& judge, const PairConfig& cfg) {
  validate_pair_config(cfg);
  std::vector<PairOutcome> out(sets.size());
  parallel_for(sets.size(), cfg.max_inflight,
               [&](std::size_t i) { out[i] = build_pair(sets[i], generator, judge, cfg); });
  return out;
}

json preference_pair_to_json(const PreferencePair& p) {
  return {{"set_id", p.set_id},
          {"prompt", p.prompt},
          {"chosen", scored_response_to_json(p.chosen)},
          {"rejected", scored_response_to_json(p.rejected)},
          {"margin", to_double(p.margin)}};
}

json skipped_pair_to_json(const PairOutcome& o) {
  return {{"set_id", o.set_id},
          {"reason", o.skipped ? skip_reason_name(*o.skipped) : "none"},
          {"margin", to_double(o.best_margin)}};
}

}  // namespace efcg
