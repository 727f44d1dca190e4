#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "efcg/config.hpp"
#include "efcg/serialization.hpp"

namespace efcg::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUnsatisfied = 1;  // verify found an unsatisfied constraint
inline constexpr int kFailure = 2;

struct Globals {
  std::string config_path;
  bool lenient = false;
  std::optional<std::uint64_t> seed;
  std::string out;  // empty means stdout
  std::optional<std::size_t> max_inflight;
  std::string log_level = "info";

  ParseMode mode() const { return lenient ? ParseMode::Lenient : ParseMode::Strict; }
};

// Config file (or defaults) with the global overrides applied.
AppConfig load_app_config(const Globals& g);

struct ExtractArgs {
  std::string input;
  std::string split = "fineweb";
  std::optional<std::int64_t> count;
  bool decompose = false;
  std::string pool_out;
};
int run_extract(const Globals& g, const ExtractArgs& a);

struct VerifyArgs {
  std::string sets;
  std::string responses;
};
int run_verify(const Globals& g, const VerifyArgs& a);

struct JudgeArgs {
  std::string sets;
  std::string responses;
};
int run_judge(const Globals& g, const JudgeArgs& a);

struct ScoreArgs {
  std::vector<std::string> inputs;
};
int run_score(const Globals& g, const ScoreArgs& a);

struct ExpandArgs {
  std::string pool;
  std::string vectors;
  std::optional<std::int64_t> seed_count;
  std::optional<double> threshold;
  std::optional<std::int64_t> size_min;
  std::optional<std::int64_t> size_max;
  std::string redundancy_mode;
  bool reached_only = false;
  std::string stats_out;
};
int run_expand(const Globals& g, const ExpandArgs& a);

struct BuildPairsArgs {
  std::string sets;
  std::optional<std::int64_t> k;
  std::optional<double> min_margin;
  std::size_t chunk = 16;
};
int run_build_pairs(const Globals& g, const BuildPairsArgs& a);

struct EvalPositionArgs {
  std::string sets;
  std::string probe;  // constraint JSON
  std::vector<double> fractions;
  std::vector<std::int64_t> indices;
  std::size_t samples = 1;
  bool best_effort = false;
  std::string csv_out;
};
int run_eval_position(const Globals& g, const EvalPositionArgs& a);

struct EvalTradeoffArgs {
  std::string pool;
  std::string vectors;
  std::vector<std::int64_t> counts;
  std::optional<std::int64_t> per_count;
  std::string csr_mode = "micro";
  std::string label = "default";
  bool best_effort = false;
  std::string documents;
  std::string quality_scores;
  std::string csv_out;
};
int run_eval_tradeoff(const Globals& g, const EvalTradeoffArgs& a);

struct KappaArgs {
  std::string input;
  std::string a_field = "judge";
  std::string b_field = "human";
};
int run_kappa(const Globals& g, const KappaArgs& a);

struct EmbedArgs {
  std::string pool;
  std::string space = "both";
};
int run_embed(const Globals& g, const EmbedArgs& a);

}  // namespace efcg::cli
