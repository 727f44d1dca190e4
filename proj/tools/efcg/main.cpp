#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "efcg/error.hpp"

using namespace efcg::cli;

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("efcg"));

  CLI::App app{"Fine-grained controllable generation toolkit: extraction, verification, "
               "expansion, preference pairs and evaluation harnesses."};
  app.name("efcg");
  app.require_subcommand(1);

  Globals g;
  std::uint64_t seed = 0;
  std::size_t max_inflight = 0;
  app.add_option("--config", g.config_path, "TOML config file")->check(CLI::ExistingFile);
  app.add_flag("--lenient", g.lenient, "Ignore unknown JSON fields instead of rejecting them");
  auto* seed_opt = app.add_option("--seed", seed, "Override expansion and extraction rng seeds");
  app.add_option("--out", g.out, "Output path (default stdout)");
  auto* inflight_opt = app.add_option("--max-inflight", max_inflight, "Concurrent requests or workers");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  app.fallthrough();

  std::function<int()> action;

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Extract hard attributes (and optionally soft ones) from documents");
  extract->add_option("--in", ex.input, "Documents JSONL: {doc_id, text, domain?}")->required();
  extract->add_option("--split", ex.split, "fineweb or multi_source");
  extract->add_option("--count", ex.count, "Hard attributes per document");
  extract->add_flag("--decompose", ex.decompose, "Ask the generator model for soft attributes");
  extract->add_option("--pool-out", ex.pool_out, "Also write every attribute as a pool JSONL");
  extract->callback([&] { action = [&] { return run_extract(g, ex); }; });

  VerifyArgs ve;
  auto* verify = app.add_subcommand("verify", "Check hard constraints; exit 1 if any is unsatisfied");
  verify->add_option("--sets", ve.sets, "Bench records or attribute sets JSONL")->required();
  verify->add_option("--responses", ve.responses, "Responses JSONL {id, response}; default raw_text");
  verify->callback([&] { action = [&] { return run_verify(g, ve); }; });

  JudgeArgs ju;
  auto* judge = app.add_subcommand("judge", "Judge soft attributes with the judge model");
  judge->add_option("--sets", ju.sets, "Bench records or attribute sets JSONL")->required();
  judge->add_option("--responses", ju.responses, "Responses JSONL {id, response}; default raw_text");
  judge->callback([&] { action = [&] { return run_judge(g, ju); }; });

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "CSR and macro accuracy over verify/judge output");
  score->add_option("--in", sc.inputs, "Result JSONL files, merged by id")->required();
  score->callback([&] { action = [&] { return run_score(g, sc); }; });

  ExpandArgs xp;
  auto* expand = app.add_subcommand("expand", "Expand seed attributes into large attribute sets");
  expand->add_option("--pool", xp.pool, "Attribute pool JSONL")->required();
  expand->add_option("--vectors", xp.vectors, "Vector JSONL with both spaces")->required();
  expand->add_option("--seed-count", xp.seed_count, "Number of seeds to draw");
  expand->add_option("--threshold", xp.threshold, "Redundancy threshold");
  expand->add_option("--size-min", xp.size_min, "Minimum target size");
  expand->add_option("--size-max", xp.size_max, "Maximum target size");
  expand->add_option("--redundancy-mode", xp.redundancy_mode, "all_members or seed_only");
  expand->add_flag("--reached-only", xp.reached_only, "Drop sets that ran out of candidates");
  expand->add_option("--stats", xp.stats_out, "Stats JSON path (default <out>.stats.json)");
  expand->callback([&] { action = [&] { return run_expand(g, xp); }; });

  BuildPairsArgs bp;
  auto* pairs = app.add_subcommand("build-pairs", "Generate candidates and build preference pairs");
  pairs->add_option("--sets", bp.sets, "Attribute sets JSONL")->required();
  pairs->add_option("--k", bp.k, "Candidates per set");
  pairs->add_option("--min-margin", bp.min_margin, "Minimum combined-score margin");
  pairs->add_option("--chunk", bp.chunk, "Sets per appended chunk");
  pairs->callback([&] { action = [&] { return run_build_pairs(g, bp); }; });

  EvalPositionArgs ep;
  auto* position = app.add_subcommand("eval-position", "Probe satisfaction by list position");
  position->add_option("--sets", ep.sets, "Attribute sets JSONL")->required();
  position->add_option("--probe", ep.probe, "Probe constraint as JSON")->required();
  position->add_option("--fractions", ep.fractions, "Relative positions in [0,1]")->delimiter(',');
  position->add_option("--indices", ep.indices, "Absolute hard-list indices")->delimiter(',');
  position->add_option("--samples", ep.samples, "Generations per set and position");
  position->add_flag("--best-effort", ep.best_effort, "Drop failed cells instead of aborting");
  position->add_option("--csv", ep.csv_out, "Also write the buckets as CSV");
  position->callback([&] { action = [&] { return run_eval_position(g, ep); }; });

  EvalTradeoffArgs et;
  auto* tradeoff = app.add_subcommand("eval-tradeoff", "CSR and quality against attribute count");
  tradeoff->add_option("--pool", et.pool, "Attribute pool JSONL")->required();
  tradeoff->add_option("--vectors", et.vectors, "Vector JSONL with both spaces")->required();
  tradeoff->add_option("--counts", et.counts, "Attribute counts")->delimiter(',');
  tradeoff->add_option("--per-count", et.per_count, "Sets per count");
  tradeoff->add_option("--csr-mode", et.csr_mode, "micro or split_macro");
  tradeoff->add_option("--label", et.label, "Run label for the report");
  tradeoff->add_flag("--best-effort", et.best_effort, "Drop failed cells instead of aborting");
  tradeoff->add_option("--documents", et.documents, "Source documents for token-F1 quality");
  tradeoff->add_option("--quality-scores", et.quality_scores, "Precomputed {set_id, score} JSONL");
  tradeoff->add_option("--csv", et.csv_out, "Also write the points as CSV");
  tradeoff->callback([&] { action = [&] { return run_eval_tradeoff(g, et); }; });

  KappaArgs ka;
  auto* kappa = app.add_subcommand("kappa", "Cohen's kappa and agreement between two labelers");
  kappa->add_option("--in", ka.input, "JSONL with two boolean fields")->required();
  kappa->add_option("--a-field", ka.a_field, "First labeler field");
  kappa->add_option("--b-field", ka.b_field, "Second labeler field");
  kappa->callback([&] { action = [&] { return run_kappa(g, ka); }; });

  EmbedArgs em;
  auto* embed = app.add_subcommand("embed", "Fetch attribute vectors from the embedding service");
  embed->add_option("--pool", em.pool, "Attribute pool JSONL")->required();
  embed->add_option("--space", em.space, "semantic, correlation or both");
  embed->callback([&] { action = [&] { return run_embed(g, em); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFailure;
  }
  if (seed_opt->count() > 0) g.seed = seed;
  if (inflight_opt->count() > 0) g.max_inflight = max_inflight;
  spdlog::set_level(spdlog::level::from_str(g.log_level));

  try {
    return action();
  } catch (const efcg::Error& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return kFailure;
  }
}
