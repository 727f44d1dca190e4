#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "efcg/dataset.hpp"
#include "efcg/embedding.hpp"
#include "efcg/embedding_client.hpp"
#include "efcg/error.hpp"
#include "efcg/expansion.hpp"
#include "efcg/extraction.hpp"
#include "efcg/harness.hpp"
#include "efcg/jsonl.hpp"
#include "efcg/llm.hpp"
#include "efcg/pairs.hpp"
#include "efcg/parallel.hpp"
#include "efcg/pool.hpp"
#include "efcg/prompts.hpp"
#include "efcg/scoring.hpp"
#include "efcg/verifier.hpp"

namespace efcg::cli {

namespace {

std::size_t inflight(const Globals& g, std::size_t fallback) { return g.max_inflight.value_or(fallback); }

void emit_jsonl(const std::string& out, const std::vector<json>& records) {
  if (out.empty()) {
    for (const auto& r : records) write_jsonl_record(std::cout, r);
    std::cout.flush();
  } else {
    write_jsonl_file(out, records);
  }
}

void emit_json(const std::string& out, const json& doc) {
  const auto text = doc.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(out, text);
  }
}

void for_each_record(const std::string& path, const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path));
  read_jsonl(in, path, [&](const json& j, std::size_t line) {
    try {
      fn(j, line);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IoError) throw;
      throw Error(e.code(), fmt::format("{}:{}: {}", path, line, e.what()));
    }
  });
}

struct LoadedSet {
  AttributeSet set;
  std::optional<std::string> raw_text;
};

// Bench records (with "doc_id") or bare attribute sets.
std::vector<LoadedSet> load_sets(const std::string& path, ParseMode mode) {
  std::vector<LoadedSet> out;
  std::set<std::string> ids;
  for_each_record(path, [&](const json& j, std::size_t) {
    LoadedSet s;
    if (j.is_object() && j.contains("doc_id")) {
      auto r = bench_record_from_json(j, mode);
      s.set = std::move(r.attributes);
      s.raw_text = std::move(r.raw_text);
    } else {
      s.set = attribute_set_from_json(j, mode);
    }
    if (!ids.insert(s.set.id).second) {
      throw Error(ErrorCode::ParseError, fmt::format("duplicate set id '{}'", s.set.id));
    }
    out.push_back(std::move(s));
  });
  return out;
}

// {"id", "response"} records keyed by id.
std::map<std::string, std::string> load_responses(const std::string& path, ParseMode mode) {
  std::map<std::string, std::string> out;
  for_each_record(path, [&](const json& j, std::size_t) {
    detail::reject_unknown_fields(j, {"id", "response"}, mode, "response record");
    auto id = detail::require_string(j, "id", "response record");
    auto text = detail::require_string(j, "response", "response record");
    if (!out.emplace(std::move(id), std::move(text)).second) {
      throw Error(ErrorCode::ParseError, "duplicate response id");
    }
  });
  return out;
}

// Response text per set: from the responses file when given, else the
// record's raw_text.
std::vector<std::string> responses_for(const std::vector<LoadedSet>& sets, const std::string& path,
                                       ParseMode mode) {
  std::map<std::string, std::string> responses;
  if (!path.empty()) responses = load_responses(path, mode);
  std::vector<std::string> out;
  for (const auto& s : sets) {
    if (!path.empty()) {
      const auto it = responses.find(s.set.id);
      if (it == responses.end()) {
        throw Error(ErrorCode::UnknownId, fmt::format("no response for set '{}'", s.set.id));
      }
      out.push_back(it->second);
    } else if (s.raw_text) {
      out.push_back(*s.raw_text);
    } else {
      throw Error(ErrorCode::ConfigError,
                  fmt::format("set '{}' has no raw_text; pass --responses", s.set.id));
    }
  }
  return out;
}

VectorStore load_vectors(const std::string& path, ParseMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path));
  return read_vectors_jsonl(in, mode);
}

AttributePool load_pool(const std::string& path, ParseMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path));
  return read_pool_jsonl(in, mode, path);
}

json result_record(const std::string& id, const std::vector<json>& results) {
  std::int64_t satisfied = 0;
  for (const auto& r : results) satisfied += r["satisfied"].get<bool>() ? 1 : 0;
  return {{"id", id},
          {"results", results},
          {"satisfied", satisfied},
          {"total", static_cast<std::int64_t>(results.size())}};
}

std::string sidecar(const std::string& out, std::string_view suffix) {
  if (out.empty()) return {};
  return out + std::string(suffix);
}

}  // namespace

AppConfig load_app_config(const Globals& g) {
  AppConfig cfg = g.config_path.empty() ? AppConfig{} : load_config(g.config_path);
  if (g.seed) {
    cfg.expansion.rng_seed = *g.seed;
    cfg.extraction.rng_seed = *g.seed;
  }
  if (g.max_inflight) {
    if (*g.max_inflight == 0) throw Error(ErrorCode::ConfigError, "--max-inflight must be >= 1");
    cfg.pairs.max_inflight = *g.max_inflight;
    cfg.embedding.max_inflight = *g.max_inflight;
    cfg.expansion.max_workers = *g.max_inflight;
  }
  return cfg;
}

int run_extract(const Globals& g, const ExtractArgs& a) {
  auto cfg = load_app_config(g);
  if (a.count) cfg.extraction.count = *a.count;
  validate_extraction_config(cfg.extraction);
  const auto split = parse_split(a.split);
  if (!split) throw Error(ErrorCode::ConfigError, fmt::format("unknown split '{}'", a.split));

  struct Doc {
    std::string id;
    std::string text;
    std::optional<std::string> domain;
  };
  std::vector<Doc> docs;
  std::set<std::string> ids;
  for_each_record(a.input, [&](const json& j, std::size_t) {
    detail::reject_unknown_fields(j, {"doc_id", "text", "domain"}, g.mode(), "document");
    Doc d{detail::require_string(j, "doc_id", "document"), detail::require_string(j, "text", "document"),
          detail::optional_string(j, "domain", "document")};
    if (!ids.insert(d.id).second) throw Error(ErrorCode::ParseError, fmt::format("duplicate doc_id '{}'", d.id));
    docs.push_back(std::move(d));
  });

  std::unique_ptr<OpenAiChatClient> decomposer;
  if (a.decompose) decomposer = std::make_unique<OpenAiChatClient>(cfg.generator);

  std::vector<BenchRecord> records(docs.size());
  parallel_for(docs.size(), inflight(g, cfg.pairs.max_inflight), [&](std::size_t i) {
    const auto& d = docs[i];
    BenchRecord r;
    r.doc_id = d.id;
    r.raw_text = d.text;
    r.split = *split;
    r.domain = d.domain;
    r.attributes.id = d.id;
    if (decomposer) {
      std::string reply;
      try {
        reply = decomposer->complete(render_decompose_prompt(d.text));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::EmptyText) throw;
        throw Error(ErrorCode::GeneratorError, fmt::format("document '{}': {}", d.id, e.what()));
      }
      r.attributes.attributes = parse_decomposed_attributes(reply, d.id);
    }
    for (auto& h : extract_document(d.id, d.text, cfg.extraction)) r.attributes.attributes.push_back(std::move(h));
    for (auto& attr : r.attributes.attributes) {
      attr.source_doc = d.id;
      attr.domain = d.domain;
    }
    records[i] = std::move(r);
  });

  std::vector<json> out;
  std::vector<json> pool;
  for (const auto& r : records) {
    out.push_back(bench_record_to_json(r));
    for (const auto& attr : r.attributes.attributes) pool.push_back(attribute_to_json(attr));
  }
  emit_jsonl(g.out, out);
  if (!a.pool_out.empty()) write_jsonl_file(a.pool_out, pool);
  spdlog::info("extracted {} documents, {} attributes", records.size(), pool.size());
  return kOk;
}

int run_verify(const Globals& g, const VerifyArgs& a) {
  const auto cfg = load_app_config(g);
  const auto sets = load_sets(a.sets, g.mode());
  const auto texts = responses_for(sets, a.responses, g.mode());
  std::vector<json> out;
  bool all_ok = true;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto tokens = tokenize(texts[i]);
    std::vector<json> results;
    for (const auto& attr : sets[i].set.attributes) {
      if (!attr.is_hard()) continue;
      const auto r = verify(attr.constraint(), tokens, attr.id, cfg.verifier);
      all_ok = all_ok && r.satisfied;
      auto j = verification_result_to_json(r);
      j["constraint_type"] = constraint_type_name(constraint_type(attr.constraint()));
      results.push_back(std::move(j));
    }
    if (results.empty()) spdlog::warn("set '{}' has no hard attributes", sets[i].set.id);
    out.push_back(result_record(sets[i].set.id, results));
  }
  emit_jsonl(g.out, out);
  return all_ok ? kOk : kUnsatisfied;
}

int run_judge(const Globals& g, const JudgeArgs& a) {
  const auto cfg = load_app_config(g);
  const auto sets = load_sets(a.sets, g.mode());
  const auto texts = responses_for(sets, a.responses, g.mode());
  OpenAiChatClient judge(cfg.judge);
  std::vector<json> out(sets.size());
  parallel_for(sets.size(), inflight(g, cfg.pairs.max_inflight), [&](std::size_t i) {
    std::vector<Attribute> soft;
    for (const auto& attr : sets[i].set.attributes) {
      if (attr.is_soft()) soft.push_back(attr);
    }
    std::vector<json> results;
    if (!soft.empty()) {
      const auto scores = judge_soft(judge, texts[i], soft);
      for (std::size_t k = 0; k < soft.size(); ++k) {
        results.push_back(verification_result_to_json(
            {soft[k].id, scores[k], scores[k] ? "judge score 1" : "judge score 0"}));
      }
    }
    out[i] = result_record(sets[i].set.id, results);
  });
  emit_jsonl(g.out, out);
  return kOk;
}

int run_score(const Globals& g, const ScoreArgs& a) {
  // Results merged per id across inputs, in first-seen order.
  std::vector<InstructionResults> instructions;
  std::map<std::string, std::size_t> index;
  std::vector<std::pair<ConstraintType, bool>> typed;
  for (const auto& path : a.inputs) {
    for_each_record(path, [&](const json& j, std::size_t) {
      detail::reject_unknown_fields(j, {"id", "results", "satisfied", "total"}, g.mode(), "result record");
      const auto id = detail::require_string(j, "id", "result record");
      const auto& results = detail::require_field(j, "results", "result record");
      if (!results.is_array()) throw Error(ErrorCode::ParseError, "'results' must be an array");
      auto [it, fresh] = index.emplace(id, instructions.size());
      if (fresh) instructions.push_back({id, {}});
      auto& inst = instructions[it->second];
      for (const auto& r : results) {
        if (!r.is_object()) throw Error(ErrorCode::ParseError, "result must be an object");
        json core = r;
        std::optional<ConstraintType> type;
        if (const auto t = r.find("constraint_type"); t != r.end()) {
          if (!t->is_string() || !(type = parse_constraint_type(t->get<std::string>()))) {
            throw Error(ErrorCode::ParseError, "unknown constraint_type");
          }
          core.erase("constraint_type");
        }
        auto v = verification_result_from_json(core, g.mode());
        if (type) typed.emplace_back(*type, v.satisfied);
        inst.results.push_back(std::move(v));
      }
    });
  }
  if (instructions.empty()) throw Error(ErrorCode::EmptyInput, "no result records");
  const auto csr = compute_csr(instructions);
  json report = {{"instructions", csr.m}, {"csr", to_double(csr.csr)}, {"csr_exact", to_fraction_string(csr.csr)}};
  if (!typed.empty()) {
    const auto macro = compute_macro(typed);
    json per_type = json::object();
    for (const auto& [name, rate] : macro.per_type) {
      per_type[name] = {{"total", rate.total}, {"satisfied", rate.satisfied}, {"rate", to_double(rate.rate)}};
    }
    report["macro_accuracy"] = to_double(macro.macro_accuracy);
    report["macro_accuracy_exact"] = to_fraction_string(macro.macro_accuracy);
    report["per_type"] = per_type;
  }
  emit_json(g.out, report);
  return kOk;
}

int run_expand(const Globals& g, const ExpandArgs& a) {
  auto cfg = load_app_config(g);
  auto& e = cfg.expansion;
  if (a.seed_count) e.seed_count = *a.seed_count;
  if (a.threshold) e.redundancy_threshold = *a.threshold;
  if (a.size_min) e.size_min = *a.size_min;
  if (a.size_max) e.size_max = *a.size_max;
  if (!a.redundancy_mode.empty()) {
    const auto m = parse_redundancy_mode(a.redundancy_mode);
    if (!m) throw Error(ErrorCode::ConfigError, fmt::format("unknown redundancy mode '{}'", a.redundancy_mode));
    e.redundancy_mode = *m;
  }
  validate_expansion_config(e);
  const auto pool = load_pool(a.pool, g.mode());
  const auto store = load_vectors(a.vectors, g.mode());
  const auto outcomes = expand_batch(pool, store, e);
  std::vector<json> out;
  for (const auto& o : outcomes) {
    if (a.reached_only && !o.reached_target) continue;
    out.push_back(attribute_set_to_json(o.set));
  }
  emit_jsonl(g.out, out);
  const auto stats_path = a.stats_out.empty() ? sidecar(g.out, ".stats.json") : a.stats_out;
  const auto stats = expansion_stats_to_json(summarize(outcomes), e);
  if (!stats_path.empty()) {
    write_text_file(stats_path, stats.dump(2) + "\n");
  } else {
    spdlog::info("expansion stats: {}", stats.dump());
  }
  return kOk;
}

namespace {

// Ids already written by an earlier run. A torn final line is cut off.
std::set<std::string> resume_ids(const std::string& path) {
  std::set<std::string> ids;
  if (!std::filesystem::exists(path)) return ids;
  auto text = read_text_file(path);
  if (!text.empty() && text.back() != '\n') {
    const auto keep = text.rfind('\n');
    text.resize(keep == std::string::npos ? 0 : keep + 1);
    spdlog::warn("'{}' ended with a partial record; truncating it", path);
    write_text_file(path, text);
  }
  std::istringstream in(text);
  read_jsonl(in, path, [&](const json& j, std::size_t) {
    ids.insert(detail::require_string(j, "set_id", "pair record"));
  });
  return ids;
}

void append_records(const std::string& path, const std::vector<json>& records) {
  if (records.empty()) return;
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot append to '{}'", path));
  for (const auto& r : records) write_jsonl_record(out, r);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, fmt::format("write to '{}' failed", path));
}

}  // namespace

int run_build_pairs(const Globals& g, const BuildPairsArgs& a) {
  if (g.out.empty()) throw Error(ErrorCode::ConfigError, "build-pairs needs --out (it appends and resumes)");
  if (a.chunk == 0) throw Error(ErrorCode::ConfigError, "--chunk must be >= 1");
  auto cfg = load_app_config(g);
  if (a.k) cfg.pairs.k_candidates = *a.k;
  if (a.min_margin) cfg.pairs.min_margin = *a.min_margin;
  validate_pair_config(cfg.pairs);
  const auto skipped_path = sidecar(g.out, ".skipped.jsonl");

  auto done = resume_ids(g.out);
  for (const auto& id : resume_ids(skipped_path)) done.insert(id);
  std::vector<AttributeSet> todo;
  std::vector<json> degenerate;
  for (auto& s : load_sets(a.sets, g.mode())) {
    if (done.count(s.set.id) > 0) continue;
    if (s.set.hard_count() == 0 || s.set.soft_count() == 0) {
      degenerate.push_back({{"set_id", s.set.id}, {"reason", "degenerate_set"}});
      continue;
    }
    todo.push_back(std::move(s.set));
  }
  if (!degenerate.empty()) {
    spdlog::warn("{} sets lack hard or soft attributes and are skipped", degenerate.size());
    append_records(skipped_path, degenerate);
  }
  if (!done.empty()) spdlog::info("resuming: {} sets already done, {} to go", done.size(), todo.size());

  OpenAiChatClient generator(cfg.generator);
  OpenAiChatClient judge(cfg.judge);
  std::size_t pairs = 0, skipped = degenerate.size();
  for (std::size_t begin = 0; begin < todo.size(); begin += a.chunk) {
    const auto end = std::min(todo.size(), begin + a.chunk);
    const std::vector<AttributeSet> chunk(todo.begin() + static_cast<std::ptrdiff_t>(begin),
                                          todo.begin() + static_cast<std::ptrdiff_t>(end));
    std::vector<json> kept, dropped;
    for (const auto& o : build_pairs(chunk, generator, judge, cfg.pairs)) {
      if (o.pair) {
        kept.push_back(preference_pair_to_json(*o.pair));
      } else {
        dropped.push_back(skipped_pair_to_json(o));
      }
    }
    append_records(g.out, kept);
    append_records(skipped_path, dropped);
    pairs += kept.size();
    skipped += dropped.size();
    spdlog::info("{}/{} sets done", end, todo.size());
  }
  spdlog::info("{} pairs written, {} sets skipped", pairs, skipped);
  return kOk;
}

int run_eval_position(const Globals& g, const EvalPositionArgs& a) {
  const auto cfg = load_app_config(g);
  json probe_json;
  try {
    probe_json = json::parse(a.probe);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, fmt::format("--probe is not JSON: {}", e.what()));
  }
  const auto probe = constraint_from_json(probe_json, g.mode());
  std::vector<AttributeSet> sets;
  for (auto& s : load_sets(a.sets, g.mode())) sets.push_back(std::move(s.set));
  PositionBiasConfig pc;
  if (!a.fractions.empty()) pc.fractions = a.fractions;
  pc.indices = a.indices;
  pc.samples = a.samples;
  pc.max_inflight = inflight(g, cfg.pairs.max_inflight);
  pc.best_effort = a.best_effort;
  pc.verifier = cfg.verifier;
  OpenAiChatClient generator(cfg.generator);
  const auto report = run_position_bias(sets, probe, pc, generator);
  emit_json(g.out, position_bias_to_json(report));
  if (!a.csv_out.empty()) write_text_file(a.csv_out, position_bias_to_csv(report));
  return kOk;
}

int run_eval_tradeoff(const Globals& g, const EvalTradeoffArgs& a) {
  const auto cfg = load_app_config(g);
  TradeoffConfig tc;
  if (!a.counts.empty()) tc.counts = a.counts;
  if (a.per_count) tc.per_count_sets = *a.per_count;
  tc.expansion = cfg.expansion;
  const auto mode = parse_csr_mode(a.csr_mode);
  if (!mode) throw Error(ErrorCode::ConfigError, fmt::format("unknown csr mode '{}'", a.csr_mode));
  tc.csr_mode = *mode;
  tc.max_inflight = inflight(g, cfg.pairs.max_inflight);
  tc.best_effort = a.best_effort;
  tc.label = a.label;
  tc.verifier = cfg.verifier;

  QualityScorer quality;
  if (!a.documents.empty() && !a.quality_scores.empty()) {
    throw Error(ErrorCode::ConfigError, "--documents and --quality-scores are exclusive");
  }
  if (!a.documents.empty()) {
    std::map<std::string, std::string> docs;
    for_each_record(a.documents, [&](const json& j, std::size_t) {
      detail::reject_unknown_fields(j, {"doc_id", "text", "domain"}, g.mode(), "document");
      docs[detail::require_string(j, "doc_id", "document")] = detail::require_string(j, "text", "document");
    });
    quality = token_f1_scorer(std::move(docs));
  } else if (!a.quality_scores.empty()) {
    std::map<std::string, double> scores;
    for_each_record(a.quality_scores, [&](const json& j, std::size_t) {
      detail::reject_unknown_fields(j, {"set_id", "score"}, g.mode(), "quality record");
      const auto& s = detail::require_field(j, "score", "quality record");
      if (!s.is_number()) throw Error(ErrorCode::ParseError, "'score' must be a number");
      scores[detail::require_string(j, "set_id", "quality record")] = s.get<double>();
    });
    quality = external_scorer(std::move(scores));
    tc.quality_metric = "external";
  }

  const auto pool = load_pool(a.pool, g.mode());
  const auto store = load_vectors(a.vectors, g.mode());
  OpenAiChatClient generator(cfg.generator);
  OpenAiChatClient judge(cfg.judge);
  const auto report = run_tradeoff(pool, store, tc, generator, judge, quality);
  emit_json(g.out, tradeoff_to_json(report));
  if (!a.csv_out.empty()) write_text_file(a.csv_out, tradeoff_to_csv(report));
  return kOk;
}

int run_kappa(const Globals& g, const KappaArgs& a) {
  std::vector<std::pair<bool, bool>> pairs;
  for_each_record(a.input, [&](const json& j, std::size_t) {
    auto get = [&](const std::string& key) {
      const auto& v = detail::require_field(j, key, "label record");
      if (!v.is_boolean()) throw Error(ErrorCode::ParseError, fmt::format("'{}' must be a boolean", key));
      return v.get<bool>();
    };
    pairs.emplace_back(get(a.a_field), get(a.b_field));
  });
  const auto k = cohens_kappa(pairs);
  const auto agree = agreement_rate(pairs);
  emit_json(g.out, {{"n", static_cast<std::int64_t>(pairs.size())},
                    {"kappa", to_double(k.kappa)},
                    {"kappa_exact", to_fraction_string(k.kappa)},
                    {"observed", to_double(k.observed)},
                    {"expected", to_double(k.expected)},
                    {"agreement_rate", to_double(agree)},
                    {"degenerate", k.degenerate}});
  return kOk;
}

int run_embed(const Globals& g, const EmbedArgs& a) {
  const auto cfg = load_app_config(g);
  std::vector<Space> spaces;
  if (a.space == "both") {
    spaces = {Space::Semantic, Space::Correlation};
  } else if (const auto s = parse_space(a.space)) {
    spaces = {*s};
  } else {
    throw Error(ErrorCode::ConfigError, fmt::format("unknown space '{}'", a.space));
  }
  const auto pool = load_pool(a.pool, g.mode());
  std::vector<std::string> ids, texts;
  for (const auto& attr : pool.attributes()) {
    ids.push_back(attr.id);
    texts.push_back(attr.is_soft() ? attr.soft_text() : render_constraint(attr.constraint()));
  }
  std::vector<json> out;
  for (const auto space : spaces) {
    auto ec = cfg.embedding;
    if (space == Space::Correlation && !cfg.correlation_url.empty()) ec.url = cfg.correlation_url;
    if (ec.url.empty()) throw Error(ErrorCode::ConfigError, "[embedding] url is required");
    if (space == Space::Correlation && cfg.correlation_url.empty()) {
      spdlog::warn("no [embedding] correlation_url; the correlation space reuses the semantic encoder");
    }
    HttpEmbeddingClient client(ec);
    const auto vectors = client.embed(texts);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      EmbeddingVector v{vectors[i], space};
      validate_vector(v);
      out.push_back(vector_record_to_json(ids[i], v));
    }
  }
  emit_jsonl(g.out, out);
  return kOk;
}

}  // namespace efcg::cli
