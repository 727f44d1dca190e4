#include "efcg/harness.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "efcg/error.hpp"
#include "efcg/pairs.hpp"
#include "efcg/parallel.hpp"
#include "efcg/prompts.hpp"
#include "efcg/scoring.hpp"
#include "efcg/text.hpp"

namespace efcg {

AttributeSet insert_probe(const AttributeSet& set, const HardConstraint& probe,
                          std::int64_t hard_index) {
  const auto n_hard = static_cast<std::int64_t>(set.hard_count());
  if (hard_index < 0 || hard_index > n_hard) {
    throw Error(ErrorCode::PositionOutOfRange,
                fmt::format("position {} outside [0, {}] for set '{}'", hard_index, n_hard, set.id));
  }
  AttributeSet out{set.id, {}, set.target_size};
  out.attributes.reserve(set.attributes.size() + 1);
  std::int64_t seen = 0;
  bool placed = false;
  for (const auto& a : set.attributes) {
    if (a.is_hard()) {
      if (seen == hard_index) {
        out.attributes.push_back(Attribute::hard(std::string(kProbeId), probe));
        placed = true;
      }
      ++seen;
    }
    out.attributes.push_back(a);
  }
  if (!placed) {
    // After the last hard attribute, or first when there are none.
    std::size_t at = 0;
    for (std::size_t i = 0; i < out.attributes.size(); ++i) {
      if (out.attributes[i].is_hard()) at = i + 1;
    }
    out.attributes.insert(out.attributes.begin() + static_cast<std::ptrdiff_t>(at),
                          Attribute::hard(std::string(kProbeId), probe));
  }
  return out;
}

PositionBiasReport run_position_bias(const std::vector<AttributeSet>& sets,
                                     const HardConstraint& probe, const PositionBiasConfig& cfg,
                                     ChatModel& generator) {
  validate_constraint(probe);
  if (sets.empty()) throw Error(ErrorCode::EmptyInput, "no attribute sets");
  if (cfg.samples == 0) throw Error(ErrorCode::ConfigError, "samples must be >= 1");
  const bool by_index = !cfg.indices.empty();
  const std::size_t positions = by_index ? cfg.indices.size() : cfg.fractions.size();
  if (positions == 0) throw Error(ErrorCode::EmptyInput, "no positions requested");
  for (double f : cfg.fractions) {
    if (!by_index && !(f >= 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::PositionOutOfRange, fmt::format("fraction {} outside [0, 1]", f));
    }
  }

  // hard_index[s][p], validated before any request goes out.
  std::vector<std::vector<std::int64_t>> hard_index(sets.size());
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const auto n_hard = static_cast<std::int64_t>(sets[s].hard_count());
    for (std::size_t p = 0; p < positions; ++p) {
      const auto idx = by_index ? cfg.indices[p]
                                : static_cast<std::int64_t>(std::lround(cfg.fractions[p] * n_hard));
      if (idx < 0 || idx > n_hard) {
        throw Error(ErrorCode::PositionOutOfRange,
                    fmt::format("position {} outside [0, {}] for set '{}'", idx, n_hard, sets[s].id));
      }
      hard_index[s].push_back(idx);
    }
  }

  const std::size_t cells = sets.size() * positions * cfg.samples;
  // 1 satisfied, 0 not, -1 failed.
  std::vector<int> outcome(cells, -1);
  parallel_for(cells, cfg.max_inflight, [&](std::size_t c) {
    const std::size_t s = c / (positions * cfg.samples);
    const std::size_t p = (c / cfg.samples) % positions;
    const auto prompt = render_generation_prompt(insert_probe(sets[s], probe, hard_index[s][p]));
    std::string text;
    try {
      text = generator.complete(prompt);
    } catch (const Error& e) {
      if (cfg.best_effort) {
        spdlog::warn("set '{}' position {}: {}", sets[s].id, p, e.what());
        return;
      }
      throw Error(ErrorCode::GeneratorError, fmt::format("set '{}': {}", sets[s].id, e.what()));
    }
    outcome[c] = verify(probe, std::string_view(text), std::string(kProbeId), cfg.verifier).satisfied;
  });

  PositionBiasReport report;
  report.probe_type = std::string(constraint_type_name(constraint_type(probe)));
  report.probe_instruction = render_constraint(probe);
  report.samples = cfg.samples;
  for (std::size_t p = 0; p < positions; ++p) {
    PositionBucket b;
    double fraction_sum = 0.0;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const auto n_hard = static_cast<double>(sets[s].hard_count());
      fraction_sum += n_hard == 0 ? 0.0 : static_cast<double>(hard_index[s][p]) / n_hard;
      for (std::size_t k = 0; k < cfg.samples; ++k) {
        const int o = outcome[(s * positions + p) * cfg.samples + k];
        if (o < 0) {
          ++report.failed_cells;
          continue;
        }
        ++b.n;
        b.satisfied += o;
      }
    }
    if (by_index) {
      b.position_index = cfg.indices[p];
      b.position_fraction = fraction_sum / static_cast<double>(sets.size());
    } else {
      b.position_fraction = cfg.fractions[p];
    }
    if (b.n == 0) throw Error(ErrorCode::GeneratorError, fmt::format("every cell at position {} failed", p));
    b.hard_score = Rational(b.satisfied, b.n);
    report.buckets.push_back(b);
  }
  std::stable_sort(report.buckets.begin(), report.buckets.end(),
                   [](const PositionBucket& a, const PositionBucket& b) {
                     return a.position_fraction < b.position_fraction;
                   });
  return report;
}

json position_bias_to_json(const PositionBiasReport& r) {
  json buckets = json::array();
  for (const auto& b : r.buckets) {
    json j = {{"position_fraction", b.position_fraction},
              {"n", b.n},
              {"satisfied", b.satisfied},
              {"hard_score", to_double(b.hard_score)},
              {"hard_score_exact", to_fraction_string(b.hard_score)}};
    if (b.position_index) j["position_index"] = *b.position_index;
    buckets.push_back(j);
  }
  return {{"probe_type", r.probe_type},
          {"probe_instruction", r.probe_instruction},
          {"samples_per_cell", r.samples},
          {"failed_cells", r.failed_cells},
          {"buckets", buckets}};
}

std::string position_bias_to_csv(const PositionBiasReport& r) {
  std::string out = "position_fraction,position_index,n,satisfied,hard_score\n";
  for (const auto& b : r.buckets) {
    out += fmt::format("{},{},{},{},{}\n", b.position_fraction,
                       b.position_index ? std::to_string(*b.position_index) : std::string(), b.n,
                       b.satisfied, to_double(b.hard_score));
  }
  return out;
}

std::string_view csr_mode_name(CsrMode m) { return m == CsrMode::Micro ? "micro" : "split_macro"; }

std::optional<CsrMode> parse_csr_mode(std::string_view name) {
  if (name == "micro") return CsrMode::Micro;
  if (name == "split_macro") return CsrMode::SplitMacro;
  return std::nullopt;
}

double token_f1(std::string_view candidate, std::string_view reference) {
  auto bag = [](std::string_view s) {
    std::map<std::string, std::int64_t> counts;
    std::int64_t total = 0;
    for (auto w : text::split_whitespace(s)) {
      auto n = text::normalize_word(w);
      if (n.empty()) continue;
      ++counts[std::move(n)];
      ++total;
    }
    return std::pair{counts, total};
  };
  const auto [cand, cand_total] = bag(candidate);
  const auto [ref, ref_total] = bag(reference);
  if (cand_total == 0 || ref_total == 0) return 0.0;
  std::int64_t overlap = 0;
  for (const auto& [w, n] : cand) {
    const auto it = ref.find(w);
    if (it != ref.end()) overlap += std::min(n, it->second);
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(cand_total);
  const double recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
  return 2 * precision * recall / (precision + recall);
}

QualityScorer token_f1_scorer(std::map<std::string, std::string> documents) {
  return [docs = std::move(documents)](const AttributeSet& set,
                                       const std::string& response) -> std::optional<double> {
    if (set.attributes.empty() || !set.attributes.front().source_doc) return std::nullopt;
    const auto it = docs.find(*set.attributes.front().source_doc);
    if (it == docs.end()) return std::nullopt;
    return token_f1(response, it->second);
  };
}

QualityScorer external_scorer(std::map<std::string, double> by_set_id) {
  return [scores = std::move(by_set_id)](const AttributeSet& set,
                                         const std::string&) -> std::optional<double> {
    const auto it = scores.find(set.id);
    if (it == scores.end()) return std::nullopt;
    return it->second;
  };
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct CellResult {
  bool ok = false;
  std::vector<VerificationResult> hard;
  std::vector<VerificationResult> soft;
  std::optional<double> quality;
};

}  // namespace

std::vector<AttributeSet> tradeoff_sets(const AttributePool& pool, const VectorStore& store,
                                        const TradeoffConfig& cfg, std::int64_t count) {
  if (cfg.per_count_sets < 1) throw Error(ErrorCode::ConfigError, "per_count_sets must be >= 1");
  ExpansionConfig e = cfg.expansion;
  e.size_min = e.size_max = count;
  e.rng_seed = mix_seed(cfg.expansion.rng_seed, static_cast<std::uint64_t>(count));
  const auto eligible = eligible_seeds(pool, store);
  if (eligible.empty()) throw Error(ErrorCode::PoolTooSmall, "no eligible seed attributes");
  e.seed_count = static_cast<std::int64_t>(eligible.size());
  const auto draws = draw_seeds(eligible.size(), e);

  const auto want = static_cast<std::size_t>(cfg.per_count_sets);
  std::vector<AttributeSet> out;
  for (std::size_t begin = 0; begin < draws.size() && out.size() < want; begin += want) {
    const std::size_t end = std::min(draws.size(), begin + want);
    std::vector<ExpansionOutcome> chunk(end - begin);
    parallel_for(chunk.size(), e.max_workers, [&](std::size_t i) {
      const auto& d = draws[begin + i];
      chunk[i] = expand_one(eligible[d.eligible_index], pool, store, e, d.target_size);
    });
    for (auto& o : chunk) {
      if (!o.reached_target || out.size() >= want) continue;
      o.set.id = fmt::format("n{}-{}", count, o.set.id);
      out.push_back(std::move(o.set));
    }
  }
  if (out.size() < want) {
    throw Error(ErrorCode::PoolTooSmall,
                fmt::format("only {} of {} sets reached {} attributes", out.size(), want, count));
  }
  return out;
}

TradeoffReport run_tradeoff(const AttributePool& pool, const VectorStore& store,
                            const TradeoffConfig& cfg, ChatModel& generator, ChatModel& judge,
                            const QualityScorer& quality) {
  if (cfg.counts.empty()) throw Error(ErrorCode::ConfigError, "counts must be nonempty");
  for (std::size_t i = 0; i < cfg.counts.size(); ++i) {
    if (cfg.counts[i] < 1 || (i > 0 && cfg.counts[i] <= cfg.counts[i - 1])) {
      throw Error(ErrorCode::ConfigError, "counts must be positive and strictly ascending");
    }
  }
  TradeoffReport report{cfg.label, cfg.csr_mode, quality ? cfg.quality_metric : std::string(), {}};
  for (const auto count : cfg.counts) {
    const auto sets = tradeoff_sets(pool, store, cfg, count);
    std::vector<CellResult> cells(sets.size());
    parallel_for(sets.size(), cfg.max_inflight, [&](std::size_t i) {
      const auto& set = sets[i];
      std::string text;
      try {
        try {
          text = generator.complete(render_generation_prompt(set));
        } catch (const Error& e) {
          throw Error(ErrorCode::GeneratorError, fmt::format("set '{}': {}", set.id, e.what()));
        }
        auto& cell = cells[i];
        std::vector<Attribute> soft;
        const auto tokens = tokenize(text);
        for (const auto& a : set.attributes) {
          if (a.is_hard()) {
            cell.hard.push_back(verify(a.constraint(), tokens, a.id, cfg.verifier));
          } else {
            soft.push_back(a);
          }
        }
        if (!soft.empty()) {
          const auto scores = judge_soft(judge, text, soft);
          for (std::size_t k = 0; k < soft.size(); ++k) {
            cell.soft.push_back({soft[k].id, scores[k], scores[k] ? "judge score 1" : "judge score 0"});
          }
        }
        if (quality) cell.quality = quality(set, text);
        cell.ok = true;
      } catch (const Error& e) {
        if (!cfg.best_effort) throw;
        spdlog::warn("tradeoff cell failed: {}", e.what());
      }
    });

    TradeoffPoint point;
    point.n_attributes = count;
    std::vector<InstructionResults> instructions;
    std::vector<Rational> split_rates;
    double quality_sum = 0.0;
    std::int64_t quality_n = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i];
      if (!c.ok) {
        ++point.failed_cells;
        continue;
      }
      ++point.sets;
      InstructionResults inst{sets[i].id, c.hard};
      inst.results.insert(inst.results.end(), c.soft.begin(), c.soft.end());
      instructions.push_back(std::move(inst));
      auto rate = [](const std::vector<VerificationResult>& v) {
        std::int64_t yes = 0;
        for (const auto& r : v) yes += r.satisfied ? 1 : 0;
        return Rational(yes, static_cast<std::int64_t>(v.size()));
      };
      if (c.hard.empty()) {
        split_rates.push_back(rate(c.soft));
      } else if (c.soft.empty()) {
        split_rates.push_back(rate(c.hard));
      } else {
        split_rates.push_back((rate(c.hard) + rate(c.soft)) / 2);
      }
      if (c.quality) {
        quality_sum += *c.quality;
        ++quality_n;
      }
    }
    if (point.sets == 0) {
      throw Error(ErrorCode::GeneratorError, fmt::format("every cell failed at count {}", count));
    }
    if (cfg.csr_mode == CsrMode::Micro) {
      point.csr = compute_csr(instructions).csr;
    } else {
      Rational sum = 0;
      for (const auto& r : split_rates) sum += r;
      point.csr = sum / static_cast<std::int64_t>(split_rates.size());
    }
    if (quality_n > 0) point.quality = quality_sum / static_cast<double>(quality_n);
    spdlog::info("count {}: csr {} over {} sets", count, to_double(point.csr), point.sets);
    report.points.push_back(point);
  }
  return report;
}

json tradeoff_to_json(const TradeoffReport& r) {
  json points = json::array();
  for (const auto& p : r.points) {
    json j = {{"n_attributes", p.n_attributes},
              {"sets", p.sets},
              {"failed_cells", p.failed_cells},
              {"csr", to_double(p.csr)},
              {"csr_exact", to_fraction_string(p.csr)}};
    if (p.quality) j["quality"] = *p.quality;
    points.push_back(j);
  }
  json out = {{"label", r.label}, {"csr_mode", csr_mode_name(r.csr_mode)}, {"points", points}};
  if (!r.quality_metric.empty()) out["quality_metric"] = r.quality_metric;
  return out;
}

std::string tradeoff_to_csv(const TradeoffReport& r) {
  std::string out = "label,n_attributes,sets,csr,quality\n";
  for (const auto& p : r.points) {
    out += fmt::format("{},{},{},{},{}\n", r.label, p.n_attributes, p.sets, to_double(p.csr),
                       p.quality ? fmt::format("{}", *p.quality) : std::string());
  }
  return out;
}

}  // namespace efcg
