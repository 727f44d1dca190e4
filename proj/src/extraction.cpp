#include "efcg/extraction.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "efcg/error.hpp"
#include "efcg/random.hpp"
#include "efcg/text.hpp"

namespace efcg {

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      "about",  "above",   "after",    "again",   "against", "also",    "been",      "before",
      "being",  "below",   "between",  "both",    "could",   "does",    "doing",     "down",
      "during", "each",    "even",     "ever",    "every",   "from",    "further",   "have",
      "having", "here",    "hers",     "herself", "himself", "into",    "itself",    "just",
      "like",   "more",    "most",     "much",    "must",    "myself",  "only",      "other",
      "ours",   "over",    "same",     "shall",   "should",  "some",    "such",      "than",
      "that",   "their",   "theirs",   "them",    "then",    "there",   "these",     "they",
      "this",   "those",   "through",  "under",   "until",   "upon",    "very",      "were",
      "what",   "when",    "where",    "which",   "while",   "whom",    "whose",     "will",
      "with",   "within",  "without",  "would",   "your",    "yours",   "yourself",  "ourselves",
      "themselves", "yourselves",
  };
  return words;
}

void validate_extraction_config(const ExtractionConfig& cfg) {
  if (cfg.count < 1) throw Error(ErrorCode::ConfigError, "extraction count must be >= 1");
  if (cfg.min_keyword_length < 1) {
    throw Error(ErrorCode::ConfigError, "min_keyword_length must be >= 1");
  }
  if (cfg.max_end_phrase_words < 1) {
    throw Error(ErrorCode::ConfigError, "max_end_phrase_words must be >= 1");
  }
}

namespace {

bool all_digits(std::string_view w) {
  return std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; });
}

struct Candidates {
  std::map<ConstraintType, std::vector<HardConstraint>> by_type;

  void add(HardConstraint c) { by_type[constraint_type(c)].push_back(std::move(c)); }
};

Candidates measure(const TokenizedText& t, const ExtractionConfig& cfg, Rng& rng) {
  Candidates out;
  const auto n_words = static_cast<std::int64_t>(t.words.size());
  out.add(constraint::NumParagraphs{static_cast<std::int64_t>(t.paragraphs.size())});
  out.add(constraint::NumWords{Relation::Around, n_words});
  if (!t.sentences.empty()) {
    out.add(constraint::NumSentences{Relation::Around, static_cast<std::int64_t>(t.sentences.size())});
  }
  if (t.uppercase_letters > 0 && t.lowercase_letters == 0) out.add(constraint::AllUppercase{});
  if (t.lowercase_letters > 0 && t.uppercase_letters == 0) out.add(constraint::AllLowercase{});

  // Distinct content words in first-occurrence order.
  std::vector<std::string> content;
  std::map<std::string, std::int64_t> freq;
  for (const auto& w : t.words) {
    const auto& n = w.normalized;
    if (n.empty() || all_digits(n) || cfg.stopwords.count(n) > 0) continue;
    if (static_cast<std::int64_t>(text::count_code_points(n)) < cfg.min_keyword_length) continue;
    if (freq[n]++ == 0) content.push_back(n);
  }
  for (const auto& w : content) {
    out.add(constraint::IncludeKeyword{w});
    out.add(constraint::KeywordFrequency{w, freq[w]});
  }

  // Final sentence, cut to its last max_end_phrase_words words.
  const auto trimmed_end = text::trim_right(t.raw).size();
  if (trimmed_end > 0 && !t.sentences.empty()) {
    const auto last = t.sentences.back();
    std::size_t start = last.begin;
    std::size_t words_in = 0;
    for (std::size_t i = t.words.size(); i-- > 0;) {
      if (t.words[i].span.begin < last.begin) break;
      if (++words_in > static_cast<std::size_t>(cfg.max_end_phrase_words)) break;
      start = t.words[i].span.begin;
    }
    auto phrase = std::string(t.raw.substr(start, trimmed_end - start));
    if (text::has_non_space(phrase)) out.add(constraint::EndPhrase{std::move(phrase)});
  }

  for (std::size_t i = 0; i < std::min<std::size_t>(5, t.words.size()); ++i) {
    if (!t.words[i].normalized.empty()) {
      out.add(constraint::WordAtPosition{static_cast<std::int64_t>(i + 1), t.words[i].normalized});
    }
  }

  // Ordered pairs of distinct content words, sampled to bound the candidate count.
  if (content.size() >= 2) {
    const std::size_t pairs = std::min<std::size_t>(content.size() * (content.size() - 1) / 2,
                                                    static_cast<std::size_t>(cfg.count));
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t tries = 0; seen.size() < pairs && tries < 8 * pairs; ++tries) {
      auto a = static_cast<std::size_t>(uniform_below(rng, content.size()));
      auto b = static_cast<std::size_t>(uniform_below(rng, content.size()));
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      if (seen.insert({a, b}).second) out.add(constraint::WordOrder{content[a], content[b]});
    }
  }
  return out;
}

}  // namespace

std::vector<HardConstraint> extract_hard_attributes(std::string_view text,
                                                    const ExtractionConfig& cfg) {
  validate_extraction_config(cfg);
  if (!text::has_non_space(text)) throw Error(ErrorCode::EmptyText, "document text is empty");
  const auto tokens = tokenize(std::string(text));
  Rng rng(cfg.rng_seed);
  auto candidates = measure(tokens, cfg, rng);

  // Keep only catalog types whose candidates the text satisfies. The
  // verifier pass guards against any drift between measurement and checking.
  std::vector<std::vector<HardConstraint>> buckets;
  for (auto& [type, list] : candidates.by_type) {
    if (!cfg.catalog.empty() &&
        std::find(cfg.catalog.begin(), cfg.catalog.end(), type) == cfg.catalog.end()) {
      continue;
    }
    std::vector<HardConstraint> ok;
    for (auto& c : list) {
      if (is_valid_constraint(c) && verify(c, tokens, {}, cfg.verifier).satisfied) {
        ok.push_back(std::move(c));
      } else {
        spdlog::debug("dropping unsatisfied extraction candidate of type {}",
                      constraint_type_name(type));
      }
    }
    if (!ok.empty()) buckets.push_back(std::move(ok));
  }

  std::vector<HardConstraint> out;
  while (static_cast<std::int64_t>(out.size()) < cfg.count && !buckets.empty()) {
    const auto b = static_cast<std::size_t>(uniform_below(rng, buckets.size()));
    auto& list = buckets[b];
    const auto i = static_cast<std::size_t>(uniform_below(rng, list.size()));
    out.push_back(std::move(list[i]));
    list.erase(list.begin() + static_cast<std::ptrdiff_t>(i));
    if (list.empty()) buckets.erase(buckets.begin() + static_cast<std::ptrdiff_t>(b));
  }
  return out;
}

std::uint64_t extraction_seed(std::uint64_t base, std::string_view doc_id) { return mix_seed(base, doc_id); }

std::vector<Attribute> extract_document(std::string_view doc_id, std::string_view text,
                                        const ExtractionConfig& cfg) {
  ExtractionConfig seeded = cfg;
  seeded.rng_seed = extraction_seed(cfg.rng_seed, doc_id);
  std::vector<Attribute> out;
  for (auto& c : extract_hard_attributes(text, seeded)) {
    auto a = Attribute::hard(fmt::format("{}-h{}", doc_id, out.size()), std::move(c));
    a.source_doc = std::string(doc_id);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace efcg
