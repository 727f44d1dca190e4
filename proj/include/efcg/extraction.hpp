#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "efcg/types.hpp"
#include "efcg/verifier.hpp"

namespace efcg {

// Small English stopword list; only words of four or more letters matter.
const std::set<std::string>& default_stopwords();

struct ExtractionConfig {
  std::int64_t count = 38;  // hard attributes per document, fewer if not enough candidates
  std::uint64_t rng_seed = 0;
  // Constraint types to draw from; empty means all.
  std::vector<ConstraintType> catalog;
  std::int64_t min_keyword_length = 4;  // in code points
  std::set<std::string> stopwords = default_stopwords();
  std::int64_t max_end_phrase_words = 12;
  VerifierOptions verifier;
};

// Throws ConfigError.
void validate_extraction_config(const ExtractionConfig& cfg);

// Hard constraints that the text itself satisfies, measured from the text.
// Selection draws a type uniformly among types with candidates left, then a
// candidate of that type, so one type cannot crowd out the rest. Throws
// EmptyText.
std::vector<HardConstraint> extract_hard_attributes(std::string_view text,
                                                    const ExtractionConfig& cfg);

// Per-document seed derived from the base seed and the document id.
std::uint64_t extraction_seed(std::uint64_t base, std::string_view doc_id);

// Extraction wrapped as attributes with ids "<doc_id>-h<index>" and
// source_doc set, seeded by extraction_seed(cfg.rng_seed, doc_id).
std::vector<Attribute> extract_document(std::string_view doc_id, std::string_view text,
                                        const ExtractionConfig& cfg);

}  // namespace efcg
