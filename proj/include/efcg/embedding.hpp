#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "efcg/rational.hpp"
#include "efcg/serialization.hpp"

namespace efcg {

// Semantic: the base sentence encoder, used for redundancy checks.
// Correlation: the contrastively tuned encoder, used for retrieval.
enum class Space { Semantic, Correlation };

std::string_view space_name(Space s);
std::optional<Space> parse_space(std::string_view name);

struct EmbeddingVector {
  std::vector<double> values;
  Space space = Space::Semantic;

  std::size_t dim() const { return values.size(); }
  double norm() const;
};

// Throws ParseError for an empty vector or non-finite values.
void validate_vector(const EmbeddingVector& v);

// u.v / (|u||v|), clamped to [-1, 1].
// Throws SpaceMismatch, DimensionMismatch or ZeroNorm.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

struct Neighbor {
  std::string id;
  double similarity = 0.0;
  bool operator==(const Neighbor&) const = default;
};

// Exact-scan vector store keyed by attribute id, one table per space. Build
// it with add(), then treat it as read-only; concurrent const queries are
// safe.
class VectorStore {
 public:
  // Throws DimensionMismatch if the space already holds vectors of another
  // dimension and ParseError on a duplicate id or invalid values.
  void add(std::string id, EmbeddingVector v);

  bool contains(std::string_view id, Space space) const;
  // Throws UnknownId.
  EmbeddingVector get(std::string_view id, Space space) const;
  std::size_t size(Space space) const;
  std::size_t dim(Space space) const;
  // Ids in insertion order.
  const std::vector<std::string>& ids(Space space) const;

  // Throws UnknownId or ZeroNorm.
  double similarity(std::string_view a, std::string_view b, Space space) const;

  // The k most similar ids to query_id (query excluded, zero-norm entries
  // skipped), by descending similarity with ties broken by ascending id.
  std::vector<Neighbor> top_k(std::string_view query_id, std::size_t k, Space space,
                              std::size_t max_workers = 1) const;

 private:
  struct Table {
    std::size_t dim = 0;
    std::vector<std::string> ids;
    std::vector<double> data;  // row-major
    std::vector<double> norms;
    std::unordered_map<std::string, std::size_t> index;
  };

  const Table& table(Space s) const { return tables_[static_cast<std::size_t>(s)]; }
  Table& table(Space s) { return tables_[static_cast<std::size_t>(s)]; }
  std::size_t row(std::string_view id, Space space) const;
  double row_similarity(const Table& t, std::size_t a, std::size_t b) const;

  Table tables_[2];
};

std::vector<Neighbor> top_k(const VectorStore& store, std::string_view query_id, std::size_t k,
                            Space space);

struct Triplet {
  std::string anchor_id;
  std::string positive_id;
  std::string negative_id;
};

// Fraction of triplets with sim(anchor, positive) > sim(anchor, negative).
// Ties count as failures. Throws EmptyInput, UnknownId, or InvalidAttribute
// when a triplet repeats an id.
Rational triplet_accuracy(const VectorStore& store, const std::vector<Triplet>& triplets,
                          Space space);

// JSONL: {"id", "space": "semantic"|"correlation", "values": [...]}.
VectorStore read_vectors_jsonl(std::istream& in, ParseMode mode = ParseMode::Strict);
void write_vectors_jsonl(std::ostream& out, const VectorStore& store);
json vector_record_to_json(std::string_view id, const EmbeddingVector& v);

}  // namespace efcg
