#include "efcg/embedding.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "efcg/error.hpp"
#include "efcg/parallel.hpp"

namespace efcg {

std::string_view space_name(Space s) {
  return s == Space::Semantic ? "semantic" : "correlation";
}

std::optional<Space> parse_space(std::string_view name) {
  if (name == "semantic") return Space::Semantic;
  if (name == "correlation") return Space::Correlation;
  return std::nullopt;
}

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double cosine(const double* a, const double* b, std::size_t n, double norm_a, double norm_b) {
  return std::clamp(dot(a, b, n) / (norm_a * norm_b), -1.0, 1.0);
}

bool ranks_before(const Neighbor& x, const Neighbor& y) {
  if (x.similarity != y.similarity) return x.similarity > y.similarity;
  return x.id < y.id;
}

}  // namespace

double EmbeddingVector::norm() const { return std::sqrt(dot(values.data(), values.data(), dim())); }

void validate_vector(const EmbeddingVector& v) {
  if (v.values.empty()) {
    throw Error(ErrorCode::ParseError, "embedding vector must have dim >= 1");
  }
  for (double x : v.values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::ParseError, "embedding vector has a non-finite value");
  }
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.space != v.space) {
    throw Error(ErrorCode::SpaceMismatch, fmt::format("cannot compare {} and {} vectors",
                                                      space_name(u.space), space_name(v.space)));
  }
  if (u.dim() != v.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("dimensions differ: {} vs {}", u.dim(), v.dim()));
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::ZeroNorm, "zero-norm vector");
  return cosine(u.values.data(), v.values.data(), u.dim(), nu, nv);
}

void VectorStore::add(std::string id, EmbeddingVector v) {
  validate_vector(v);
  Table& t = table(v.space);
  if (t.ids.empty()) {
    t.dim = v.dim();
  } else if (t.dim != v.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("vector '{}' has dim {}, {} space uses {}", id, v.dim(),
                            space_name(v.space), t.dim));
  }
  if (t.index.count(id) > 0) {
    throw Error(ErrorCode::ParseError,
                fmt::format("duplicate {} vector for '{}'", space_name(v.space), id));
  }
  t.index.emplace(id, t.ids.size());
  t.ids.push_back(std::move(id));
  t.norms.push_back(v.norm());
  t.data.insert(t.data.end(), v.values.begin(), v.values.end());
}

bool VectorStore::contains(std::string_view id, Space space) const {
  return table(space).index.count(std::string(id)) > 0;
}

std::size_t VectorStore::row(std::string_view id, Space space) const {
  const auto& t = table(space);
  const auto it = t.index.find(std::string(id));
  if (it == t.index.end()) {
    throw Error(ErrorCode::UnknownId, fmt::format("no {} vector for '{}'", space_name(space), id));
  }
  return it->second;
}

EmbeddingVector VectorStore::get(std::string_view id, Space space) const {
  const auto& t = table(space);
  const std::size_t r = row(id, space);
  const auto begin = t.data.begin() + static_cast<std::ptrdiff_t>(r * t.dim);
  return {std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(t.dim)), space};
}

std::size_t VectorStore::size(Space space) const { return table(space).ids.size(); }
std::size_t VectorStore::dim(Space space) const { return table(space).dim; }
const std::vector<std::string>& VectorStore::ids(Space space) const { return table(space).ids; }

double VectorStore::row_similarity(const Table& t, std::size_t a, std::size_t b) const {
  return cosine(&t.data[a * t.dim], &t.data[b * t.dim], t.dim, t.norms[a], t.norms[b]);
}

double VectorStore::similarity(std::string_view a, std::string_view b, Space space) const {
  const auto& t = table(space);
  const std::size_t ra = row(a, space);
  const std::size_t rb = row(b, space);
  if (t.norms[ra] == 0.0 || t.norms[rb] == 0.0) {
    throw Error(ErrorCode::ZeroNorm, fmt::format("zero-norm vector among '{}', '{}'", a, b));
  }
  return row_similarity(t, ra, rb);
}

std::vector<Neighbor> VectorStore::top_k(std::string_view query_id, std::size_t k, Space space,
                                         std::size_t max_workers) const {
  const auto& t = table(space);
  const std::size_t q = row(query_id, space);
  if (t.norms[q] == 0.0) {
    throw Error(ErrorCode::ZeroNorm, fmt::format("query '{}' has a zero-norm vector", query_id));
  }
  if (k == 0) return {};

  // Each chunk keeps its own best k; the merged list is then cut to k.
  constexpr std::size_t kChunk = 16384;
  const std::size_t rows = t.ids.size();
  const std::size_t chunks = (rows + kChunk - 1) / kChunk;
  std::vector<std::vector<Neighbor>> partial(chunks);
  parallel_for(chunks, max_workers, [&](std::size_t c) {
    auto& best = partial[c];
    const std::size_t end = std::min(rows, (c + 1) * kChunk);
    for (std::size_t r = c * kChunk; r < end; ++r) {
      if (r == q || t.norms[r] == 0.0) continue;
      best.push_back({t.ids[r], row_similarity(t, q, r)});
    }
    if (best.size() > k) {
      std::partial_sort(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(k), best.end(),
                        ranks_before);
      best.resize(k);
    }
  });
  std::vector<Neighbor> merged;
  for (auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
  const std::size_t keep = std::min(k, merged.size());
  std::partial_sort(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(keep),
                    merged.end(), ranks_before);
  merged.resize(keep);
  return merged;
}

std::vector<Neighbor> top_k(const VectorStore& store, std::string_view query_id, std::size_t k,
                            Space space) {
  return store.top_k(query_id, k, space);
}

Rational triplet_accuracy(const VectorStore& store, const std::vector<Triplet>& triplets,
                          Space space) {
  if (triplets.empty()) throw Error(ErrorCode::EmptyInput, "no triplets");
  std::int64_t correct = 0;
  for (const auto& tr : triplets) {
    if (tr.anchor_id == tr.positive_id || tr.anchor_id == tr.negative_id ||
        tr.positive_id == tr.negative_id) {
      throw Error(ErrorCode::InvalidAttribute,
                  fmt::format("triplet ids must be distinct: {}, {}, {}", tr.anchor_id,
                              tr.positive_id, tr.negative_id));
    }
    const double pos = store.similarity(tr.anchor_id, tr.positive_id, space);
    const double neg = store.similarity(tr.anchor_id, tr.negative_id, space);
    correct += pos > neg ? 1 : 0;
  }
  return Rational(correct, static_cast<std::int64_t>(triplets.size()));
}

json vector_record_to_json(std::string_view id, const EmbeddingVector& v) {
  return {{"id", id}, {"space", space_name(v.space)}, {"values", v.values}};
}

VectorStore read_vectors_jsonl(std::istream& in, ParseMode mode) {
  VectorStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, fmt::format("vectors line {}: {}", line_no, e.what()));
    }
    const auto what = fmt::format("vector record on line {}", line_no);
    detail::reject_unknown_fields(j, {"id", "space", "values"}, mode, what);
    auto id = detail::require_string(j, "id", what);
    const auto space_str = detail::require_string(j, "space", what);
    const auto space = parse_space(space_str);
    if (!space) {
      throw Error(ErrorCode::ParseError, fmt::format("unknown space '{}' in {}", space_str, what));
    }
    const auto& values = detail::require_field(j, "values", what);
    if (!values.is_array()) throw Error(ErrorCode::ParseError, what + ": 'values' must be an array");
    EmbeddingVector v{{}, *space};
    v.values.reserve(values.size());
    for (const auto& x : values) {
      if (!x.is_number()) throw Error(ErrorCode::ParseError, what + ": non-numeric value");
      v.values.push_back(x.get<double>());
    }
    store.add(std::move(id), std::move(v));
  }
  return store;
}

void write_vectors_jsonl(std::ostream& out, const VectorStore& store) {
  for (Space s : {Space::Semantic, Space::Correlation}) {
    for (const auto& id : store.ids(s)) out << vector_record_to_json(id, store.get(id, s)).dump() << '\n';
  }
}

}  // namespace efcg
