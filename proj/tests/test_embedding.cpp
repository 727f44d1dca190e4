#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "efcg/embedding.hpp"
#include "efcg/error.hpp"

using namespace efcg;

namespace {

EmbeddingVector sem(std::vector<double> v) { return {std::move(v), Space::Semantic}; }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an efcg::Error");
  return ErrorCode::IoError;
}

// Textbook cosine, written independently of the library.
double naive_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

std::vector<double> unit(double degrees) {
  const double r = degrees * std::acos(-1.0) / 180.0;
  return {std::cos(r), std::sin(r)};
}

}  // namespace

TEST_CASE("cosine_similarity: basic values") {
  CHECK(cosine_similarity(sem({3, 4}), sem({3, 4})) == doctest::Approx(1.0));
  CHECK(cosine_similarity(sem({1, 0}), sem({0, 1})) == 0.0);
  const double diag = cosine_similarity(sem({1, 1}), sem({1, 0}));
  CHECK(std::abs(diag - std::sqrt(2.0) / 2) < 1e-6);
  CHECK(std::abs(diag - 0.70711) < 5e-6);  // 0.70711 is sqrt(2)/2 at five decimals
  CHECK(cosine_similarity(sem({1, 2}), sem({-1, -2})) == doctest::Approx(-1.0));
  const EmbeddingVector odd = sem({0.1, 0.7, 1.3, 1e-9});
  CHECK(cosine_similarity(odd, odd) <= 1.0);
}

TEST_CASE("cosine_similarity: errors") {
  CHECK(code_of([] { cosine_similarity(sem({1, 0}), sem({1, 0, 0})); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([] { cosine_similarity(sem({0, 0}), sem({1, 0})); }) == ErrorCode::ZeroNorm);
  CHECK(code_of([] {
          cosine_similarity(sem({1, 0}), EmbeddingVector{{1, 0}, Space::Correlation});
        }) == ErrorCode::SpaceMismatch);
}

TEST_CASE("property: cosine is symmetric and scale invariant") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int iter = 0; iter < 1000; ++iter) {
    const std::size_t dim = 1 + rng() % 16;
    std::vector<double> a(dim), b(dim);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    const double ab = cosine_similarity(sem(a), sem(b));
    CHECK(ab == cosine_similarity(sem(b), sem(a)));
    const double alpha = std::exp(g(rng) * 3);
    auto scaled = a;
    for (auto& x : scaled) x *= alpha;
    CHECK(cosine_similarity(sem(scaled), sem(b)) == doctest::Approx(ab).epsilon(1e-12));
    CHECK(ab == doctest::Approx(naive_cosine(a, b)).epsilon(1e-12));
    CHECK(ab >= -1.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("VectorStore: add validates dimension, duplicates and values") {
  VectorStore store;
  store.add("a", sem({1, 0}));
  store.add("a", EmbeddingVector{{1, 0, 0}, Space::Correlation});
  CHECK(store.size(Space::Semantic) == 1);
  CHECK(store.dim(Space::Correlation) == 3);
  CHECK(code_of([&] { store.add("b", sem({1, 0, 0})); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { store.add("a", sem({0, 1})); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { store.add("c", sem({NAN, 1})); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { store.add("d", sem({})); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { store.get("zz", Space::Semantic); }) == ErrorCode::UnknownId);
  CHECK(store.get("a", Space::Semantic).values == std::vector<double>{1, 0});
}

TEST_CASE("top_k: k larger than the store returns everyone sorted") {
  VectorStore store;
  store.add("q", sem(unit(0)));
  store.add("x", sem(unit(80)));
  store.add("y", sem(unit(10)));
  store.add("z", sem(unit(45)));
  const auto r = store.top_k("q", 1024, Space::Semantic);
  REQUIRE(r.size() == 3);
  CHECK(r[0].id == "y");
  CHECK(r[1].id == "z");
  CHECK(r[2].id == "x");
  CHECK(code_of([&] { store.top_k("nope", 3, Space::Semantic); }) == ErrorCode::UnknownId);
}

TEST_CASE("top_k: k = 1 returns the analytically nearest id") {
  VectorStore store;
  const std::vector<std::pair<std::string, double>> angles = {
      {"q", 30}, {"a", 100}, {"b", 52}, {"c", -5}, {"d", 170}, {"e", 200}};
  for (const auto& [id, deg] : angles) store.add(id, sem(unit(deg)));
  // Brute force: smallest angular distance from 30 degrees.
  std::string best;
  double best_sim = -2;
  for (const auto& [id, deg] : angles) {
    if (id == "q") continue;
    const double s = naive_cosine(unit(30), unit(deg));
    if (s > best_sim) best_sim = s, best = id;
  }
  const auto r = top_k(store, "q", 1, Space::Semantic);
  REQUIRE(r.size() == 1);
  CHECK(r[0].id == best);
  CHECK(r[0].id == "b");
}

TEST_CASE("top_k: identical vectors tie-break by id") {
  VectorStore store;
  store.add("q", sem({1, 0}));
  store.add("m", sem({2, 1}));
  store.add("c", sem({2, 1}));
  store.add("k", sem({2, 1}));
  store.add("zero", sem({0, 0}));
  for (int i = 0; i < 5; ++i) {
    const auto r = store.top_k("q", 10, Space::Semantic);
    REQUIRE(r.size() == 3);  // zero-norm entry skipped
    CHECK(r[0].id == "c");
    CHECK(r[1].id == "k");
    CHECK(r[2].id == "m");
  }
  CHECK(code_of([&] { store.top_k("zero", 1, Space::Semantic); }) == ErrorCode::ZeroNorm);
}

TEST_CASE("property: top_k with k = |store| - 1 matches a brute-force sort") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int iter = 0; iter < 30; ++iter) {
    VectorStore store;
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    const std::size_t n = 2 + rng() % 60;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(8);
      for (auto& x : v) x = std::round(g(rng) * 2);  // coarse values force ties
      if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0; })) v[0] = 1;
      rows.emplace_back("id" + std::to_string(rng() % 1000000) + "_" + std::to_string(i), v);
      store.add(rows.back().first, sem(v));
    }
    const auto& query = rows[0];
    std::vector<Neighbor> expected;
    for (std::size_t i = 1; i < n; ++i) {
      expected.push_back({rows[i].first, store.similarity(query.first, rows[i].first, Space::Semantic)});
    }
    std::sort(expected.begin(), expected.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.similarity > b.similarity || (a.similarity == b.similarity && a.id < b.id);
    });
    CHECK(store.top_k(query.first, n - 1, Space::Semantic) == expected);
    CHECK(store.top_k(query.first, n - 1, Space::Semantic, 4) == expected);
  }
}

TEST_CASE("triplet_accuracy: trivial extremes") {
  VectorStore store;
  store.add("a", sem({1, 0}));
  store.add("p", sem({1, 0}));
  store.add("n", sem({0, 1}));
  CHECK(triplet_accuracy(store, {{"a", "p", "n"}}, Space::Semantic) == 1);
  CHECK(triplet_accuracy(store, {{"a", "n", "p"}}, Space::Semantic) == 0);
  CHECK(code_of([&] { triplet_accuracy(store, {}, Space::Semantic); }) == ErrorCode::EmptyInput);
  CHECK(code_of([&] { triplet_accuracy(store, {{"a", "p", "x"}}, Space::Semantic); }) ==
        ErrorCode::UnknownId);
  CHECK(code_of([&] { triplet_accuracy(store, {{"a", "a", "n"}}, Space::Semantic); }) ==
        ErrorCode::InvalidAttribute);
}

TEST_CASE("triplet_accuracy: ten hand-built triplets, seven correct") {
  VectorStore store;
  for (int deg = 0; deg < 360; deg += 10) store.add("v" + std::to_string(deg), sem(unit(deg)));
  auto id = [](int deg) { return "v" + std::to_string(deg); };
  // Anchor, positive, negative angles. Seven have the positive closer.
  const std::vector<std::array<int, 3>> cases = {
      {0, 10, 90},  {0, 20, 180},  {90, 80, 0},    {90, 100, 270}, {180, 170, 30},
      {180, 200, 0}, {270, 260, 90}, {0, 90, 20},  {90, 200, 100}, {180, 10, 170}};
  std::vector<Triplet> triplets;
  int brute_correct = 0;
  for (const auto& [a, p, n] : cases) {
    triplets.push_back({id(a), id(p), id(n)});
    if (naive_cosine(unit(a), unit(p)) > naive_cosine(unit(a), unit(n))) ++brute_correct;
  }
  REQUIRE(brute_correct == 7);
  CHECK(triplet_accuracy(store, triplets, Space::Semantic) == Rational(7, 10));
}

TEST_CASE("property: accuracy(T) + accuracy(swap T) <= 1, equal without ties") {
  std::mt19937_64 rng(31);
  VectorStore store;
  const int n = 40;
  for (int i = 0; i < n; ++i) {
    // Some duplicate vectors so ties occur.
    const int group = static_cast<int>(rng() % 25);
    store.add("a" + std::to_string(i), sem({std::cos(group), std::sin(group), 0.5}));
  }
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Triplet> t, swapped;
    bool tie = false;
    for (int j = 0; j < 8; ++j) {
      std::array<int, 3> ids{};
      do {
        for (auto& x : ids) x = static_cast<int>(rng() % n);
      } while (ids[0] == ids[1] || ids[0] == ids[2] || ids[1] == ids[2]);
      const auto a = "a" + std::to_string(ids[0]);
      const auto p = "a" + std::to_string(ids[1]);
      const auto q = "a" + std::to_string(ids[2]);
      t.push_back({a, p, q});
      swapped.push_back({a, q, p});
      tie = tie || store.similarity(a, p, Space::Semantic) == store.similarity(a, q, Space::Semantic);
    }
    const auto sum = triplet_accuracy(store, t, Space::Semantic) +
                     triplet_accuracy(store, swapped, Space::Semantic);
    CHECK(sum <= 1);
    if (!tie) CHECK(sum == 1);
  }
}

TEST_CASE("vectors JSONL round trip") {
  VectorStore store;
  store.add("a", sem({0.25, -1.5}));
  store.add("b", sem({1e-3, 2}));
  store.add("a", EmbeddingVector{{1, 2, 3}, Space::Correlation});
  std::stringstream ss;
  write_vectors_jsonl(ss, store);
  const auto text = ss.str();
  std::stringstream in(text);
  const auto back = read_vectors_jsonl(in);
  CHECK(back.ids(Space::Semantic) == store.ids(Space::Semantic));
  CHECK(back.get("b", Space::Semantic).values == store.get("b", Space::Semantic).values);
  CHECK(back.get("a", Space::Correlation).values == std::vector<double>{1, 2, 3});
  std::stringstream again;
  write_vectors_jsonl(again, back);
  CHECK(again.str() == text);

  std::stringstream bad_space(R"({"id":"a","space":"other","values":[1]})");
  CHECK(code_of([&] { read_vectors_jsonl(bad_space); }) == ErrorCode::ParseError);
  std::stringstream extra(R"({"id":"a","space":"semantic","values":[1],"x":1})");
  CHECK(code_of([&] { read_vectors_jsonl(extra); }) == ErrorCode::ParseError);
  std::stringstream extra2(R"({"id":"a","space":"semantic","values":[1],"x":1})");
  CHECK(read_vectors_jsonl(extra2, ParseMode::Lenient).size(Space::Semantic) == 1);
}
