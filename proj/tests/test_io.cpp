#include <doctest.h>

#include <random>

#include "efcg/config.hpp"
#include "efcg/dataset.hpp"
#include "efcg/error.hpp"
#include "efcg/extraction.hpp"
#include "efcg/text.hpp"
#include "efcg/verifier.hpp"
#include "support/documents.hpp"

using namespace efcg;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an efcg::Error");
  return ErrorCode::IoError;
}

AttributeSet as_set(const std::vector<HardConstraint>& cs) {
  AttributeSet s{"doc", {}, std::nullopt};
  for (const auto& c : cs) s.attributes.push_back(Attribute::hard("h" + std::to_string(s.attributes.size()), c));
  return s;
}

BenchRecord sample_record() {
  AttributeSet set{"doc-1",
                   {Attribute::soft("doc-1-s0", "Warm tone"),
                    Attribute::hard("doc-1-h0", constraint::NumWords{Relation::Around, 40})},
                   std::nullopt};
  return {"doc-1", std::string("Some text\n\nwith \"quotes\" and ünïcode."), set, Split::FineWeb,
          std::string("news")};
}

}  // namespace

TEST_CASE("BenchRecord: round trip and split rules") {
  const auto r = sample_record();
  CHECK(bench_record_from_json(bench_record_to_json(r)) == r);
  CHECK(bench_record_from_json(json::parse(bench_record_to_json(r).dump())) == r);

  BenchRecord multi = r;
  multi.split = Split::MultiSource;
  multi.raw_text.reset();
  multi.domain.reset();
  const auto j = bench_record_to_json(multi);
  CHECK_FALSE(j.contains("raw_text"));
  CHECK(j["split"] == "multi_source");
  CHECK(bench_record_from_json(j) == multi);

  auto no_text = bench_record_to_json(r);
  no_text.erase("raw_text");
  CHECK(code_of([&] { bench_record_from_json(no_text); }) == ErrorCode::ParseError);
  auto bad_split = bench_record_to_json(r);
  bad_split["split"] = "web";
  CHECK(code_of([&] { bench_record_from_json(bad_split); }) == ErrorCode::ParseError);
  auto extra = bench_record_to_json(r);
  extra["score"] = 1;
  CHECK(code_of([&] { bench_record_from_json(extra); }) == ErrorCode::ParseError);
  CHECK(bench_record_from_json(extra, ParseMode::Lenient) == r);
}

TEST_CASE("property: random records survive a round trip") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto text = efcg::testing::random_document(rng);
    BenchRecord r;
    r.doc_id = "d" + std::to_string(i);
    r.split = rng() % 2 ? Split::FineWeb : Split::MultiSource;
    if (r.split == Split::FineWeb || rng() % 2) r.raw_text = text;
    if (rng() % 2) r.domain = "dom";
    r.attributes.id = r.doc_id;
    r.attributes.attributes = extract_document(r.doc_id, text, ExtractionConfig{});
    r.attributes.attributes.push_back(Attribute::soft(r.doc_id + "-s0", "Mentions the harbor"));
    CHECK(bench_record_from_json(json::parse(bench_record_to_json(r).dump())) == r);
  }
}

TEST_CASE("extract_hard_attributes: self-consistency over random documents") {
  std::mt19937_64 rng(7);
  std::map<ConstraintType, int> seen;
  for (int i = 0; i < 1500; ++i) {
    const auto text = efcg::testing::random_document(rng);
    ExtractionConfig cfg;
    cfg.rng_seed = rng();
    const auto cs = extract_hard_attributes(text, cfg);
    REQUIRE_FALSE(cs.empty());
    CHECK(cs.size() <= 38);
    for (const auto& r : verify_all(as_set(cs), text)) {
      CHECK_MESSAGE(r.satisfied, r.detail);
    }
    for (const auto& c : cs) ++seen[constraint_type(c)];
  }
  CHECK(seen.size() == kConstraintTypeCount);
}

TEST_CASE("extract_hard_attributes: case, determinism and catalog") {
  const std::string lower = "the quiet harbor sleeps tonight.\n\nboats drift slowly under grey clouds.";
  ExtractionConfig cfg;
  cfg.count = 1000;
  const auto cs = extract_hard_attributes(lower, cfg);
  bool has_lower = false;
  for (const auto& c : cs) {
    CHECK(constraint_type(c) != ConstraintType::AllUppercase);
    has_lower = has_lower || constraint_type(c) == ConstraintType::AllLowercase;
    if (const auto* k = std::get_if<constraint::IncludeKeyword>(&c)) {
      CHECK(text::count_code_points(k->keyword) >= 4);
      CHECK(default_stopwords().count(k->keyword) == 0);
    }
  }
  CHECK(has_lower);
  CHECK(std::find(cs.begin(), cs.end(), HardConstraint{constraint::NumParagraphs{2}}) != cs.end());
  CHECK(std::find(cs.begin(), cs.end(), HardConstraint{constraint::WordAtPosition{1, "the"}}) != cs.end());
  CHECK(std::find(cs.begin(), cs.end(),
                  HardConstraint{constraint::EndPhrase{"boats drift slowly under grey clouds."}}) != cs.end());

  cfg.count = 5;
  cfg.rng_seed = 99;
  CHECK(extract_hard_attributes(lower, cfg) == extract_hard_attributes(lower, cfg));
  CHECK(extract_hard_attributes(lower, cfg).size() == 5);

  cfg.catalog = {ConstraintType::NumWords, ConstraintType::AllLowercase};
  cfg.count = 38;
  const auto only = extract_hard_attributes(lower, cfg);
  CHECK(only.size() == 2);

  CHECK(code_of([&] { extract_hard_attributes("", cfg); }) == ErrorCode::EmptyText);
  CHECK(code_of([&] { extract_hard_attributes(" \n ", cfg); }) == ErrorCode::EmptyText);
  cfg.count = 0;
  CHECK(code_of([&] { extract_hard_attributes(lower, cfg); }) == ErrorCode::ConfigError);
}

TEST_CASE("extract_document: ids, source and per-document seeds") {
  const std::string text = "Alpha beta gamma delta. Epsilon zeta eta theta iota kappa.";
  const auto a = extract_document("doc9", text, ExtractionConfig{});
  REQUIRE_FALSE(a.empty());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == "doc9-h" + std::to_string(i));
    CHECK(a[i].source_doc == "doc9");
  }
  CHECK(extraction_seed(0, "doc9") != extraction_seed(0, "doc10"));
  CHECK(extraction_seed(1, "doc9") != extraction_seed(0, "doc9"));
}

TEST_CASE("parse_toml: subset syntax") {
  const auto doc = parse_toml(
      "# comment\n"
      "[generator]\n"
      "base_url = \"http://x/v1\"  # trailing\n"
      "max_tokens = 1_000\n"
      "temperature = 0.5\n"
      "flag = true\n"
      "name = 'lit\\eral'\n"
      "esc = \"a\\tb\\u00e9\"\n"
      "list = [\"a\", 2, 3.5, false]\n"
      "empty = []\n");
  const auto& g = doc.at("generator");
  CHECK(std::get<std::string>(g.at("base_url")) == "http://x/v1");
  CHECK(std::get<std::int64_t>(g.at("max_tokens")) == 1000);
  CHECK(std::get<double>(g.at("temperature")) == 0.5);
  CHECK(std::get<bool>(g.at("flag")));
  CHECK(std::get<std::string>(g.at("name")) == "lit\\eral");
  CHECK(std::get<std::string>(g.at("esc")) == "a\tb\xC3\xA9");
  CHECK(std::get<std::vector<TomlScalar>>(g.at("list")).size() == 4);
  CHECK(std::get<std::vector<TomlScalar>>(g.at("empty")).empty());

  for (const char* bad : {"[a]\nx = 1\nx = 2", "[a]\nx = \"open", "[a]\nx = {a = 1}", "[a.b]",
                          "[[a]]", "[a]\nx = 1 2", "[a]\nx = [[1]]", "[a]\nx =", "[a]\na.b = 1",
                          "[a]\nx = 12abc", "[a]\nx = \"\\q\""}) {
    CAPTURE(bad);
    CHECK(code_of([&] { parse_toml(bad); }) == ErrorCode::ConfigError);
  }
}

TEST_CASE("config_from_toml: sections, defaults and errors") {
  const auto cfg = config_from_toml(parse_toml(
      "[generator]\nbase_url = \"http://127.0.0.1:9/v1\"\nmodel = \"m\"\nmax_tokens = 256\ntimeout_ms = 2000\n"
      "[judge]\nmodel = \"j\"\ntoken_env = \"JUDGE_TOKEN\"\n"
      "[embedding]\nurl = \"http://e/embed\"\nbatch_size = 8\n"
      "[expansion]\nredundancy_mode = \"seed_only\"\nsize_min = 12\nsize_max = 20\n"
      "[pairs]\nk_candidates = 3\nmin_margin = 0.1\n"
      "[verifier]\naround_tolerance_percent = 5\n"
      "[extraction]\ncount = 10\ncatalog = [\"num_words\", \"end_phrase\"]\nstopwords = [\"Harbor\"]\n"));
  CHECK(cfg.generator.model == "m");
  CHECK(cfg.generator.max_tokens == 256);
  CHECK(cfg.generator.timeout == std::chrono::milliseconds(2000));
  CHECK(cfg.judge.token_env == "JUDGE_TOKEN");
  CHECK(cfg.embedding.batch_size == 8);
  CHECK(cfg.expansion.redundancy_mode == RedundancyMode::SeedOnly);
  CHECK(cfg.expansion.size_min == 12);
  CHECK(cfg.pairs.k_candidates == 3);
  CHECK(cfg.pairs.verifier.around_tolerance_percent == 5);
  CHECK(cfg.extraction.verifier.around_tolerance_percent == 5);
  CHECK(cfg.extraction.catalog.size() == 2);
  CHECK(cfg.extraction.stopwords == std::set<std::string>{"harbor"});

  const auto defaults = config_from_toml(parse_toml(""));
  CHECK(defaults.expansion.size_max == 110);
  CHECK(defaults.extraction.count == 38);

  for (const char* bad : {"[generatr]\nmodel = \"m\"", "[generator]\nmodle = \"m\"",
                          "[generator]\napi_key = \"sk-1\"", "[judge]\ntoken = \"abc\"",
                          "[expansion]\nsize_min = \"ten\"", "[expansion]\nsize_min = 50\nsize_max = 20",
                          "[expansion]\nredundancy_mode = \"some\"", "[pairs]\nk_candidates = 1",
                          "[embedding]\nbatch_size = -1", "[extraction]\ncatalog = [\"bogus\"]",
                          "[generator]\ntimeout_ms = 0", "model = \"m\""}) {
    CAPTURE(bad);
    CHECK(code_of([&] { config_from_toml(parse_toml(bad)); }) == ErrorCode::ConfigError);
  }
  CHECK(code_of([] { load_config("/nonexistent/efcg.toml"); }) == ErrorCode::ConfigError);
}
