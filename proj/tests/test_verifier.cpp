#include <doctest.h>

#include <string>

#include "efcg/error.hpp"
#include "efcg/verifier.hpp"
#include "support/oracle_verifier.hpp"
#include "support/random_cases.hpp"

using namespace efcg;

namespace {

std::string repeat_words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w");
  return s;
}

bool sat(const HardConstraint& c, std::string_view text) { return verify(c, text).satisfied; }

}  // namespace

TEST_CASE("tokenize: empty input") {
  const auto t = tokenize("");
  CHECK(t.words.empty());
  CHECK(t.sentences.empty());
  CHECK(t.paragraphs.empty());
}

TEST_CASE("tokenize: words, sentences and paragraphs by hand count") {
  const auto t = tokenize("Hi there.\n\nBye.");
  CHECK(t.words.size() == 3);
  CHECK(t.sentences.size() == 2);
  CHECK(t.paragraphs.size() == 2);

  const auto w = tokenize("a b  c");
  REQUIRE(w.words.size() == 3);
  CHECK(w.word_text(0) == "a");
  CHECK(w.word_text(1) == "b");
  CHECK(w.word_text(2) == "c");
}

TEST_CASE("tokenize: paragraph separators and blank segments") {
  CHECK(tokenize("one\ntwo").paragraphs.size() == 1);
  CHECK(tokenize("one\n\n\n\ntwo").paragraphs.size() == 2);
  CHECK(tokenize("\n\none\n\n\n\n").paragraphs.size() == 1);
  CHECK(tokenize("one\n\n  \n\ntwo").paragraphs.size() == 2);
}

TEST_CASE("tokenize: sentence rules") {
  CHECK(tokenize("Wow!!! Yes").sentences.size() == 2);
  CHECK(tokenize("v1.2 is out").sentences.size() == 1);
  CHECK(tokenize("Dr. Smith left.").sentences.size() == 2);  // no abbreviation handling
  CHECK(tokenize("   ").sentences.empty());
  CHECK(tokenize("He said \"hi.\" Then left").sentences.size() == 1);
}

TEST_CASE("tokenize: normalized forms strip outer punctuation and lowercase") {
  const auto t = tokenize("\"Hello,\" (WORLD) state-of-the-art ÉTÉ!");
  REQUIRE(t.words.size() == 4);
  CHECK(t.words[0].normalized == "hello");
  CHECK(t.words[1].normalized == "world");
  CHECK(t.words[2].normalized == "state-of-the-art");
  CHECK(t.words[3].normalized == "été");
}

TEST_CASE("tokenize: Unicode whitespace separates words") {
  const auto t = tokenize("a　b c d");
  CHECK(t.words.size() == 4);
}

TEST_CASE("invariant: paragraph word counts sum to the total") {
  testing::CaseGenerator gen(11);
  for (int i = 0; i < 2000; ++i) {
    const auto t = tokenize(gen.text());
    std::size_t sum = 0;
    for (const auto& p : t.paragraphs) sum += p.word_count;
    CHECK(sum == t.words.size());
  }
}

TEST_CASE("verify: worked examples") {
  CHECK(sat(constraint::AllLowercase{}, "hello world"));
  CHECK(sat(constraint::KeywordFrequency{"the", 2}, "The cat saw the dog"));
  CHECK_FALSE(sat(constraint::NumWords{Relation::Around, 100}, repeat_words(89)));
  CHECK(sat(constraint::NumWords{Relation::Around, 100}, repeat_words(90)));
  CHECK_FALSE(sat(constraint::WordOrder{"alpha", "beta"}, "beta then alpha"));
  CHECK(sat(constraint::EndPhrase{"The end."}, "Story. The end."));
}

TEST_CASE("verify: keyword matching is word-bounded and case-insensitive") {
  CHECK_FALSE(sat(constraint::IncludeKeyword{"cat"}, "concatenate strings"));
  CHECK(sat(constraint::IncludeKeyword{"Cat"}, "A CAT, sleeping."));
  CHECK(sat(constraint::IncludeKeyword{"chain of thought"}, "Use Chain of Thought, please"));
  CHECK_FALSE(sat(constraint::IncludeKeyword{"chain of thought"}, "chain of the thought"));
  CHECK(sat(constraint::KeywordFrequency{"dog", 0}, "no canines here"));
  CHECK_FALSE(sat(constraint::KeywordFrequency{"dog", 0}, "a dog"));
}

TEST_CASE("verify: case constraints need a cased letter") {
  CHECK_FALSE(sat(constraint::AllUppercase{}, "123 !!"));
  CHECK_FALSE(sat(constraint::AllLowercase{}, "123 !!"));
  CHECK(sat(constraint::AllUppercase{}, "SHOUT 42"));
  CHECK(sat(constraint::AllLowercase{}, "中文 and latin"));
  CHECK_FALSE(sat(constraint::AllLowercase{}, "中文"));  // uncased script alone
  CHECK_FALSE(sat(constraint::AllLowercase{}, "cafÉ"));
}

TEST_CASE("verify: end phrase is exact and trims only trailing whitespace") {
  CHECK(sat(constraint::EndPhrase{"Bye now."}, "Hello. Bye now.\n\n  "));
  CHECK_FALSE(sat(constraint::EndPhrase{"bye now."}, "Hello. Bye now."));
  CHECK_FALSE(sat(constraint::EndPhrase{"Bye now."}, "Bye now. Extra"));
}

TEST_CASE("verify: word position") {
  CHECK(sat(constraint::WordAtPosition{2, "Quick"}, "The quick, brown fox"));
  CHECK_FALSE(sat(constraint::WordAtPosition{5, "fox"}, "The quick brown fox"));
  CHECK_FALSE(sat(constraint::WordAtPosition{1, "quick"}, "The quick brown fox"));
}

TEST_CASE("verify: around tolerance") {
  CHECK(around_tolerance(5) == 1);
  CHECK(around_tolerance(15) == 2);
  CHECK(around_tolerance(100) == 10);
  CHECK(around_tolerance(104) == 10);
  CHECK(around_tolerance(105) == 11);
  VerifierOptions wide{25, 2};
  CHECK(around_tolerance(4, wide) == 2);
  CHECK(around_tolerance(40, wide) == 10);
}

TEST_CASE("verify: unsatisfied results always carry a detail") {
  testing::CaseGenerator gen(5);
  for (int i = 0; i < 3000; ++i) {
    const auto text = gen.text();
    const auto type = kAllConstraintTypes[gen.below(kConstraintTypeCount)];
    const auto r = verify(gen.constraint(type, text), text);
    CHECK_FALSE(r.detail.empty());
  }
}

TEST_CASE("verify_all: one result per hard attribute in set order") {
  AttributeSet set{"s",
                   {Attribute::hard("h1", constraint::AllUppercase{}),
                    Attribute::soft("s1", "warm tone"),
                    Attribute::hard("h2", constraint::AllLowercase{}),
                    Attribute::hard("h3", constraint::NumWords{Relation::AtLeast, 1})},
                   std::nullopt};
  const auto first = verify_all(set, "MiXeD");
  REQUIRE(first.size() == 3);
  CHECK(first[0].attribute_id == "h1");
  CHECK(first[1].attribute_id == "h2");
  CHECK(first[2].attribute_id == "h3");
  CHECK_FALSE(first[0].satisfied);
  CHECK_FALSE(first[1].satisfied);
  CHECK(first[2].satisfied);
  CHECK(verify_all(set, "MiXeD") == first);

  AttributeSet soft_only{"s", {Attribute::soft("s1", "warm")}, std::nullopt};
  try {
    verify_all(soft_only, "x");
    FAIL("expected NoHardConstraints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoHardConstraints);
  }
}

TEST_CASE("property: case constraints are mutually exclusive") {
  testing::CaseGenerator gen(3);
  for (int i = 0; i < 2000; ++i) {
    const auto text = gen.text();
    const bool up = sat(constraint::AllUppercase{}, text);
    const bool low = sat(constraint::AllLowercase{}, text);
    CHECK_FALSE((up && low));
    const auto t = tokenize(text);
    if (t.uppercase_letters > 0 && t.lowercase_letters > 0) {
      CHECK_FALSE(up);
      CHECK_FALSE(low);
    }
  }
}

TEST_CASE("property: word-count monotonicity and the around window") {
  testing::CaseGenerator gen(9);
  for (int i = 0; i < 1000; ++i) {
    const auto t = tokenize(gen.text());
    const auto count = static_cast<std::int64_t>(t.words.size());
    for (std::int64_t n = 1; n <= 60; ++n) {
      if (verify(constraint::NumWords{Relation::AtLeast, n}, t).satisfied) {
        for (std::int64_t m = 1; m <= n; ++m) {
          CHECK(verify(constraint::NumWords{Relation::AtLeast, m}, t).satisfied);
        }
      }
      if (verify(constraint::NumWords{Relation::AtMost, n}, t).satisfied) {
        CHECK(verify(constraint::NumWords{Relation::AtMost, n + 7}, t).satisfied);
      }
      if (verify(constraint::NumWords{Relation::Around, n}, t).satisfied) {
        const auto tol = around_tolerance(n);
        CHECK(count >= n - tol);
        CHECK(count <= n + tol);
        if (n - tol >= 1) CHECK(verify(constraint::NumWords{Relation::AtLeast, n - tol}, t).satisfied);
        CHECK(verify(constraint::NumWords{Relation::AtMost, n + tol}, t).satisfied);
      }
    }
  }
}

TEST_CASE("property: verify agrees with the brute-force oracle (sampled)") {
  testing::CaseGenerator gen(2024);
  for (int i = 0; i < 5000; ++i) {
    const auto text = gen.text();
    const auto type = kAllConstraintTypes[gen.below(kConstraintTypeCount)];
    const auto c = gen.constraint(type, text);
    INFO("text=[" << text << "] type=" << constraint_type_name(type));
    CHECK(verify(c, text).satisfied == oracle::check(c, text));
  }
}

TEST_CASE("determinism: repeated verification is byte-identical") {
  testing::CaseGenerator gen(77);
  for (int i = 0; i < 500; ++i) {
    const auto text = gen.text();
    const auto c = gen.constraint(kAllConstraintTypes[gen.below(kConstraintTypeCount)], text);
    CHECK(verify(c, text) == verify(c, text));
  }
}
