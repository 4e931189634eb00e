#include <doctest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hcrp/data.hpp"
#include "hcrp/error.hpp"
#include "support.hpp"

using namespace hcrp;

#ifndef HCRP_DATA_DIR
#define HCRP_DATA_DIR "data"
#endif

TEST_CASE("sequence 1") {
  const auto s = genSequence1(9);
  CHECK(s.y == std::vector<Symbol>{0, 1, 2, 3, 1, 2, 3, 4, 0});
  CHECK(s.h == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6, 7, 0});
  const auto long_ = genSequence1(500);
  CHECK(std::set<Symbol>(long_.y.begin(), long_.y.end()).size() == 5);
  CHECK(std::set<std::uint32_t>(long_.h.begin(), long_.h.end()).size() == 8);
}

TEST_CASE("automaton parsing") {
  std::istringstream ok("# two states\ntrans 0 1 1\ntrans 1 0 0.5\ntrans 1 1 0.5\nemit 0 0 1\nemit 1 1 1\n");
  const Pfa pfa = Pfa::parse(ok);
  CHECK(pfa.states == 2);
  CHECK(pfa.alphabet == 2);

  std::istringstream bad("trans 0 0 0.5\nemit 0 0 1\n");
  CHECK_THROWS_AS(Pfa::parse(bad), Error);
  std::istringstream garbage("trans 0 zero 1\n");
  try {
    Pfa::parse(garbage);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
}

TEST_CASE("degenerate automaton gives a constant sequence") {
  std::istringstream in("trans 0 0 1\nemit 0 0 1\n");
  const Pfa pfa = Pfa::parse(in);
  Rng rng(1);
  const auto s = genSequence2(pfa, 50, rng);
  CHECK(s.y == std::vector<Symbol>(50, 0));
}

TEST_CASE("shipped automaton") {
  const Pfa pfa = Pfa::load(HCRP_DATA_DIR "/sequence2.pfa");
  CHECK(pfa.states == 12);
  CHECK(pfa.alphabet == 12);
  Rng rng(2);
  const std::size_t T = 1000000;
  const auto s = genSequence2(pfa, T, rng);
  CHECK(s.h[0] == 0);

  std::map<std::pair<std::uint32_t, std::uint32_t>, long> pairs;
  std::vector<long> visits(pfa.states, 0);
  for (std::size_t t = 0; t + 1 < T; ++t) {
    ++pairs[{s.h[t], s.h[t + 1]}];
    ++visits[s.h[t]];
  }
  for (std::size_t from = 0; from < pfa.states; ++from) {
    for (const auto& [to, p] : pfa.transitions[from]) {
      CAPTURE(from);
      CAPTURE(to);
      CHECK(testing::withinSigma(pairs[{static_cast<std::uint32_t>(from), to}], visits[from], p));
    }
  }
  for (std::size_t t = 0; t < T; ++t) {
    bool declared = false;
    for (const auto& e : pfa.emissions[s.h[t]]) declared |= e.first == s.y[t];
    if (!declared) {
      FAIL("undeclared emission");
      break;
    }
  }
}

TEST_CASE("tokenizer") {
  CHECK(tokenize("A b. C!") == std::vector<std::string>{"a", "b", "<eos>", "c", "<eos>"});
  CHECK(tokenize("...Hello,world!!  Don't  stop?") ==
        std::vector<std::string>{"hello", "world", "<eos>", "dont", "stop", "<eos>"});
  CHECK(tokenize("It\xE2\x80\x99s \xE2\x80\x9C" "fine\xE2\x80\x9D\xE2\x80\x94" "really") ==
        std::vector<std::string>{"its", "fine", "really"});
}

TEST_CASE("corpus ingestion") {
  const std::string text = "the cat sat. the dog sat! a bird flew. the end.";
  const Corpus c = ingestText(text, 3);
  // training: the cat sat . the dog sat . a bird flew .
  REQUIRE(c.train.size() == 12);
  REQUIRE(c.test.size() == 3);
  CHECK(c.vocab[c.train[0]] == "the");
  CHECK(c.train[1] == Corpus::kUnk);  // "cat" once in training
  CHECK(c.train[3] == Corpus::kEos);
  CHECK(c.test[1] == Corpus::kUnk);   // "end" unseen in training
  for (Symbol s : c.train) CHECK(s < c.vocab.size());

  const Corpus again = ingestText(c.render(), 3);
  CHECK(again.train == c.train);
  CHECK(again.test == c.test);
  CHECK(again.vocab == c.vocab);

  std::stringstream file;
  c.write(file);
  const Corpus read = Corpus::read(file);
  CHECK(read.train == c.train);
  CHECK(read.vocab == c.vocab);

  CHECK_THROWS_AS(ingestText("", 0), Error);
  CHECK_THROWS_AS(ingestText("one two.", 5), Error);
  CHECK(ingestText("a b a b c. a b.", 0, 4).train.size() == 4);
}

TEST_CASE("shipped text slice") {
  std::ifstream in(HCRP_DATA_DIR "/gpl-3.0.txt");
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  const Corpus c = ingestText(buf.str(), 1000, 5000);
  CHECK(c.train.size() == 4000);
  CHECK(c.test.size() == 1000);
  CHECK(c.vocab.size() > 100);
}
