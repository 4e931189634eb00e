#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hcrp/hmm.hpp"
#include "hcrp/random.hpp"

namespace hcrp {

/// Observations with the hidden states that generated them (both 0-based
/// positions).
struct LabeledSequence {
  std::vector<Symbol> y;
  std::vector<std::uint32_t> h;
};

/// The period-8 sequence A B C D B C D E (symbols 0..4) with hidden phase
/// h = position mod 8.
LabeledSequence genSequence1(std::size_t T);

/// Probabilistic finite automaton.  Text form, one entry per line:
///   trans <from> <to> <p>
///   emit <state> <symbol> <p>
/// Blank lines and lines starting with '#' are ignored.
struct Pfa {
  std::size_t states = 0;
  std::size_t alphabet = 0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> transitions;
  std::vector<std::vector<std::pair<Symbol, double>>> emissions;

  /// Throws InvalidArgument unless every state's rows each sum to one.
  void validate() const;
  static Pfa parse(std::istream& in);
  static Pfa load(const std::string& path);
};

/// Runs the automaton from state 0 for T steps.
LabeledSequence genSequence2(const Pfa& pfa, std::size_t T, Rng& rng);

struct Corpus {
  static constexpr Symbol kEos = 0;
  static constexpr Symbol kUnk = 1;

  std::vector<std::string> vocab;
  std::vector<Symbol> train;
  std::vector<Symbol> test;

  /// Plain text that ingests back to this corpus (EOS as ".", UNK as "unk").
  std::string render() const;
  void write(std::ostream& out) const;
  static Corpus read(std::istream& in);
};

/// Lowercases, drops apostrophes, turns other punctuation into spaces and
/// emits "<eos>" after each sentence ending in '.', '!' or '?'.
std::vector<std::string> tokenize(std::string_view text);

/// Tokenizes, keeps the first `maxTokens` tokens (0 keeps all), holds out the
/// last `testTail` tokens, and maps training hapaxes (and test words unseen
/// in training) to UNK.  Vocabulary ids follow first appearance in the
/// training stream after EOS and UNK.  Throws EmptyCorpus when nothing is
/// left for training.
Corpus ingestText(std::string_view text, std::size_t testTail = 1000, std::size_t maxTokens = 0);

}  // namespace hcrp
