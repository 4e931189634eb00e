#include "hcrp/data.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hcrp/error.hpp"

namespace hcrp {

namespace {

constexpr Symbol kSequence1Pattern[8] = {0, 1, 2, 3, 1, 2, 3, 4};
constexpr const char* kEosToken = "<eos>";
constexpr const char* kUnkToken = "<unk>";

}  // namespace

LabeledSequence genSequence1(std::size_t T) {
  LabeledSequence s;
  s.y.reserve(T);
  s.h.reserve(T);
  for (std::size_t i = 0; i < T; ++i) {
    s.y.push_back(kSequence1Pattern[i % 8]);
    s.h.push_back(static_cast<std::uint32_t>(i % 8));
  }
  return s;
}

void Pfa::validate() const {
  if (states == 0) throw Error(ErrorCode::InvalidArgument, "automaton has no states");
  for (std::size_t s = 0; s < states; ++s) {
    double pt = 0.0;
    double pe = 0.0;
    for (const auto& [to, p] : transitions[s]) pt += p;
    for (const auto& [sym, p] : emissions[s]) pe += p;
    if (std::abs(pt - 1.0) > 1e-9)
      throw Error(ErrorCode::InvalidArgument, "transitions of state " + std::to_string(s) + " do not sum to 1");
    if (std::abs(pe - 1.0) > 1e-9)
      throw Error(ErrorCode::InvalidArgument, "emissions of state " + std::to_string(s) + " do not sum to 1");
  }
}

Pfa Pfa::parse(std::istream& in) {
  Pfa pfa;
  std::string line;
  int lineNo = 0;
  auto grow = [&](std::size_t s) {
    if (s >= pfa.states) {
      pfa.states = s + 1;
      pfa.transitions.resize(pfa.states);
      pfa.emissions.resize(pfa.states);
    }
  };
  while (std::getline(in, line)) {
    ++lineNo;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    long long a = -1, b = -1;
    double p = -1.0;
    std::string extra;
    ls >> kind;
    if (!(ls >> a >> b >> p) || a < 0 || b < 0 || !(p >= 0.0 && p <= 1.0) || (ls >> extra))
      throw Error(ErrorCode::Parse, "automaton line " + std::to_string(lineNo) + ": expected '" + kind +
                                        " <int> <int> <probability>'");
    if (kind == "trans") {
      grow(static_cast<std::size_t>(std::max(a, b)));
      pfa.transitions[static_cast<std::size_t>(a)].push_back({static_cast<std::uint32_t>(b), p});
    } else if (kind == "emit") {
      grow(static_cast<std::size_t>(a));
      pfa.alphabet = std::max(pfa.alphabet, static_cast<std::size_t>(b) + 1);
      pfa.emissions[static_cast<std::size_t>(a)].push_back({static_cast<Symbol>(b), p});
    } else {
      throw Error(ErrorCode::Parse, "automaton line " + std::to_string(lineNo) + ": unknown entry '" + kind + "'");
    }
  }
  pfa.validate();
  return pfa;
}

Pfa Pfa::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open automaton file " + path);
  return parse(in);
}

LabeledSequence genSequence2(const Pfa& pfa, std::size_t T, Rng& rng) {
  pfa.validate();
  LabeledSequence s;
  s.y.reserve(T);
  s.h.reserve(T);
  std::vector<double> w;
  std::uint32_t state = 0;
  for (std::size_t t = 0; t < T; ++t) {
    s.h.push_back(state);
    const auto& em = pfa.emissions[state];
    w.clear();
    for (const auto& e : em) w.push_back(e.second);
    s.y.push_back(em[rng.categorical(w)].first);
    const auto& tr = pfa.transitions[state];
    w.clear();
    for (const auto& e : tr) w.push_back(e.second);
    state = tr[rng.categorical(w)].first;
  }
  return s;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string word;
  bool sentenceOpen = false;
  auto flush = [&] {
    if (word.empty()) return;
    tokens.push_back(word);
    word.clear();
    sentenceOpen = true;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    // UTF-8 curly quotes and dashes
    if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80) {
      const auto d = static_cast<unsigned char>(text[i + 2]);
      i += 2;
      if (d == 0x98 || d == 0x99) continue;  // apostrophes
      flush();
      continue;
    }
    if (c == '\'') continue;
    if (c == '.' || c == '!' || c == '?') {
      flush();
      if (sentenceOpen) tokens.push_back(kEosToken);
      sentenceOpen = false;
      continue;
    }
    if (c >= 0x80 || std::isalnum(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
      continue;
    }
    flush();
  }
  flush();
  return tokens;
}

Corpus ingestText(std::string_view text, std::size_t testTail, std::size_t maxTokens) {
  std::vector<std::string> tokens = tokenize(text);
  if (maxTokens > 0 && tokens.size() > maxTokens) tokens.resize(maxTokens);
  if (tokens.size() <= testTail)
    throw Error(ErrorCode::EmptyCorpus, "text has " + std::to_string(tokens.size()) +
                                            " tokens, not enough for a held-out tail of " + std::to_string(testTail));
  const std::size_t trainSize = tokens.size() - testTail;
  auto isUnk = [](const std::string& w) { return w == "unk"; };

  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < trainSize; ++i) ++counts[tokens[i]];

  Corpus c;
  c.vocab = {kEosToken, kUnkToken};
  std::map<std::string, Symbol> ids;
  auto idOf = [&](const std::string& w, bool training) -> Symbol {
    if (w == kEosToken) return Corpus::kEos;
    if (isUnk(w)) return Corpus::kUnk;
    auto it = ids.find(w);
    if (it != ids.end()) return it->second;
    if (!training || counts[w] < 2) return Corpus::kUnk;
    const auto id = static_cast<Symbol>(c.vocab.size());
    c.vocab.push_back(w);
    ids.emplace(w, id);
    return id;
  };
  for (std::size_t i = 0; i < trainSize; ++i) c.train.push_back(idOf(tokens[i], true));
  for (std::size_t i = trainSize; i < tokens.size(); ++i) c.test.push_back(idOf(tokens[i], false));
  return c;
}

std::string Corpus::render() const {
  std::string out;
  auto put = [&](Symbol s) {
    if (!out.empty()) out.push_back(' ');
    out += s == kEos ? "." : s == kUnk ? "unk" : vocab[s];
  };
  for (Symbol s : train) put(s);
  for (Symbol s : test) put(s);
  out.push_back('\n');
  return out;
}

void Corpus::write(std::ostream& out) const {
  out << "# hcrp-corpus v1\nvocab " << vocab.size() << '\n';
  for (const auto& w : vocab) out << w << '\n';
  auto ids = [&](const char* name, const std::vector<Symbol>& seq) {
    out << name << ' ' << seq.size() << '\n';
    for (std::size_t i = 0; i < seq.size(); ++i) out << (i ? " " : "") << seq[i];
    out << '\n';
  };
  ids("train", train);
  ids("test", test);
}

Corpus Corpus::read(std::istream& in) {
  Corpus c;
  std::string line;
  auto fail = [](const std::string& what) { throw Error(ErrorCode::Parse, "corpus file: " + what); };
  auto next = [&]() -> std::string {
    while (std::getline(in, line))
      if (!line.empty() && line[0] != '#') return line;
    fail("unexpected end of file");
    return {};
  };
  auto header = [&](const char* name) {
    std::istringstream ls(next());
    std::string key;
    std::size_t n = 0;
    if (!(ls >> key >> n) || key != name) fail(std::string("expected '") + name + " <count>'");
    return n;
  };
  const std::size_t nv = header("vocab");
  for (std::size_t i = 0; i < nv; ++i) c.vocab.push_back(next());
  auto ids = [&](const char* name, std::vector<Symbol>& seq) {
    const std::size_t n = header(name);
    if (n == 0) return;
    std::istringstream ls(next());
    for (Symbol v; ls >> v;) {
      if (v >= nv) fail("symbol id outside the vocabulary");
      seq.push_back(v);
    }
    if (seq.size() != n) fail(std::string(name) + " count mismatch");
  };
  ids("train", c.train);
  ids("test", c.test);
  return c;
}

}  // namespace hcrp
