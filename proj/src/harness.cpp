#include "hcrp/harness.hpp"

#include <time.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "hcrp/data.hpp"
#include "hcrp/diagnostics.hpp"
#include "hcrp/error.hpp"

namespace hcrp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kEvalStream = 0x6576616cULL;
constexpr std::uint64_t kDataStream = 0x64617461ULL;

constexpr const char* kColumns =
    "kind,sampler,seed,sweep,cpu_seconds,num_states,mi_nats,gibbs_accepts,gibbs_trials,gibbs_accept_rate,"
    "sm_accepts,sm_trials,sm_accept_rate,ppl,act_states,secs_per_sweep,alpha,gamma,alpha_e,gamma_e";

// FNV-1a, stable across platforms (std::hash is not)
std::uint64_t streamOf(const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double threadCpuSeconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

// Accumulates thread CPU time only while running.
class Stopwatch {
 public:
  void start() { since_ = threadCpuSeconds(); }
  void stop() { total_ += threadCpuSeconds() - since_; }
  double total() const { return total_; }

 private:
  double since_ = 0.0;
  double total_ = 0.0;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> splitList(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) {
    part = trim(part);
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::string formatNumber(double v) {
  if (std::isnan(v)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double meanOf(const std::vector<double>& v) {
  double s = 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (std::isnan(x)) continue;
    s += x;
    ++n;
  }
  return n ? s / static_cast<double>(n) : kNaN;
}

}  // namespace

// ------------------------------------------------------------------- config

SamplerSpec parseSamplerSpec(const std::string& text, const SamplerConfig& defaults) {
  SamplerSpec spec;
  spec.config = defaults;
  const auto plus = text.find('+');
  spec.config.kind = parseSamplerKind(trim(text.substr(0, plus)));
  if (plus != std::string::npos) {
    std::string suffix = trim(text.substr(plus + 1));
    std::string upper = suffix;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper.rfind("SM", 0) != 0 || upper.size() == 2 ||
        upper.find_first_not_of("0123456789", 2) != std::string::npos)
      throw Error(ErrorCode::InvalidArgument, "sampler suffix must look like +SM<n>, got '" + suffix + "'");
    spec.config.splitMergePerSweep = std::stoi(upper.substr(2));
  }
  spec.name = samplerKindName(spec.config.kind);
  if (spec.config.splitMergePerSweep > 0) spec.name += "+SM" + std::to_string(spec.config.splitMergePerSweep);
  return spec;
}

void ExperimentConfig::validate() const {
  if (samplers.empty()) throw Error(ErrorCode::InvalidArgument, "no sampler configured");
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "no seed configured");
  if (!(budget >= 0.0)) throw Error(ErrorCode::InvalidArgument, "budget must be non-negative");
  if (!(burnIn >= 0.0) || burnIn > budget)
    throw Error(ErrorCode::InvalidArgument, "burn_in must lie between 0 and the budget");
  if (!(sampleEvery > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample_every must be positive");
  if (particles == 0 || evalParticles == 0) throw Error(ErrorCode::InvalidArgument, "particle counts must be positive");
  for (const auto& s : samplers) {
    if (s.config.blockSize == 0) throw Error(ErrorCode::InvalidArgument, "block_size must be at least 1");
    if (s.config.splitMergePerSweep < 0) throw Error(ErrorCode::InvalidArgument, "sm_per_sweep must be >= 0");
  }
  if (dataset.kind == DatasetKind::Sequence2 && dataset.pfaPath.empty())
    throw Error(ErrorCode::InvalidArgument, "dataset sequence2 needs a pfa path");
  if (dataset.kind == DatasetKind::Text && dataset.textPath.empty())
    throw Error(ErrorCode::InvalidArgument, "dataset text needs a text path");
  if (dataset.kind != DatasetKind::Text && dataset.length == 0)
    throw Error(ErrorCode::InvalidArgument, "length must be at least 1");
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& baseDir) {
  ExperimentConfig cfg;
  SamplerConfig defaults;
  std::vector<std::string> samplerNames{"sgibbs"};
  bool sweepBudget = false;
  bool cpuBudget = false;

  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) -> void {
      throw Error(ErrorCode::Parse, "config line " + std::to_string(lineNo) + ": " + what);
    };
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) fail("missing value for '" + key + "'");

    auto number = [&]() {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || !std::isfinite(v)) fail("'" + key + "' needs a number, got '" + value + "'");
      return v;
    };
    auto count = [&]() {
      const double v = number();
      if (v < 0 || v != std::floor(v)) fail("'" + key + "' needs a non-negative integer, got '" + value + "'");
      return static_cast<std::size_t>(v);
    };
    auto flag = [&]() {
      if (value == "true" || value == "1" || value == "yes") return true;
      if (value == "false" || value == "0" || value == "no") return false;
      fail("'" + key + "' needs true or false, got '" + value + "'");
      return false;
    };
    auto path = [&]() {
      if (baseDir.empty() || std::filesystem::path(value).is_absolute()) return value;
      return (std::filesystem::path(baseDir) / value).string();
    };

    if (key == "dataset") {
      if (value == "sequence1") cfg.dataset.kind = DatasetKind::Sequence1;
      else if (value == "sequence2") cfg.dataset.kind = DatasetKind::Sequence2;
      else if (value == "text") cfg.dataset.kind = DatasetKind::Text;
      else fail("unknown dataset '" + value + "'");
    } else if (key == "length") {
      cfg.dataset.length = count();
    } else if (key == "pfa") {
      cfg.dataset.pfaPath = path();
    } else if (key == "text") {
      cfg.dataset.textPath = path();
    } else if (key == "text_tokens") {
      cfg.dataset.textTokens = count();
    } else if (key == "test_tail") {
      cfg.dataset.testTail = count();
    } else if (key == "data_seed") {
      cfg.dataset.dataSeed = count();
    } else if (key == "sampler") {
      samplerNames = splitList(value, ',');
      if (samplerNames.empty()) fail("empty sampler list");
    } else if (key == "block_size") {
      defaults.blockSize = count();
    } else if (key == "sm_per_sweep") {
      defaults.splitMergePerSweep = static_cast<int>(count());
    } else if (key == "resample_hyperparameters") {
      defaults.resampleHyperparameters = flag();
    } else if (key == "tie_hyperparameters") {
      defaults.tieHyperparameters = flag();
    } else if (key == "budget_sweeps") {
      cfg.budgetMode = BudgetMode::Sweeps;
      cfg.budget = static_cast<double>(count());
      sweepBudget = true;
    } else if (key == "budget_cpu_seconds") {
      cfg.budgetMode = BudgetMode::CpuSeconds;
      cfg.budget = number();
      cpuBudget = true;
    } else if (key == "burn_in") {
      cfg.burnIn = number();
    } else if (key == "sample_every") {
      cfg.sampleEvery = number();
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& item : splitList(value, ',')) {
        const auto dash = item.find('-');
        try {
          if (dash == std::string::npos) {
            cfg.seeds.push_back(std::stoull(item));
          } else {
            const auto lo = std::stoull(item.substr(0, dash));
            const auto hi = std::stoull(item.substr(dash + 1));
            if (hi < lo) fail("seed range '" + item + "' is empty");
            for (auto s = lo; s <= hi; ++s) cfg.seeds.push_back(s);
          }
        } catch (const std::logic_error&) {
          fail("bad seed '" + item + "'");
        }
      }
    } else if (key == "particles") {
      cfg.particles = count();
    } else if (key == "eval_particles") {
      cfg.evalParticles = count();
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(count());
    } else if (key == "timing") {
      cfg.timing = flag();
    } else if (key == "out") {
      cfg.out = path();
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (sweepBudget && cpuBudget)
    throw Error(ErrorCode::Parse, "config: budget_sweeps and budget_cpu_seconds are exclusive");
  for (const auto& name : samplerNames) cfg.samplers.push_back(parseSamplerSpec(name, defaults));
  if (cfg.budgetMode == BudgetMode::CpuSeconds) cfg.timing = true;
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path);
  return parse(in, std::filesystem::path(path).parent_path().string());
}

// ------------------------------------------------------------------ records

RunRecord::RunRecord()
    : cpuSeconds(kNaN),
      numStates(kNaN),
      mi(kNaN),
      ppl(kNaN),
      actStates(kNaN),
      secsPerSweep(kNaN),
      alpha(kNaN),
      gamma(kNaN),
      alphaEmit(kNaN),
      gammaEmit(kNaN) {}

double RunRecord::gibbsAcceptRate() const {
  return gibbsTrials > 0 ? static_cast<double>(gibbsAccepts) / static_cast<double>(gibbsTrials) : kNaN;
}

double RunRecord::smAcceptRate() const {
  return smTrials > 0 ? static_cast<double>(smAccepts) / static_cast<double>(smTrials) : kNaN;
}

void writeRecordsHeader(std::ostream& out) { out << kRunRecordsHeader << '\n' << kColumns << '\n'; }

void writeRecord(std::ostream& out, const RunRecord& r) {
  out << r.kind << ',' << r.sampler << ',' << r.seed << ',' << r.sweep << ',' << formatNumber(r.cpuSeconds) << ','
      << formatNumber(r.numStates) << ',' << formatNumber(r.mi) << ',' << r.gibbsAccepts << ',' << r.gibbsTrials
      << ',' << formatNumber(r.gibbsAcceptRate()) << ',' << r.smAccepts << ',' << r.smTrials << ','
      << formatNumber(r.smAcceptRate()) << ',' << formatNumber(r.ppl) << ',' << formatNumber(r.actStates) << ','
      << formatNumber(r.secsPerSweep) << ',' << formatNumber(r.alpha) << ',' << formatNumber(r.gamma) << ','
      << formatNumber(r.alphaEmit) << ',' << formatNumber(r.gammaEmit) << '\n';
}

std::vector<RunRecord> readRecords(std::istream& in) {
  std::vector<RunRecord> rows;
  std::string line;
  int lineNo = 0;
  bool sawColumns = false;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!sawColumns) {
      if (line != kColumns) throw Error(ErrorCode::Parse, "run records: unexpected column header");
      sawColumns = true;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 20)
      throw Error(ErrorCode::Parse, "run records line " + std::to_string(lineNo) + ": expected 20 columns");
    auto num = [&](const std::string& s) {
      if (s.empty()) return kNaN;
      try {
        return std::stod(s);
      } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, "run records line " + std::to_string(lineNo) + ": bad number '" + s + "'");
      }
    };
    auto integer = [&](const std::string& s) { return static_cast<long>(num(s)); };
    RunRecord r;
    r.kind = cells[0];
    r.sampler = cells[1];
    r.seed = static_cast<std::uint64_t>(num(cells[2]));
    r.sweep = integer(cells[3]);
    r.cpuSeconds = num(cells[4]);
    r.numStates = num(cells[5]);
    r.mi = num(cells[6]);
    r.gibbsAccepts = integer(cells[7]);
    r.gibbsTrials = integer(cells[8]);
    r.smAccepts = integer(cells[10]);
    r.smTrials = integer(cells[11]);
    r.ppl = num(cells[13]);
    r.actStates = num(cells[14]);
    r.secsPerSweep = num(cells[15]);
    r.alpha = num(cells[16]);
    r.gamma = num(cells[17]);
    r.alphaEmit = num(cells[18]);
    r.gammaEmit = num(cells[19]);
    rows.push_back(std::move(r));
  }
  if (!sawColumns) throw Error(ErrorCode::Parse, "run records: missing column header");
  return rows;
}

// ------------------------------------------------------------------ running

Dataset loadDataset(const DatasetSpec& spec) {
  Dataset d;
  switch (spec.kind) {
    case DatasetKind::Sequence1: {
      auto s = genSequence1(spec.length);
      d.train = std::move(s.y);
      d.truth = std::move(s.h);
      d.alphabet = 5;
      break;
    }
    case DatasetKind::Sequence2: {
      const Pfa pfa = Pfa::load(spec.pfaPath);
      Rng rng(spec.dataSeed, kDataStream);
      auto s = genSequence2(pfa, spec.length, rng);
      d.train = std::move(s.y);
      d.truth = std::move(s.h);
      d.alphabet = pfa.alphabet;
      break;
    }
    case DatasetKind::Text: {
      std::ifstream in(spec.textPath, std::ios::binary);
      if (!in) throw Error(ErrorCode::Io, "cannot open text file " + spec.textPath);
      std::ostringstream buf;
      buf << in.rdbuf();
      Corpus c = ingestText(buf.str(), spec.testTail, spec.textTokens);
      d.train = std::move(c.train);
      d.test = std::move(c.test);
      d.alphabet = c.vocab.size();
      break;
    }
  }
  return d;
}

std::vector<RunRecord> runChain(const ExperimentConfig& cfg, const Dataset& data, const SamplerSpec& sampler,
                                std::uint64_t seed) {
  const std::uint64_t stream = streamOf(sampler.name);
  Rng rng(seed, stream);
  Rng evalRng(seed, stream ^ kEvalStream);
  const bool sweepsMode = cfg.budgetMode == BudgetMode::Sweeps;

  Stopwatch clock;
  clock.start();
  const Hyperparameters hp;
  const auto init = particleFilterInit(data.train, data.alphabet, hp, cfg.particles, rng);
  HmmState h(data.train, data.alphabet, hp);
  h.assign(init.states, rng);
  clock.stop();

  std::vector<std::vector<double>> likelihoodRows;
  auto snapshot = [&](const char* kind, long sweep) {
    RunRecord r;
    r.kind = kind;
    r.sampler = sampler.name;
    r.seed = seed;
    r.sweep = sweep;
    if (cfg.timing) {
      r.cpuSeconds = clock.total();
      if (sweep > 0) r.secsPerSweep = clock.total() / static_cast<double>(sweep);
    }
    r.numStates = h.numStates();
    if (!data.truth.empty()) r.mi = mutualInformation(std::span<const std::uint32_t>(h.x).subspan(1), data.truth);
    if (!data.test.empty()) {
      auto eval = particleFilterEval(h, data.test, cfg.evalParticles, evalRng);
      r.ppl = perplexity(eval.likelihoods);
      if (std::string(kind) == "record") likelihoodRows.push_back(std::move(eval.likelihoods));
    }
    const auto cur = h.hyperparameters();
    r.alpha = cur.alpha;
    r.gamma = cur.gamma;
    r.alphaEmit = cur.alphaEmit;
    r.gammaEmit = cur.gammaEmit;
    return r;
  };

  std::vector<RunRecord> rows;
  rows.push_back(snapshot("init", 0));

  SweepStats gibbs;
  SweepStats sm;
  std::vector<double> statesSeries;
  std::vector<double> recordStates;
  std::vector<double> recordMi;
  long sweep = 0;
  double nextCheckpoint = cfg.burnIn + (sweepsMode ? cfg.sampleEvery : 0.0);
  auto progress = [&]() { return sweepsMode ? static_cast<double>(sweep) : clock.total(); };

  while (progress() < cfg.budget) {
    clock.start();
    const auto report = runSweep(h, sampler.config, rng);
    clock.stop();
    ++sweep;
    gibbs += report.gibbs;
    sm += report.splitMerge;
    if (progress() > cfg.burnIn || (!sweepsMode && progress() >= cfg.burnIn))
      statesSeries.push_back(h.numStates());
    if (progress() >= nextCheckpoint) {
      while (nextCheckpoint <= progress()) nextCheckpoint += cfg.sampleEvery;
      RunRecord r = snapshot("record", sweep);
      r.gibbsAccepts = gibbs.accepts;
      r.gibbsTrials = gibbs.trials;
      r.smAccepts = sm.accepts;
      r.smTrials = sm.trials;
      recordStates.push_back(r.numStates);
      recordMi.push_back(r.mi);
      rows.push_back(std::move(r));
    }
  }
  if (recordStates.empty()) return rows;

  RunRecord s;
  s.kind = "summary";
  s.sampler = sampler.name;
  s.seed = seed;
  s.sweep = sweep;
  if (cfg.timing) {
    s.cpuSeconds = clock.total();
    if (sweep > 0) s.secsPerSweep = clock.total() / static_cast<double>(sweep);
  }
  s.numStates = meanOf(recordStates);
  s.mi = meanOf(recordMi);
  s.gibbsAccepts = gibbs.accepts;
  s.gibbsTrials = gibbs.trials;
  s.smAccepts = sm.accepts;
  s.smTrials = sm.trials;
  if (!likelihoodRows.empty()) s.ppl = perplexity(likelihoodRows);
  if (statesSeries.size() >= 2) {
    try {
      s.actStates = autocorrelationTime(statesSeries);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroVariance) throw;
    }
  }
  const auto cur = h.hyperparameters();
  s.alpha = cur.alpha;
  s.gamma = cur.gamma;
  s.alphaEmit = cur.alphaEmit;
  s.gammaEmit = cur.gammaEmit;
  rows.push_back(std::move(s));
  return rows;
}

void runExperiment(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const Dataset data = loadDataset(cfg.dataset);

  struct Job {
    const SamplerSpec* sampler;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& s : cfg.samplers)
    for (auto seed : cfg.seeds) jobs.push_back({&s, seed});

  std::vector<std::vector<RunRecord>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        results[i] = runChain(cfg, data, *jobs[i].sampler, jobs[i].seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  writeRecordsHeader(out);
  for (const auto& rows : results)
    for (const auto& r : rows) writeRecord(out, r);
}

void runExperiment(const ExperimentConfig& cfg) {
  if (cfg.out.empty()) {
    runExperiment(cfg, std::cout);
    return;
  }
  std::ostringstream buf;
  runExperiment(cfg, buf);
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + cfg.out);
  out << buf.str();
}

// ---------------------------------------------------------------- summaries

std::vector<RunRecord> summarize(std::span<const RunRecord> records) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    if (!groups.count(r.sampler)) order.push_back(r.sampler);
    groups[r.sampler].push_back(&r);
  }
  std::vector<RunRecord> out;
  for (const auto& name : order) {
    const auto& g = groups[name];
    auto mean = [&](double RunRecord::*field) {
      std::vector<double> v;
      for (const auto* r : g) v.push_back(r->*field);
      return meanOf(v);
    };
    RunRecord s;
    s.kind = "summary";
    s.sampler = name;
    s.seed = g.size() == 1 ? g.front()->seed : 0;
    std::vector<double> sweeps;
    for (const auto* r : g) {
      s.gibbsAccepts += r->gibbsAccepts;
      s.gibbsTrials += r->gibbsTrials;
      s.smAccepts += r->smAccepts;
      s.smTrials += r->smTrials;
      sweeps.push_back(static_cast<double>(r->sweep));
    }
    s.sweep = std::lround(meanOf(sweeps));
    s.cpuSeconds = mean(&RunRecord::cpuSeconds);
    s.numStates = mean(&RunRecord::numStates);
    s.mi = mean(&RunRecord::mi);
    s.ppl = mean(&RunRecord::ppl);
    s.actStates = mean(&RunRecord::actStates);
    s.secsPerSweep = mean(&RunRecord::secsPerSweep);
    s.alpha = mean(&RunRecord::alpha);
    s.gamma = mean(&RunRecord::gamma);
    s.alphaEmit = mean(&RunRecord::alphaEmit);
    s.gammaEmit = mean(&RunRecord::gammaEmit);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<RunRecord> summarizeFiles(const std::vector<std::string>& paths) {
  if (paths.empty()) throw Error(ErrorCode::InvalidArgument, "no run-record files given");
  std::vector<RunRecord> rows;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    for (auto& r : readRecords(in))
      if (r.kind == "summary") rows.push_back(std::move(r));
  }
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "no summary rows in the given files");
  return summarize(rows);
}

std::string formatSummary(std::span<const RunRecord> rows) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %10s %10s %10s %10s %12s %12s %10s\n", "sampler", "MI", "PPL", "#states",
                "ACT", "gibbs_acc", "sm_acc", "s/sweep");
  out << buf;
  auto cell = [](double v) { return std::isnan(v) ? std::string("-") : formatNumber(v); };
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-14s %10s %10s %10s %10s %12s %12s %10s\n", r.sampler.c_str(),
                  cell(r.mi).c_str(), cell(r.ppl).c_str(), cell(r.numStates).c_str(), cell(r.actStates).c_str(),
                  cell(r.gibbsAcceptRate()).c_str(), cell(r.smAcceptRate()).c_str(), cell(r.secsPerSweep).c_str());
    out << buf;
  }
  return out.str();
}

std::string statesHistogram(std::span<const RunRecord> records) {
  std::vector<std::string> order;
  std::map<std::string, std::map<long, long>> counts;
  for (const auto& r : records) {
    if (r.kind != "record" || std::isnan(r.numStates)) continue;
    if (!counts.count(r.sampler)) order.push_back(r.sampler);
    ++counts[r.sampler][std::lround(r.numStates)];
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& name : order) {
    if (!first) out << "\n\n";
    first = false;
    out << "# " << name << "\n# num_states count\n";
    for (const auto& [k, n] : counts[name]) out << k << ' ' << n << '\n';
  }
  return out.str();
}

}  // namespace hcrp
