#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hcrp/hmm.hpp"
#include "hcrp/samplers.hpp"

namespace hcrp {

enum class DatasetKind { Sequence1, Sequence2, Text };

struct DatasetSpec {
  DatasetKind kind = DatasetKind::Sequence1;
  std::size_t length = 500;  // sequence1 / sequence2
  std::string pfaPath;
  std::string textPath;
  std::size_t textTokens = 0;  // 0 keeps the whole text
  std::size_t testTail = 1000;
  std::uint64_t dataSeed = 1;
};

/// One sampler column of an experiment, e.g. "beam+SM3".
struct SamplerSpec {
  std::string name;
  SamplerConfig config;
};

/// Parses "sgibbs", "bgibbs+SM3" and the like.  `defaults` supplies the
/// block size and split-merge count when not given in the name.
SamplerSpec parseSamplerSpec(const std::string& text, const SamplerConfig& defaults);

enum class BudgetMode { Sweeps, CpuSeconds };

/// Line-oriented `key = value` text; '#' starts a comment.  Burn-in and the
/// sampling interval are in the budget's unit (sweeps or CPU seconds).
struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<SamplerSpec> samplers;
  BudgetMode budgetMode = BudgetMode::Sweeps;
  double budget = 100;
  double burnIn = 0;
  double sampleEvery = 1;
  std::vector<std::uint64_t> seeds{1};
  std::size_t particles = 100;
  std::size_t evalParticles = 100;
  unsigned threads = 1;
  bool timing = false;
  std::string out;

  /// Throws InvalidArgument when the settings are inconsistent.
  void validate() const;
  /// Relative paths are resolved against `baseDir` when it is not empty.
  static ExperimentConfig parse(std::istream& in, const std::string& baseDir = {});
  static ExperimentConfig load(const std::string& path);
};

/// One CSV row.  Missing numeric values are NaN and written as empty cells.
struct RunRecord {
  std::string kind;  // init | record | summary
  std::string sampler;
  std::uint64_t seed = 0;
  long sweep = 0;
  double cpuSeconds;
  double numStates;
  double mi;
  long gibbsAccepts = 0;
  long gibbsTrials = 0;
  long smAccepts = 0;
  long smTrials = 0;
  double ppl;
  double actStates;
  double secsPerSweep;
  double alpha;
  double gamma;
  double alphaEmit;
  double gammaEmit;

  RunRecord();
  double gibbsAcceptRate() const;
  double smAcceptRate() const;
};

inline constexpr const char* kRunRecordsHeader = "# hcrp-runrecords v1";

void writeRecordsHeader(std::ostream& out);
void writeRecord(std::ostream& out, const RunRecord& r);
/// Reads every row of a run-records CSV.
std::vector<RunRecord> readRecords(std::istream& in);

/// The observations of an experiment together with the true hidden states
/// when they are known.
struct Dataset {
  std::vector<Symbol> train;
  std::vector<Symbol> test;
  std::vector<std::uint32_t> truth;
  std::size_t alphabet = 0;
};

Dataset loadDataset(const DatasetSpec& spec);

/// Runs one chain and returns its rows: the init record, the sampled
/// records and (when any were taken) a summary row.
std::vector<RunRecord> runChain(const ExperimentConfig& cfg, const Dataset& data, const SamplerSpec& sampler,
                                std::uint64_t seed);

/// Runs every (sampler, seed) chain and writes the CSV in that order.
void runExperiment(const ExperimentConfig& cfg, std::ostream& out);
void runExperiment(const ExperimentConfig& cfg);

/// Per-sampler aggregate: means of the numeric columns over the given rows
/// and accept rates from summed counters.
std::vector<RunRecord> summarize(std::span<const RunRecord> records);
/// Summary rows of the given CSV files, aggregated per sampler.
std::vector<RunRecord> summarizeFiles(const std::vector<std::string>& paths);
/// Human-readable table of summarize() output.
std::string formatSummary(std::span<const RunRecord> rows);
/// gnuplot-ready histogram of #states over the sampled records, one block
/// per sampler.
std::string statesHistogram(std::span<const RunRecord> records);

}  // namespace hcrp
