#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hcrp/error.hpp"
#include "hcrp/harness.hpp"

using namespace hcrp;

namespace {

ExperimentConfig configFrom(const std::string& text) {
  std::istringstream in(text);
  return ExperimentConfig::parse(in);
}

std::string runToString(const ExperimentConfig& cfg) {
  std::ostringstream out;
  runExperiment(cfg, out);
  return out.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = configFrom(
      "# comment\n"
      "dataset = sequence1\nlength = 40\n"
      "sampler = sgibbs, beam+SM3\nblock_size = 6\n"
      "budget_sweeps = 10  # trailing comment\nburn_in = 2\nsample_every = 2\n"
      "seeds = 3, 5-7\nparticles = 10\n");
  CHECK(cfg.dataset.length == 40);
  REQUIRE(cfg.samplers.size() == 2);
  CHECK(cfg.samplers[1].name == "beam+SM3");
  CHECK(cfg.samplers[1].config.splitMergePerSweep == 3);
  CHECK(cfg.samplers[1].config.blockSize == 6);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 5, 6, 7});
  CHECK(cfg.budget == 10);

  try {
    configFrom("dataset = sequence1\nlength = many\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(configFrom("colour = blue\n"), Error);
  CHECK_THROWS_AS(configFrom("budget_sweeps = 5\nburn_in = 6\n"), Error);
  CHECK_THROWS_AS(configFrom("block_size = 0\n"), Error);
  CHECK_THROWS_AS(configFrom("sampler = gibbs\n"), Error);
}

TEST_CASE("zero budget writes only the init record") {
  const auto text = runToString(configFrom("length = 30\nbudget_sweeps = 0\nparticles = 5\n"));
  std::istringstream in(text);
  const auto rows = readRecords(in);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].kind == "init");
  CHECK(text.rfind(kRunRecordsHeader, 0) == 0);
}

TEST_CASE("runs are reproducible") {
  const auto cfg = configFrom(
      "length = 60\nsampler = sgibbs+SM1, bgibbs\nbudget_sweeps = 6\nburn_in = 2\nsample_every = 2\n"
      "seeds = 1-2\nparticles = 8\nthreads = 2\n");
  const auto a = runToString(cfg);
  const auto b = runToString(cfg);
  CHECK(a == b);
  std::istringstream in(a);
  const auto rows = readRecords(in);
  // per chain: init, records at sweeps 4 and 6, summary
  REQUIRE(rows.size() == 16);
  CHECK(rows[1].sweep == 4);
  CHECK(rows[3].kind == "summary");
  CHECK(rows[3].gibbsTrials == 6 * 60);
  CHECK(rows[0].mi >= 0.0);
  CHECK(rows[4].seed == 2);
}

TEST_CASE("records round trip through CSV") {
  RunRecord r;
  r.kind = "record";
  r.sampler = "beam";
  r.seed = 9;
  r.sweep = 12;
  r.numStates = 7;
  r.mi = 1.25;
  r.gibbsAccepts = 3;
  r.gibbsTrials = 4;
  std::stringstream s;
  writeRecordsHeader(s);
  writeRecord(s, r);
  const auto rows = readRecords(s);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].sampler == "beam");
  CHECK(rows[0].mi == 1.25);
  CHECK(std::isnan(rows[0].ppl));
  CHECK(rows[0].gibbsAcceptRate() == 0.75);
}

TEST_CASE("summaries") {
  RunRecord a;
  a.kind = "summary";
  a.sampler = "sgibbs";
  a.sweep = 10;
  a.mi = 1.0;
  a.numStates = 4;
  a.gibbsAccepts = 9;
  a.gibbsTrials = 10;
  SUBCASE("single record") {
    const auto s = summarize(std::span<const RunRecord>(&a, 1));
    REQUIRE(s.size() == 1);
    CHECK(s[0].mi == a.mi);
    CHECK(s[0].numStates == a.numStates);
    CHECK(s[0].gibbsAcceptRate() == a.gibbsAcceptRate());
  }
  SUBCASE("two records") {
    RunRecord b = a;
    b.mi = 2.0;
    b.numStates = 6;
    b.gibbsAccepts = 1;
    b.gibbsTrials = 90;
    const std::vector<RunRecord> both{a, b};
    const auto s = summarize(both);
    REQUIRE(s.size() == 1);
    CHECK(s[0].mi == 1.5);
    CHECK(s[0].numStates == 5);
    // totals, not the mean of the rates
    CHECK(s[0].gibbsAcceptRate() == doctest::Approx(10.0 / 100.0));
    CHECK(formatSummary(s).find("sgibbs") != std::string::npos);
  }
}

TEST_CASE("histogram") {
  std::vector<RunRecord> rows(3);
  for (auto& r : rows) {
    r.kind = "record";
    r.sampler = "beam";
  }
  rows[0].numStates = 4;
  rows[1].numStates = 4;
  rows[2].numStates = 5;
  CHECK(statesHistogram(rows) == "# beam\n# num_states count\n4 2\n5 1\n");
}
