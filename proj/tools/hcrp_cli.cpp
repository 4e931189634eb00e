// Command-line front end; talks to the library only through the C API.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcrp/hcrp.h"

namespace {

int report(hcrp_status status) {
  if (status == HCRP_OK) return 0;
  std::cerr << "hcrp: " << hcrp_status_name(status) << ": " << hcrp_last_error() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HCRP-HMM samplers and experiment runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment described by a config file");
  std::string configPath;
  std::optional<std::uint64_t> seed;
  std::string outPath;
  run->add_option("--config", configPath, "experiment config (key = value lines)")->required();
  run->add_option("--seed", seed, "run only this seed");
  run->add_option("--out", outPath, "CSV output path (default: config 'out', else stdout)");

  auto* summarize = app.add_subcommand("summarize", "per-sampler summary of run-record CSV files");
  std::vector<std::string> csvPaths;
  bool histogram = false;
  summarize->add_option("csv", csvPaths, "run-record files")->required();
  summarize->add_flag("--histogram", histogram, "print a gnuplot-ready #states histogram instead");

  auto* ingest = app.add_subcommand("ingest", "turn a plain text file into a corpus file");
  std::string textPath;
  std::string corpusPath;
  std::size_t testTail = 1000;
  std::size_t maxTokens = 0;
  ingest->add_option("text", textPath, "UTF-8 text file")->required();
  ingest->add_option("--out", corpusPath, "corpus output path")->required();
  ingest->add_option("--test-tail", testTail, "held-out tokens at the end")->capture_default_str();
  ingest->add_option("--max-tokens", maxTokens, "keep only the first N tokens (0 keeps all)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    return report(hcrp_run_experiment(configPath.c_str(), seed ? &*seed : nullptr,
                                      outPath.empty() ? nullptr : outPath.c_str()));
  }
  if (*summarize) {
    std::vector<const char*> paths;
    for (const auto& p : csvPaths) paths.push_back(p.c_str());
    char* text = nullptr;
    const auto status = hcrp_summarize_csv(paths.data(), paths.size(), histogram ? 1 : 0, &text);
    if (status != HCRP_OK) return report(status);
    std::cout << text;
    hcrp_free_string(text);
    return 0;
  }
  std::size_t train = 0, test = 0, vocab = 0;
  const auto status =
      hcrp_ingest(textPath.c_str(), testTail, maxTokens, corpusPath.c_str(), &train, &test, &vocab);
  if (status != HCRP_OK) return report(status);
  std::cout << "train " << train << " tokens, test " << test << " tokens, vocabulary " << vocab << '\n';
  return 0;
}
