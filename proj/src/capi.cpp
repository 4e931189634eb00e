#include "hcrp/hcrp.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "hcrp/data.hpp"
#include "hcrp/diagnostics.hpp"
#include "hcrp/error.hpp"
#include "hcrp/franchise.hpp"
#include "hcrp/harness.hpp"
#include "hcrp/hmm.hpp"
#include "hcrp/random.hpp"
#include "hcrp/samplers.hpp"

struct hcrp_rng {
  hcrp::Rng rng;
};

struct hcrp_franchise {
  hcrp::Franchise f;
};

struct hcrp_hmm {
  hcrp::HmmState h;
};

namespace {

thread_local std::string lastError;

template <typename F>
hcrp_status guarded(F&& body) {
  try {
    body();
    lastError.clear();
    return HCRP_OK;
  } catch (const hcrp::Error& e) {
    lastError = e.what();
    return static_cast<hcrp_status>(e.code());
  } catch (const std::bad_alloc&) {
    lastError = "out of memory";
    return HCRP_OUT_OF_MEMORY;
  } catch (const std::exception& e) {
    lastError = e.what();
    return HCRP_INTERNAL;
  } catch (...) {
    lastError = "unknown error";
    return HCRP_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw hcrp::Error(hcrp::ErrorCode::InvalidArgument, what);
}

char* copyString(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* hcrp_last_error(void) { return lastError.c_str(); }

const char* hcrp_status_name(hcrp_status status) {
  switch (status) {
    case HCRP_OK: return "Ok";
    case HCRP_OUT_OF_MEMORY: return "OutOfMemory";
    case HCRP_INTERNAL: return "Internal";
    default: return hcrp::errorCodeName(static_cast<hcrp::ErrorCode>(status));
  }
}

void hcrp_free_string(char* s) { std::free(s); }

hcrp_status hcrp_rng_create(uint64_t seed, uint64_t stream, hcrp_rng** out) {
  return guarded([&] {
    require(out, "null output pointer");
    *out = new hcrp_rng{hcrp::Rng(seed, stream)};
  });
}

void hcrp_rng_destroy(hcrp_rng* rng) { delete rng; }

hcrp_status hcrp_rng_uniform(hcrp_rng* rng, double* out) {
  return guarded([&] {
    require(rng && out, "null argument");
    *out = rng->rng.uniform();
  });
}

hcrp_status hcrp_franchise_create(double alpha, double gamma, size_t base_size, hcrp_franchise** out) {
  return guarded([&] {
    require(out, "null output pointer");
    *out = new hcrp_franchise{hcrp::Franchise(alpha, gamma, base_size)};
  });
}

void hcrp_franchise_destroy(hcrp_franchise* f) { delete f; }

hcrp_status hcrp_franchise_add_customer(hcrp_franchise* f, uint32_t restaurant, uint32_t dish, hcrp_rng* rng,
                                        double* log_table_prob) {
  return guarded([&] {
    require(f && rng, "null argument");
    const double lp = f->f.addCustomer(restaurant, dish, rng->rng);
    if (log_table_prob) *log_table_prob = lp;
  });
}

hcrp_status hcrp_franchise_remove_customer(hcrp_franchise* f, uint32_t restaurant, uint32_t dish, hcrp_rng* rng) {
  return guarded([&] {
    require(f && rng, "null argument");
    f->f.removeCustomer(restaurant, dish, rng->rng);
  });
}

hcrp_status hcrp_franchise_prob(const hcrp_franchise* f, uint32_t restaurant, uint32_t dish, double* out) {
  return guarded([&] {
    require(f && out, "null argument");
    *out = f->f.prob(restaurant, dish);
  });
}

hcrp_status hcrp_franchise_dish_count(const hcrp_franchise* f, int* out) {
  return guarded([&] {
    require(f && out, "null argument");
    *out = f->f.dishCount();
  });
}

hcrp_status hcrp_franchise_seating_log_prob(const hcrp_franchise* f, double* out) {
  return guarded([&] {
    require(f && out, "null argument");
    *out = f->f.seatingLogProb();
  });
}

hcrp_status hcrp_franchise_audit(const hcrp_franchise* f) {
  return guarded([&] {
    require(f, "null argument");
    f->f.audit();
  });
}

hcrp_status hcrp_hmm_create(const uint32_t* y, size_t length, size_t alphabet, size_t particles, hcrp_rng* rng,
                            hcrp_hmm** out) {
  return guarded([&] {
    require(y && rng && out, "null argument");
    require(length > 0 && alphabet > 0 && particles > 0, "length, alphabet and particles must be positive");
    const std::span<const hcrp::Symbol> obs(y, length);
    const hcrp::Hyperparameters hp;
    const auto init = hcrp::particleFilterInit(obs, alphabet, hp, particles, rng->rng);
    auto h = std::make_unique<hcrp_hmm>(hcrp_hmm{hcrp::HmmState(obs, alphabet, hp)});
    h->h.assign(init.states, rng->rng);
    *out = h.release();
  });
}

void hcrp_hmm_destroy(hcrp_hmm* h) { delete h; }

hcrp_status hcrp_hmm_sweep(hcrp_hmm* h, const char* sampler, size_t block_size, hcrp_rng* rng, long* accepts,
                           long* trials) {
  return guarded([&] {
    require(h && sampler && rng, "null argument");
    hcrp::SamplerConfig defaults;
    defaults.blockSize = block_size;
    const auto spec = hcrp::parseSamplerSpec(sampler, defaults);
    require(spec.config.blockSize > 0, "block size must be positive");
    const auto report = hcrp::runSweep(h->h, spec.config, rng->rng);
    if (accepts) *accepts = report.gibbs.accepts;
    if (trials) *trials = report.gibbs.trials;
  });
}

hcrp_status hcrp_hmm_num_states(const hcrp_hmm* h, int* out) {
  return guarded([&] {
    require(h && out, "null argument");
    *out = h->h.numStates();
  });
}

hcrp_status hcrp_hmm_states(const hcrp_hmm* h, uint32_t* out, size_t length) {
  return guarded([&] {
    require(h && out, "null argument");
    if (length != h->h.length())
      throw hcrp::Error(hcrp::ErrorCode::LengthMismatch, "output length does not match the sequence length");
    for (size_t t = 0; t < length; ++t) out[t] = h->h.x[t + 1];
  });
}

hcrp_status hcrp_hmm_joint_log_prob(const hcrp_hmm* h, double* out) {
  return guarded([&] {
    require(h && out, "null argument");
    *out = h->h.jointLogProb();
  });
}

hcrp_status hcrp_mutual_information(const uint32_t* x, const uint32_t* h, size_t n, double* out) {
  return guarded([&] {
    require(x && h && out, "null argument");
    *out = hcrp::mutualInformation({x, n}, {h, n});
  });
}

hcrp_status hcrp_entropy(const uint32_t* h, size_t n, double* out) {
  return guarded([&] {
    require(h && out, "null argument");
    *out = hcrp::entropy({h, n});
  });
}

hcrp_status hcrp_autocorrelation_time(const double* series, size_t n, size_t max_lag, double* out) {
  return guarded([&] {
    require(series && out, "null argument");
    *out = hcrp::autocorrelationTime({series, n}, max_lag);
  });
}

hcrp_status hcrp_perplexity(const double* likelihoods, size_t n, double* out) {
  return guarded([&] {
    require(likelihoods && out, "null argument");
    *out = hcrp::perplexity(std::span<const double>(likelihoods, n));
  });
}

hcrp_status hcrp_generate_sequence1(size_t length, uint32_t* y, uint32_t* h) {
  return guarded([&] {
    require(length > 0, "length must be positive");
    require(y || !h, "y must not be null");
    const auto s = hcrp::genSequence1(length);
    for (size_t i = 0; i < length; ++i) {
      y[i] = s.y[i];
      if (h) h[i] = s.h[i];
    }
  });
}

hcrp_status hcrp_ingest(const char* text_path, size_t test_tail, size_t max_tokens, const char* out_path,
                        size_t* train_tokens, size_t* test_tokens, size_t* vocab_size) {
  return guarded([&] {
    require(text_path && out_path, "null path");
    std::ifstream in(text_path, std::ios::binary);
    if (!in) throw hcrp::Error(hcrp::ErrorCode::Io, std::string("cannot open ") + text_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto corpus = hcrp::ingestText(buf.str(), test_tail, max_tokens);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw hcrp::Error(hcrp::ErrorCode::Io, std::string("cannot write ") + out_path);
    corpus.write(out);
    if (train_tokens) *train_tokens = corpus.train.size();
    if (test_tokens) *test_tokens = corpus.test.size();
    if (vocab_size) *vocab_size = corpus.vocab.size();
  });
}

hcrp_status hcrp_run_experiment(const char* config_path, const uint64_t* seed, const char* out_path) {
  return guarded([&] {
    require(config_path, "null config path");
    auto cfg = hcrp::ExperimentConfig::load(config_path);
    if (seed) cfg.seeds = {*seed};
    if (out_path) cfg.out = out_path;
    hcrp::runExperiment(cfg);
  });
}

hcrp_status hcrp_summarize_csv(const char* const* paths, size_t count, int histogram, char** out) {
  return guarded([&] {
    require(paths && out, "null argument");
    std::vector<std::string> files;
    for (size_t i = 0; i < count; ++i) {
      require(paths[i], "null path");
      files.emplace_back(paths[i]);
    }
    if (histogram) {
      std::vector<hcrp::RunRecord> rows;
      for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) throw hcrp::Error(hcrp::ErrorCode::Io, "cannot open " + path);
        auto part = hcrp::readRecords(in);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      *out = copyString(hcrp::statesHistogram(rows));
    } else {
      *out = copyString(hcrp::formatSummary(hcrp::summarizeFiles(files)));
    }
  });
}

}  // extern "C"
