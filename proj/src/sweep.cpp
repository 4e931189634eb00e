#include "hcrp/error.hpp"
#include "hcrp/samplers.hpp"

namespace hcrp {

SamplerKind parseSamplerKind(const std::string& name) {
  if (name == "sgibbs") return SamplerKind::StepwiseGibbs;
  if (name == "sslice") return SamplerKind::StepwiseSlice;
  if (name == "bgibbs") return SamplerKind::BlockedGibbs;
  if (name == "beam") return SamplerKind::Beam;
  throw Error(ErrorCode::InvalidArgument, "unknown sampler '" + name + "' (expected sgibbs, sslice, bgibbs or beam)");
}

const char* samplerKindName(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::StepwiseGibbs: return "sgibbs";
    case SamplerKind::StepwiseSlice: return "sslice";
    case SamplerKind::BlockedGibbs: return "bgibbs";
    case SamplerKind::Beam: return "beam";
  }
  return "unknown";
}

SweepReport runSweep(HmmState& h, const SamplerConfig& config, Rng& rng) {
  SweepReport report;
  const std::size_t T = h.length();
  switch (config.kind) {
    case SamplerKind::StepwiseGibbs:
      report.gibbs = stepwiseGibbsSweep(h, rng);
      break;
    case SamplerKind::StepwiseSlice: {
      BlockPlan plan;
      plan.length = T;
      for (std::size_t t = 1; t <= T; ++t) plan.starts.push_back(t);
      report.gibbs = blockedSweep(h, plan, BlockKernel::Beam, rng);
      break;
    }
    case SamplerKind::BlockedGibbs:
      report.gibbs = blockedSweep(h, drawBlockPlan(T, config.blockSize, rng), BlockKernel::ForwardBackward, rng);
      break;
    case SamplerKind::Beam:
      report.gibbs = blockedSweep(h, drawBlockPlan(T, config.blockSize, rng), BlockKernel::Beam, rng);
      break;
  }
  if (T >= 2) {
    for (int i = 0; i < config.splitMergePerSweep; ++i) {
      ++report.splitMerge.trials;
      if (splitMergeMove(h, rng).accepted) ++report.splitMerge.accepts;
    }
  }
  if (config.resampleHyperparameters) resampleHyperparameters(h, rng, config.tieHyperparameters);
  return report;
}

}  // namespace hcrp
