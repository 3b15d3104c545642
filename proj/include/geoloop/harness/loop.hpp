#pragma once

#include <string>
#include <vector>

#include "geoloop/curriculum/store.hpp"
#include "geoloop/grpo/toy_policy.hpp"
#include "geoloop/harness/backend.hpp"
#include "geoloop/harness/config.hpp"

namespace geoloop::harness {

struct LoopArtifacts {
  curriculum::Curriculum final_curriculum;
  std::vector<grpo::CurvePoint> curve;
  int invented_count = 0;
  grpo::ToyPolicy policy;  // toy backend only
};

// Full closed-loop run: seed curriculum -> per-iteration sample/attempt/
// diagnose/mutate/qualify/update, trajectory + curve + pairs artifacts under
// cfg.out_dir. Deterministic for a given config regardless of worker count.
// `backend_override` replaces the configured backend (tests); the caller
// keeps ownership.
LoopArtifacts run_loop(const Config& cfg, Backend* backend_override = nullptr);

// Question/instruction/SVG export rows for every sampleable problem.
void export_pairs(const curriculum::Curriculum& c, const std::string& path);

}  // namespace geoloop::harness
