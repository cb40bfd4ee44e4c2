#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace advmod {

struct GradCheckEntry {
  std::string kind;               // "fc", "conv1d(4,1,2,1)", "sigmoid", ...
  double worst_rel_err = 0.0;
  std::string worst_coordinate;   // e.g. "kernel[7]"
};

struct GradCheckReport {
  double threshold = 1e-5;
  std::vector<GradCheckEntry> entries;

  bool all_pass() const;
  const GradCheckEntry* worst() const;
};

/**
 * Central-difference check of every backward pass: the FC layer, all four
 * production conv specs, and each activation. The discrete-tanh surrogate
 * is compared against finite differences of the continuous tanh it stands
 * in for. Relative error uses an absolute floor of 1e-4 so near-zero
 * gradients do not explode the ratio.
 *
 * corrupt_one perturbs a single analytic gradient before comparison; the
 * negative-control fixture for the failure path.
 */
GradCheckReport run_gradcheck(std::uint64_t seed = 42, bool corrupt_one = false);

}  // namespace advmod
