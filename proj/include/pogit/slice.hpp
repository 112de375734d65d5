#pragma once

#include <functional>

#include "pogit/rng.hpp"

namespace pogit {

// Counters published by the samplers; expansion-budget exhaustion is a
// warning, never a failure.
struct SliceStats {
  long long n_evals = 0;
  long long n_expand = 0;
  long long n_shrink = 0;
  long long n_budget_hits = 0;
};

struct SliceOptions {
  int max_step_out = 50;    // stepping-out budget per update (both sides)
  int max_shrink = 1000;    // hard cap on shrinkage rejections
};

// One update of the stepping-out + shrinkage slice sampler of Neal (2003,
// Fig. 3 and 5), restricted to (lower, upper). The step budget is split
// randomly between the two sides, which keeps the kernel valid when the
// budget binds. Throws NumericalError if log_f(x0) is not finite.
double slice_update_scalar(double x0,
                           const std::function<double(double)>& log_f,
                           double width, double lower, double upper, Rng& rng,
                           const SliceOptions& opts = {},
                           SliceStats* stats = nullptr);

}  // namespace pogit
