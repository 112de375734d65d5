#include "pogit/slice.hpp"

#include <cmath>

#include "pogit/errors.hpp"
#include "pogit/math.hpp"

namespace pogit {

double slice_update_scalar(double x0,
                           const std::function<double(double)>& log_f,
                           double width, double lower, double upper, Rng& rng,
                           const SliceOptions& opts, SliceStats* stats) {
  SliceStats local;
  SliceStats& st = stats ? *stats : local;

  double f0 = log_f(x0);
  ++st.n_evals;
  if (!std::isfinite(f0)) {
    throw NumericalError("slice: log-density not finite at current point");
  }
  double log_y = f0 - rng.exponential();

  // Initial interval of size `width` placed randomly around x0.
  double u = rng.uniform();
  double left = x0 - width * u;
  double right = left + width;

  // Random split of the expansion budget between the two sides (Neal's
  // limited stepping out).
  int j = static_cast<int>(std::floor(opts.max_step_out * rng.uniform()));
  int k = opts.max_step_out - 1 - j;
  while (j > 0 && left > lower) {
    ++st.n_evals;
    if (log_f(left) <= log_y) break;
    left -= width;
    --j;
    ++st.n_expand;
    if (j == 0) ++st.n_budget_hits;
  }
  while (k > 0 && right < upper) {
    ++st.n_evals;
    if (log_f(right) <= log_y) break;
    right += width;
    --k;
    ++st.n_expand;
    if (k == 0) ++st.n_budget_hits;
  }
  if (left < lower) left = lower;
  if (right > upper) right = upper;

  // Shrinkage.
  for (int it = 0; it < opts.max_shrink; ++it) {
    double x1 = rng.uniform(left, right);
    ++st.n_evals;
    if (log_f(x1) > log_y) return x1;
    ++st.n_shrink;
    if (x1 < x0) {
      left = x1;
    } else if (x1 > x0) {
      right = x1;
    } else {
      return x0;  // interval collapsed onto the current point
    }
  }
  ++st.n_budget_hits;
  return x0;
}

}  // namespace pogit
