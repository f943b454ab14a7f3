// Quantizes the middle-third Cantor measure for n = 2, 4, ..., 128 and fits
// the quantization dimension.

#include <cmath>
#include <cstdio>

#include "ifsq/dimension.hpp"
#include "ifsq/measure.hpp"
#include "ifsq/quantization.hpp"

int main() {
  using namespace ifsq;
  const IFSystem c3 = builtin::cantor3();
  const EmpiricalMeasure m = chaos_game(c3, 50'000, kDefaultBurnIn, 7);
  const QDimFit fit = estimate_qdim(m, 2.0, geometric_grid(2, 128), 7);
  for (std::size_t k = 0; k < fit.n_grid.size(); ++k) {
    std::printf("n=%4zu  e_n=%.6g\n", fit.n_grid[k], fit.errors[k]);
  }
  const ExponentBounds b = qdim_bounds(c3, 2.0);
  std::printf("fitted D_2 = %.4f (r^2 %.5f), exact log2/log3 = %.4f\n", fit.slope, fit.r_squared,
              b.upper);
}
