// Maps the binary interval system onto the (1/3, 2/3) system through shared
// addresses and compares the graph with the attractor of the diagonal
// product system. Prints a few graph points and the box-counting estimate.

#include <cstdio>

#include "ifsq/dimension.hpp"
#include "ifsq/fractal_transform.hpp"

int main() {
  using namespace ifsq;
  const IFSystem f = builtin::binary();
  const IFSystem g = builtin::third_two_thirds();

  for (double x : {0.1, 0.25, 0.5, 0.8}) {
    const TopsResult t = tops_code(f, {x}, 16);
    std::printf("x=%.3f  tops=%s...  T(x)=%.6f\n", x, t.code.word.to_string().c_str(),
                transform_point(f, g, {x}, 48)[0]);
  }

  const PointCloud xs = attractor_sample(f, 12, {0.0});
  const GraphSample graph = graph_sample(f, g, xs, 48);
  const IFSystem h = diagonal_product(f, g);
  const PointCloud a = attractor_sample(h, 12, {0.0, 0.0});
  std::printf("graph points: %zu, Hausdorff distance to product attractor: %.3g\n",
              graph.graph.size(), hausdorff_distance(graph.graph, a));

  const BoxCountFit fit = box_dimension_estimate(graph.graph, dyadic_scales(0.25, 5));
  const ExponentBounds b = graph_dim_bounds(f, g);
  std::printf("box estimate %.4f, bounds [%.4f, %.4f]\n", fit.slope, b.lower, b.upper);
}
