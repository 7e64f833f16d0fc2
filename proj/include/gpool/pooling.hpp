#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gpool/graphon.hpp"
#include "gpool/signal.hpp"

namespace gpool {

// Sorted sampling locations in [0,1] used by the pointwise method M3.
struct SamplePoints {
  std::vector<double> points;

  static SamplePoints from_points(std::vector<double> pts);
  int size() const { return static_cast<int>(points.size()); }
};

Partition regular_partition(int n);

// n-1 interior breakpoints drawn i.i.d. uniform; redrawn (bounded retries)
// until every interval is at least Partition::kMinWidth wide.
Partition random_partition(int n, std::uint64_t seed);

// n i.i.d. uniform points, sorted, with the same minimum-gap rule.
SamplePoints sample_points(int n, std::uint64_t seed);

// M1, regular integration: A(i,j) = n^2 * integral of W over cell (i,j).
Eigen::MatrixXd pool_m1(const Graphon& w, int n, double tol = Graphon::kDefaultTol);

// M2, irregular integration: A(i,j) = cell average over the given partition.
Eigen::MatrixXd pool_m2(const Graphon& w, const Partition& partition,
                        double tol = Graphon::kDefaultTol);

// M3, pointwise sampling: A(i,j) = W(p_i, p_j). The diagonal keeps
// W(p_i, p_i) unless zero_diagonal is set.
Eigen::MatrixXd pool_m3(const Graphon& w, const SamplePoints& points,
                        bool zero_diagonal = false);

// Interpolation onto a coarser grid: each coarse interval midpoint takes the
// mean of the two fine values whose interval midpoints bracket it; outside
// the fine midpoint range the nearest fine value is used, and an exact
// midpoint match returns that value. Row r of the returned matrix holds the
// weights producing coarse value r.
Eigen::MatrixXd interval_interpolation_matrix(const Partition& fine, const Partition& coarse);
Eigen::MatrixXd point_interpolation_matrix(const SamplePoints& fine, const SamplePoints& coarse);

GraphonSignal interpolate_signal_intervals(const GraphonSignal& x_fine, const Partition& coarse);
Eigen::VectorXd interpolate_signal_points(const Eigen::VectorXd& x_fine,
                                          const SamplePoints& pts_fine,
                                          const SamplePoints& pts_coarse);

enum class PoolingMethod { M1, M2, M3 };

std::string method_name(PoolingMethod m);
PoolingMethod parse_method(const std::string& name);

struct PoolingLayer {
  Eigen::MatrixXd adjacency;
  Partition partition;   // integration grid for M1/M2
  SamplePoints points;   // sampling locations for M3
};

// Layer graphs generated from one graphon with strictly decreasing sizes.
// Regeneration from (method, sizes, seed, graphon) is bit-identical; each
// layer draws from an independent sub-stream of the seed.
struct PoolingPlan {
  PoolingMethod method = PoolingMethod::M1;
  std::vector<int> sizes;
  std::uint64_t seed = 0;
  std::vector<PoolingLayer> layers;
  std::vector<std::string> warnings;

  int layer_count() const { return static_cast<int>(layers.size()); }
};

PoolingPlan build_pooling_plan(const Graphon& w, PoolingMethod method, std::vector<int> sizes,
                               std::uint64_t seed, double tol = Graphon::kDefaultTol);

// Linear map taking a layer `from` signal to a layer `from + 1` signal.
Eigen::MatrixXd interpolation_matrix(const PoolingPlan& plan, int from);

}  // namespace gpool
