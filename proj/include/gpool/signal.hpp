#pragma once

#include <Eigen/Dense>

#include "gpool/partition.hpp"

namespace gpool {

// Piecewise-constant function on [0,1]: one value per partition interval.
struct GraphonSignal {
  Partition partition;
  Eigen::VectorXd values;

  double operator()(double t) const { return values[partition.interval_index(t)]; }
  double l2_norm() const;
};

// Lift of a graph signal: value x(i) on interval i of the regular N-partition.
GraphonSignal step_signal(const Eigen::VectorXd& x);

// Re-express x on a finer partition (target must refine x.partition).
GraphonSignal refine_signal(const GraphonSignal& x, const Partition& target);

}  // namespace gpool
