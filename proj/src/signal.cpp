#include "gpool/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace gpool {

double GraphonSignal::l2_norm() const {
  double acc = 0.0;
  for (int i = 0; i < partition.size(); ++i) acc += values[i] * values[i] * partition.measure(i);
  return std::sqrt(acc);
}

GraphonSignal step_signal(const Eigen::VectorXd& x) {
  if (x.size() < 1) throw std::invalid_argument("graph signal must be non-empty");
  if (!x.allFinite()) throw std::invalid_argument("graph signal entries must be finite");
  return GraphonSignal{Partition::regular(static_cast<int>(x.size())), x};
}

GraphonSignal refine_signal(const GraphonSignal& x, const Partition& target) {
  if (target == x.partition) return x;
  if (!target.refines(x.partition))
    throw std::invalid_argument("target partition does not refine the signal partition");
  Eigen::VectorXd v(target.size());
  for (int i = 0; i < target.size(); ++i) v[i] = x.values[x.partition.interval_index(target.midpoint(i))];
  return GraphonSignal{target, std::move(v)};
}

}  // namespace gpool
