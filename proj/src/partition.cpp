#include "gpool/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpool {

Partition::Partition(std::vector<double> bp, double min_width) : bp_(std::move(bp)) {
  if (bp_.size() < 2) throw std::invalid_argument("partition needs at least two breakpoints");
  if (bp_.front() != 0.0 || bp_.back() != 1.0)
    throw std::invalid_argument("partition breakpoints must start at 0 and end at 1");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < bp_.size(); ++i) {
    const double w = bp_[i + 1] - bp_[i];
    if (!(w > 0.0) || w < min_width)
      throw std::invalid_argument("partition interval narrower than the minimum width");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("partition interval measures do not sum to 1");
}

Partition Partition::regular(int n) {
  if (n < 1) throw std::domain_error("partition size must be positive");
  std::vector<double> bp(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) bp[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
  bp.back() = 1.0;
  return Partition(std::move(bp), kMinWidth);
}

Partition Partition::from_breakpoints(std::vector<double> breakpoints) {
  return Partition(std::move(breakpoints), kMinWidth);
}

Partition Partition::refine(const Partition& a, const Partition& b) {
  std::vector<double> bp;
  bp.reserve(a.bp_.size() + b.bp_.size());
  std::merge(a.bp_.begin(), a.bp_.end(), b.bp_.begin(), b.bp_.end(), std::back_inserter(bp));
  std::vector<double> out;
  out.reserve(bp.size());
  out.push_back(0.0);
  for (double v : bp) {
    if (v - out.back() > 1e-12 && v < 1.0) out.push_back(v);
  }
  out.push_back(1.0);
  if (out[out.size() - 2] > 1.0 - 1e-12 && out.size() > 2) out.erase(out.end() - 2);
  return Partition(std::move(out), 0.0);
}

Eigen::VectorXd Partition::measures() const {
  Eigen::VectorXd mu(size());
  for (int i = 0; i < size(); ++i) mu[i] = measure(i);
  return mu;
}

Eigen::VectorXd Partition::midpoints() const {
  Eigen::VectorXd m(size());
  for (int i = 0; i < size(); ++i) m[i] = midpoint(i);
  return m;
}

int Partition::interval_index(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("coordinate outside [0,1]");
  const auto it = std::lower_bound(bp_.begin(), bp_.end(), x);
  const auto j = static_cast<int>(it - bp_.begin());
  return std::max(0, j - 1);
}

bool Partition::refines(const Partition& coarser) const {
  for (double v : coarser.bp_) {
    if (!std::binary_search(bp_.begin(), bp_.end(), v)) return false;
  }
  return true;
}

}  // namespace gpool
