#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gpool {

// Sorted breakpoints 0 = b[0] < b[1] < ... < b[N] = 1 describing N intervals
// of [0,1]. Interval i (0-based) is (b[i], b[i+1]], with x = 0 assigned to
// interval 0 so that lookup is total on [0,1]; this matches the ceil(N*x)
// block convention used for induced step graphons on regular grids.
class Partition {
 public:
  // Minimum interval width accepted by the public factories. Interval areas
  // appear as divisors in the integration pooling rules, so zero-width
  // intervals are rejected outright.
  static constexpr double kMinWidth = 1e-9;

  Partition() : bp_{0.0, 1.0} {}

  static Partition regular(int n);
  static Partition from_breakpoints(std::vector<double> breakpoints);

  // Union of the breakpoints of a and b (near-duplicates within 1e-12 are
  // merged). The result may contain intervals thinner than kMinWidth; it is
  // meant for kernel comparison, never as an integration grid.
  static Partition refine(const Partition& a, const Partition& b);

  int size() const { return static_cast<int>(bp_.size()) - 1; }
  double lower(int i) const { return bp_[static_cast<std::size_t>(i)]; }
  double upper(int i) const { return bp_[static_cast<std::size_t>(i) + 1]; }
  double measure(int i) const { return upper(i) - lower(i); }
  double midpoint(int i) const { return 0.5 * (lower(i) + upper(i)); }
  const std::vector<double>& breakpoints() const { return bp_; }
  Eigen::VectorXd measures() const;
  Eigen::VectorXd midpoints() const;

  // Index of the interval containing x; throws std::domain_error outside [0,1].
  int interval_index(double x) const;

  // True when every breakpoint of `coarser` is also a breakpoint here.
  bool refines(const Partition& coarser) const;

  bool operator==(const Partition& other) const { return bp_ == other.bp_; }

 private:
  Partition(std::vector<double> bp, double min_width);

  std::vector<double> bp_;
};

}  // namespace gpool
