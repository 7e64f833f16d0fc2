#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gpool/partition.hpp"

namespace gpool {

enum class GraphonFamily { Exponential, Bilinear, Polynomial, LogMax, Absolute };

std::string family_name(GraphonFamily f);

// Symmetric kernel W : [0,1]^2 -> [0,1]. Either one of the built-in closed
// forms or a step function over a partition. Immutable after construction;
// all operations are const and thread-safe.
class Graphon {
 public:
  static constexpr double kDefaultTol = 1e-10;

  // exp(-beta (x-y)^2)
  static Graphon exponential(double beta);
  // x*y
  static Graphon bilinear();
  // (x^2 + y^2) / 2
  static Graphon polynomial();
  // log(1 + max(x,y))
  static Graphon logmax();
  // |x - y|
  static Graphon absolute();
  static Graphon closed_form(GraphonFamily family, std::vector<double> params = {});

  // Step function: value on cell (i,j) of partition x partition.
  static Graphon step(Partition partition, Eigen::MatrixXd values);
  // Step graphon on the regular N-partition carrying the adjacency entries.
  static Graphon induced(const Eigen::MatrixXd& adjacency);

  bool is_step() const { return step_; }

  // W(x,y); symmetric, values clamped to [0,1].
  double operator()(double x, double y) const;

  // Integral of W over [x0,x1] x [y0,y1]. Step graphons use the exact
  // block-overlap sum; closed forms use composite Gauss-Legendre of order 8
  // with the cell count doubled until two successive estimates agree to tol.
  double integrate_box(double x0, double x1, double y0, double y1,
                       double tol = kDefaultTol) const;

  // Step variant accessors; throw std::logic_error on closed forms.
  const Partition& partition() const;
  const Eigen::MatrixXd& values() const;

  // Closed-form accessors; throw std::logic_error on step graphons.
  GraphonFamily family() const;
  const std::vector<double>& params() const;

 private:
  Graphon() = default;

  bool step_ = false;
  GraphonFamily family_ = GraphonFamily::Bilinear;
  std::vector<double> params_;
  Partition partition_;
  Eigen::MatrixXd values_;
};

}  // namespace gpool
