#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gpool/graphon.hpp"
#include "gpool/signal.hpp"

namespace gpool {

// Polynomial filter h(t) = sum_k coeffs[k] t^k; the coefficient list length
// is authoritative for the filter order.
struct PolyFilter {
  std::vector<double> coeffs;

  int taps() const { return static_cast<int>(coeffs.size()); }
  double operator()(double t) const;
  PolyFilter derivative() const;
};

enum class ShiftScaling {
  Raw,       // adjacency as-is
  Graphon,   // divided by N (matches the induced-graphon operator)
  Spectral,  // divided by |lambda_max| (training-friendly conditioning)
};

struct ShiftOperator {
  Eigen::MatrixXd matrix;
  ShiftScaling scaling = ShiftScaling::Raw;

  static ShiftOperator from_adjacency(const Eigen::MatrixXd& adjacency,
                                      ShiftScaling scaling = ShiftScaling::Raw);
  int order() const { return static_cast<int>(matrix.rows()); }
};

// Largest |eigenvalue| of a symmetric matrix.
double spectral_radius(const Eigen::MatrixXd& symmetric);

// y = sum_k h_k S^k x, accumulated Horner style; S^k is never formed.
Eigen::VectorXd apply_graph_filter(const ShiftOperator& s, const PolyFilter& f,
                                   const Eigen::VectorXd& x);

// Same polynomial in the shift operator of a step graphon. The signal is
// refined onto the common partition when needed.
GraphonSignal apply_graphon_filter(const Graphon& w, const PolyFilter& f, const GraphonSignal& x);

// Sup-norm gap between the two routes of the scaling identity: filtering the
// induced graphon signal versus filtering the graph signal with S/N and
// lifting. Zero up to roundoff.
double theorem1_residual(const Eigen::MatrixXd& adjacency, const PolyFilter& f,
                         const Eigen::VectorXd& x);

std::vector<double> frequency_response(const PolyFilter& f, const std::vector<double>& lambdas);

// max |h(t)| over [lo,hi]: endpoints plus real critical points of h.
double poly_max_abs(const PolyFilter& f, double lo, double hi);

// Upper bound on max |h'(t)| over [lo,hi] (endpoints plus real roots of h'').
// Defaults to [-1,1], which contains the spectrum of every [0,1]-valued
// graphon shift operator.
double lipschitz_constant(const PolyFilter& f, double lo = -1.0, double hi = 1.0);

// Lipschitz filters that flatten out toward t = 0: scale * s(t^2) where
// s(u) = u - u^2/2 + ... is the order-term truncation of log(1+u). Both the
// value and the slope vanish at the origin.
PolyFilter flat_lipschitz_filter(double scale, int order);

}  // namespace gpool
