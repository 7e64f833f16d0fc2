#include "gpool/filters.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpool/metrics.hpp"

namespace gpool {
namespace {

// Real roots of the polynomial inside [lo,hi], via companion-matrix
// eigenvalues. Complex pairs with negligible imaginary part count as real.
std::vector<double> real_roots_in(const std::vector<double>& coeffs, double lo, double hi) {
  int degree = static_cast<int>(coeffs.size()) - 1;
  while (degree > 0 && coeffs[static_cast<std::size_t>(degree)] == 0.0) --degree;
  if (degree < 1) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  const double lead = coeffs[static_cast<std::size_t>(degree)];
  for (int i = 0; i < degree; ++i) {
    if (i + 1 < degree) companion(i + 1, i) = 1.0;
    companion(i, degree - 1) = -coeffs[static_cast<std::size_t>(i)] / lead;
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> es(companion);
  std::vector<double> roots;
  for (int i = 0; i < degree; ++i) {
    const std::complex<double> r = es.eigenvalues()[i];
    if (std::abs(r.imag()) > 1e-9 * (1.0 + std::abs(r.real()))) continue;
    const double t = r.real();
    if (t >= lo && t <= hi) roots.push_back(t);
  }
  return roots;
}

}  // namespace

double PolyFilter::operator()(double t) const {
  if (coeffs.empty()) throw std::invalid_argument("filter needs at least one coefficient");
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

PolyFilter PolyFilter::derivative() const {
  if (coeffs.size() <= 1) return PolyFilter{{0.0}};
  std::vector<double> d(coeffs.size() - 1);
  for (std::size_t k = 1; k < coeffs.size(); ++k)
    d[k - 1] = static_cast<double>(k) * coeffs[k];
  return PolyFilter{std::move(d)};
}

ShiftOperator ShiftOperator::from_adjacency(const Eigen::MatrixXd& adjacency, ShiftScaling scaling) {
  if (adjacency.rows() != adjacency.cols() || adjacency.rows() < 1)
    throw std::invalid_argument("shift operator must be square and non-empty");
  if ((adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("shift operator must be symmetric");
  ShiftOperator s;
  s.scaling = scaling;
  switch (scaling) {
    case ShiftScaling::Raw: s.matrix = adjacency; break;
    case ShiftScaling::Graphon:
      s.matrix = adjacency / static_cast<double>(adjacency.rows());
      break;
    case ShiftScaling::Spectral: {
      const double radius = spectral_radius(adjacency);
      s.matrix = radius > 0.0 ? Eigen::MatrixXd(adjacency / radius) : adjacency;
      break;
    }
  }
  return s;
}

double spectral_radius(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::VectorXd apply_graph_filter(const ShiftOperator& s, const PolyFilter& f,
                                   const Eigen::VectorXd& x) {
  if (f.coeffs.empty()) throw std::invalid_argument("filter needs at least one coefficient");
  if (x.size() != s.order()) throw std::invalid_argument("signal length must match the shift order");
  Eigen::VectorXd y = f.coeffs.back() * x;
  for (int k = f.taps() - 2; k >= 0; --k) y = s.matrix * y + f.coeffs[static_cast<std::size_t>(k)] * x;
  return y;
}

GraphonSignal apply_graphon_filter(const Graphon& w, const PolyFilter& f, const GraphonSignal& x) {
  if (!w.is_step()) throw std::invalid_argument("graphon filtering needs a step graphon");
  if (f.coeffs.empty()) throw std::invalid_argument("filter needs at least one coefficient");
  const Partition common = x.partition == w.partition()
                               ? x.partition
                               : Partition::refine(x.partition, w.partition());
  const GraphonSignal xs = refine_signal(x, common);
  // T_W on step values: integrate against the kernel blocks, i.e. multiply by
  // values(common) * diag(mu).
  const StepKernel kernel = refine_kernel(kernel_of(w), common);
  const Eigen::MatrixXd op = kernel.values * common.measures().asDiagonal();
  Eigen::VectorXd y = f.coeffs.back() * xs.values;
  for (int k = f.taps() - 2; k >= 0; --k) y = op * y + f.coeffs[static_cast<std::size_t>(k)] * xs.values;
  return GraphonSignal{common, std::move(y)};
}

double theorem1_residual(const Eigen::MatrixXd& adjacency, const PolyFilter& f,
                         const Eigen::VectorXd& x) {
  const GraphonSignal via_graphon = apply_graphon_filter(Graphon::induced(adjacency), f, step_signal(x));
  const ShiftOperator scaled = ShiftOperator::from_adjacency(adjacency, ShiftScaling::Graphon);
  const GraphonSignal via_graph = step_signal(apply_graph_filter(scaled, f, x));
  return (via_graphon.values - via_graph.values).cwiseAbs().maxCoeff();
}

std::vector<double> frequency_response(const PolyFilter& f, const std::vector<double>& lambdas) {
  std::vector<double> out(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) out[i] = f(lambdas[i]);
  return out;
}

double poly_max_abs(const PolyFilter& f, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("interval must satisfy lo < hi");
  double best = std::max(std::abs(f(lo)), std::abs(f(hi)));
  for (double t : real_roots_in(f.derivative().coeffs, lo, hi))
    best = std::max(best, std::abs(f(t)));
  return best;
}

double lipschitz_constant(const PolyFilter& f, double lo, double hi) {
  return poly_max_abs(f.derivative(), lo, hi);
}

PolyFilter flat_lipschitz_filter(double scale, int order) {
  if (order < 1) throw std::invalid_argument("flat filter order must be positive");
  std::vector<double> coeffs(static_cast<std::size_t>(2 * order) + 1, 0.0);
  double sign = 1.0;
  for (int k = 1; k <= order; ++k) {
    coeffs[static_cast<std::size_t>(2 * k)] = sign * scale / k;
    sign = -sign;
  }
  return PolyFilter{std::move(coeffs)};
}

}  // namespace gpool
