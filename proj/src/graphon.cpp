#include "gpool/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpool {
namespace {

// Gauss-Legendre nodes/weights of order 8 on [-1,1].
constexpr int kGlOrder = 8;
constexpr double kGlNode[kGlOrder] = {
    -0.96028985649753623, -0.79666647741362674, -0.52553240991632899,
    -0.18343464249564980, 0.18343464249564980,  0.52553240991632899,
    0.79666647741362674,  0.96028985649753623};
constexpr double kGlWeight[kGlOrder] = {
    0.10122853629037626, 0.22238103445337447, 0.31370664587788729,
    0.36268378337836198, 0.36268378337836198, 0.31370664587788729,
    0.22238103445337447, 0.10122853629037626};

template <typename F>
double gl8_1d(const F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (int i = 0; i < kGlOrder; ++i) acc += kGlWeight[i] * f(mid + half * kGlNode[i]);
  return acc * half;
}

template <typename F>
double gl8_2d_cell(const F& f, double x0, double x1, double y0, double y1) {
  const double hx = 0.5 * (x1 - x0), mx = 0.5 * (x0 + x1);
  const double hy = 0.5 * (y1 - y0), my = 0.5 * (y0 + y1);
  double acc = 0.0;
  for (int i = 0; i < kGlOrder; ++i) {
    const double x = mx + hx * kGlNode[i];
    double row = 0.0;
    for (int j = 0; j < kGlOrder; ++j) row += kGlWeight[j] * f(x, my + hy * kGlNode[j]);
    acc += kGlWeight[i] * row;
  }
  return acc * hx * hy;
}

// Composite 2D rule over an m x m grid of subcells.
template <typename F>
double composite_2d(const F& f, double x0, double x1, double y0, double y1, int m) {
  const double dx = (x1 - x0) / m, dy = (y1 - y0) / m;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      acc += gl8_2d_cell(f, x0 + i * dx, x0 + (i + 1) * dx, y0 + j * dy, y0 + (j + 1) * dy);
    }
  }
  return acc;
}

template <typename F>
double composite_1d(const F& f, const std::vector<double>& cuts, int m) {
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    const double h = (b - a) / m;
    for (int i = 0; i < m; ++i) acc += gl8_1d(f, a + i * h, a + (i + 1) * h);
  }
  return acc;
}

// Integral of |x-y| over y in [c,d] for fixed x; piecewise quadratic in x
// with formula breaks at x = c and x = d.
double abs_inner(double x, double c, double d) {
  if (x <= c) return (d - c) * (0.5 * (c + d) - x);
  if (x >= d) return (d - c) * (x - 0.5 * (c + d));
  return 0.5 * ((x - c) * (x - c) + (d - x) * (d - x));
}

double logmax_antideriv(double y) { return (1.0 + y) * std::log1p(y) - y; }

// Integral of log(1 + max(x,y)) over y in [c,d] for fixed x.
double logmax_inner(double x, double c, double d) {
  if (x <= c) return logmax_antideriv(d) - logmax_antideriv(c);
  if (x >= d) return (d - c) * std::log1p(x);
  return (x - c) * std::log1p(x) + logmax_antideriv(d) - logmax_antideriv(x);
}

}  // namespace

std::string family_name(GraphonFamily f) {
  switch (f) {
    case GraphonFamily::Exponential: return "exponential";
    case GraphonFamily::Bilinear: return "bilinear";
    case GraphonFamily::Polynomial: return "polynomial";
    case GraphonFamily::LogMax: return "logmax";
    case GraphonFamily::Absolute: return "absolute";
  }
  return "unknown";
}

Graphon Graphon::closed_form(GraphonFamily family, std::vector<double> params) {
  if (family == GraphonFamily::Exponential) {
    if (params.size() != 1) throw std::invalid_argument("exponential graphon takes one parameter (beta)");
    if (!(params[0] >= 0.0)) throw std::invalid_argument("exponential graphon needs beta >= 0");
  } else if (!params.empty()) {
    throw std::invalid_argument(family_name(family) + " graphon takes no parameters");
  }
  Graphon g;
  g.step_ = false;
  g.family_ = family;
  g.params_ = std::move(params);
  return g;
}

Graphon Graphon::exponential(double beta) { return closed_form(GraphonFamily::Exponential, {beta}); }
Graphon Graphon::bilinear() { return closed_form(GraphonFamily::Bilinear); }
Graphon Graphon::polynomial() { return closed_form(GraphonFamily::Polynomial); }
Graphon Graphon::logmax() { return closed_form(GraphonFamily::LogMax); }
Graphon Graphon::absolute() { return closed_form(GraphonFamily::Absolute); }

Graphon Graphon::step(Partition partition, Eigen::MatrixXd values) {
  const int n = partition.size();
  if (values.rows() != n || values.cols() != n)
    throw std::invalid_argument("step graphon values must be N x N for an N-interval partition");
  const double asym = (values - values.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) throw std::invalid_argument("step graphon values must be symmetric");
  const double lo = values.minCoeff(), hi = values.maxCoeff();
  if (lo < -1e-12 || hi > 1.0 + 1e-12)
    throw std::invalid_argument("step graphon values must lie in [0,1]");
  // Exact symmetry and range from here on (no-op for clean inputs).
  Eigen::MatrixXd v = 0.5 * (values + values.transpose());
  v = v.cwiseMax(0.0).cwiseMin(1.0);
  Graphon g;
  g.step_ = true;
  g.partition_ = std::move(partition);
  g.values_ = std::move(v);
  return g;
}

Graphon Graphon::induced(const Eigen::MatrixXd& adjacency) {
  if (adjacency.rows() != adjacency.cols() || adjacency.rows() < 1)
    throw std::invalid_argument("adjacency must be square and non-empty");
  return step(Partition::regular(static_cast<int>(adjacency.rows())), adjacency);
}

double Graphon::operator()(double x, double y) const {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw std::domain_error("graphon evaluated outside [0,1]^2");
  if (step_) return values_(partition_.interval_index(x), partition_.interval_index(y));
  double v = 0.0;
  switch (family_) {
    case GraphonFamily::Exponential: {
      const double d = x - y;
      v = std::exp(-params_[0] * d * d);
      break;
    }
    case GraphonFamily::Bilinear: v = x * y; break;
    case GraphonFamily::Polynomial: v = 0.5 * (x * x + y * y); break;
    case GraphonFamily::LogMax: v = std::log1p(std::max(x, y)); break;
    case GraphonFamily::Absolute: v = std::abs(x - y); break;
  }
  return std::clamp(v, 0.0, 1.0);
}

double Graphon::integrate_box(double x0, double x1, double y0, double y1, double tol) const {
  if (!(0.0 <= x0 && x0 <= x1 && x1 <= 1.0 && 0.0 <= y0 && y0 <= y1 && y1 <= 1.0))
    throw std::domain_error("integration box outside [0,1]^2");
  if (!(tol > 0.0)) throw std::domain_error("integration tolerance must be positive");
  if (x0 == x1 || y0 == y1) return 0.0;

  if (step_) {
    // Exact: sum of block value times overlap area.
    const int n = partition_.size();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ox = std::min(x1, partition_.upper(i)) - std::max(x0, partition_.lower(i));
      if (ox <= 0.0) continue;
      for (int j = 0; j < n; ++j) {
        const double oy = std::min(y1, partition_.upper(j)) - std::max(y0, partition_.lower(j));
        if (oy <= 0.0) continue;
        acc += values_(i, j) * ox * oy;
      }
    }
    return acc;
  }

  if (family_ == GraphonFamily::Absolute || family_ == GraphonFamily::LogMax) {
    // The kernel has a crease along x = y, so the plain tensor rule stalls.
    // The inner y-integral is available in closed form; integrate it in x
    // with the 1D composite rule, splitting at the points where the inner
    // formula changes branch.
    std::vector<double> cuts{x0};
    for (double c : {y0, y1}) {
      if (c > x0 && c < x1) cuts.push_back(c);
    }
    cuts.push_back(x1);
    const bool absolute = family_ == GraphonFamily::Absolute;
    const auto inner = [&](double x) {
      return absolute ? abs_inner(x, y0, y1) : logmax_inner(x, y0, y1);
    };
    double prev = composite_1d(inner, cuts, 1);
    for (int m = 2; m <= 4096; m *= 2) {
      const double cur = composite_1d(inner, cuts, m);
      if (std::abs(cur - prev) <= tol) return cur;
      prev = cur;
    }
    throw std::runtime_error("quadrature failed to converge");
  }

  const auto f = [this](double x, double y) { return (*this)(x, y); };
  double prev = composite_2d(f, x0, x1, y0, y1, 1);
  for (int m = 2; m <= 256; m *= 2) {
    const double cur = composite_2d(f, x0, x1, y0, y1, m);
    if (std::abs(cur - prev) <= tol) return cur;
    prev = cur;
  }
  throw std::runtime_error("quadrature failed to converge");
}

const Partition& Graphon::partition() const {
  if (!step_) throw std::logic_error("closed-form graphon has no partition");
  return partition_;
}

const Eigen::MatrixXd& Graphon::values() const {
  if (!step_) throw std::logic_error("closed-form graphon has no value matrix");
  return values_;
}

GraphonFamily Graphon::family() const {
  if (step_) throw std::logic_error("step graphon has no closed-form family");
  return family_;
}

const std::vector<double>& Graphon::params() const {
  if (step_) throw std::logic_error("step graphon has no closed-form parameters");
  return params_;
}

}  // namespace gpool
