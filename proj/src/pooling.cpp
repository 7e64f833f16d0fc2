#include "gpool/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpool/rng.hpp"

namespace gpool {
namespace {

constexpr int kMaxDraws = 64;

bool gaps_ok(const std::vector<double>& sorted) {
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i + 1] - sorted[i] < Partition::kMinWidth) return false;
  }
  return true;
}

// Shared bracketing rule: weights of the fine values contributing to one
// interpolated output at position t, given sorted fine positions.
void bracket_row(Eigen::MatrixXd& m, int row, const std::vector<double>& fine_pos, double t) {
  const int n = static_cast<int>(fine_pos.size());
  if (t <= fine_pos.front()) {
    m(row, 0) = 1.0;
    return;
  }
  if (t >= fine_pos.back()) {
    m(row, n - 1) = 1.0;
    return;
  }
  const auto it = std::lower_bound(fine_pos.begin(), fine_pos.end(), t);
  const int j = static_cast<int>(it - fine_pos.begin());
  if (fine_pos[j] == t) {
    m(row, j) = 1.0;
  } else {
    m(row, j - 1) = 0.5;
    m(row, j) = 0.5;
  }
}

Eigen::MatrixXd bracket_matrix(const std::vector<double>& fine_pos, const std::vector<double>& coarse_pos) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<int>(coarse_pos.size()),
                                            static_cast<int>(fine_pos.size()));
  for (std::size_t r = 0; r < coarse_pos.size(); ++r)
    bracket_row(m, static_cast<int>(r), fine_pos, coarse_pos[r]);
  return m;
}

std::vector<double> partition_midpoints(const Partition& p) {
  std::vector<double> mids(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.size(); ++i) mids[static_cast<std::size_t>(i)] = p.midpoint(i);
  return mids;
}

}  // namespace

SamplePoints SamplePoints::from_points(std::vector<double> pts) {
  if (pts.empty()) throw std::invalid_argument("sample points must be non-empty");
  if (!std::is_sorted(pts.begin(), pts.end()))
    throw std::invalid_argument("sample points must be sorted");
  for (double p : pts) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("sample points must lie in [0,1]");
  }
  if (!gaps_ok(pts)) throw std::invalid_argument("sample points too close together");
  return SamplePoints{std::move(pts)};
}

Partition regular_partition(int n) { return Partition::regular(n); }

Partition random_partition(int n, std::uint64_t seed) {
  if (n < 1) throw std::domain_error("partition size must be positive");
  Rng rng(seed);
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    std::vector<double> bp(static_cast<std::size_t>(n) + 1);
    bp.front() = 0.0;
    bp.back() = 1.0;
    for (int i = 1; i < n; ++i) bp[static_cast<std::size_t>(i)] = rng.next_double();
    std::sort(bp.begin(), bp.end());
    if (gaps_ok(bp)) return Partition::from_breakpoints(std::move(bp));
  }
  throw std::runtime_error("random partition: retry limit exceeded");
}

SamplePoints sample_points(int n, std::uint64_t seed) {
  if (n < 1) throw std::domain_error("sample count must be positive");
  Rng rng(seed);
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    std::vector<double> pts(static_cast<std::size_t>(n));
    for (double& p : pts) p = rng.next_double();
    std::sort(pts.begin(), pts.end());
    if (gaps_ok(pts)) return SamplePoints{std::move(pts)};
  }
  throw std::runtime_error("sample points: retry limit exceeded");
}

Eigen::MatrixXd pool_m2(const Graphon& w, const Partition& partition, double tol) {
  const int n = partition.size();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double area = partition.measure(i) * partition.measure(j);
      const double box_tol = std::max(tol * area, 1e-16);
      const double integral = w.integrate_box(partition.lower(j), partition.upper(j),
                                              partition.lower(i), partition.upper(i), box_tol);
      const double v = std::clamp(integral / area, 0.0, 1.0);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

Eigen::MatrixXd pool_m1(const Graphon& w, int n, double tol) {
  if (n < 1) throw std::domain_error("pooled size must be positive");
  return pool_m2(w, Partition::regular(n), tol);
}

Eigen::MatrixXd pool_m3(const Graphon& w, const SamplePoints& points, bool zero_diagonal) {
  const int n = points.size();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = w(points.points[static_cast<std::size_t>(i)],
                         points.points[static_cast<std::size_t>(j)]);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  if (zero_diagonal) a.diagonal().setZero();
  return a;
}

Eigen::MatrixXd interval_interpolation_matrix(const Partition& fine, const Partition& coarse) {
  if (fine.size() < 2) throw std::invalid_argument("interpolation needs at least two fine intervals");
  return bracket_matrix(partition_midpoints(fine), partition_midpoints(coarse));
}

Eigen::MatrixXd point_interpolation_matrix(const SamplePoints& fine, const SamplePoints& coarse) {
  if (fine.size() < 2) throw std::invalid_argument("interpolation needs at least two fine points");
  return bracket_matrix(fine.points, coarse.points);
}

GraphonSignal interpolate_signal_intervals(const GraphonSignal& x_fine, const Partition& coarse) {
  const Eigen::MatrixXd p = interval_interpolation_matrix(x_fine.partition, coarse);
  return GraphonSignal{coarse, p * x_fine.values};
}

Eigen::VectorXd interpolate_signal_points(const Eigen::VectorXd& x_fine,
                                          const SamplePoints& pts_fine,
                                          const SamplePoints& pts_coarse) {
  if (x_fine.size() != pts_fine.size())
    throw std::invalid_argument("signal length must match its point set");
  return point_interpolation_matrix(pts_fine, pts_coarse) * x_fine;
}

std::string method_name(PoolingMethod m) {
  switch (m) {
    case PoolingMethod::M1: return "m1";
    case PoolingMethod::M2: return "m2";
    case PoolingMethod::M3: return "m3";
  }
  return "unknown";
}

PoolingMethod parse_method(const std::string& name) {
  if (name == "m1" || name == "M1") return PoolingMethod::M1;
  if (name == "m2" || name == "M2") return PoolingMethod::M2;
  if (name == "m3" || name == "M3") return PoolingMethod::M3;
  throw std::invalid_argument("unknown pooling method: " + name);
}

PoolingPlan build_pooling_plan(const Graphon& w, PoolingMethod method, std::vector<int> sizes,
                               std::uint64_t seed, double tol) {
  if (sizes.empty()) throw std::invalid_argument("pooling plan needs at least one layer size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw std::invalid_argument("layer sizes must be positive");
    if (i > 0 && sizes[i] >= sizes[i - 1])
      throw std::invalid_argument("layer sizes must be strictly decreasing");
  }

  PoolingPlan plan;
  plan.method = method;
  plan.sizes = sizes;
  plan.seed = seed;
  const Rng root(seed);
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    const int n = sizes[l];
    // Layer sub-seed is derived, not consumed from a shared stream, so layers
    // could be generated concurrently without changing the result.
    const std::uint64_t sub = root.fork(static_cast<std::uint64_t>(l)).next_u64();
    PoolingLayer layer;
    switch (method) {
      case PoolingMethod::M1:
        layer.partition = Partition::regular(n);
        layer.adjacency = pool_m1(w, n, tol);
        if (l > 0 && sizes[l - 1] % n != 0) {
          plan.warnings.push_back("m1 layer size " + std::to_string(n) +
                                  " does not divide the previous size " +
                                  std::to_string(sizes[l - 1]) +
                                  "; partitions will not be refinements");
        }
        break;
      case PoolingMethod::M2:
        layer.partition = random_partition(n, sub);
        layer.adjacency = pool_m2(w, layer.partition, tol);
        break;
      case PoolingMethod::M3:
        layer.points = sample_points(n, sub);
        layer.adjacency = pool_m3(w, layer.points);
        break;
    }
    plan.layers.push_back(std::move(layer));
  }
  return plan;
}

Eigen::MatrixXd interpolation_matrix(const PoolingPlan& plan, int from) {
  if (from < 0 || from + 1 >= plan.layer_count())
    throw std::invalid_argument("interpolation layer index out of range");
  const PoolingLayer& a = plan.layers[static_cast<std::size_t>(from)];
  const PoolingLayer& b = plan.layers[static_cast<std::size_t>(from) + 1];
  if (plan.method == PoolingMethod::M3) return point_interpolation_matrix(a.points, b.points);
  return interval_interpolation_matrix(a.partition, b.partition);
}

}  // namespace gpool
