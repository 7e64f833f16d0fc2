#include "gpool/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gpool/rng.hpp"

namespace gpool {
namespace {

constexpr int kExactCutNormLimit = 20;

// Entries B(i,j) = k(i,j) * mu_i * mu_j, so a subset-pair objective is a plain
// sum over B.
Eigen::MatrixXd weighted_values(const StepKernel& k) {
  const Eigen::VectorXd mu = k.partition.measures();
  return mu.asDiagonal() * k.values * mu.asDiagonal();
}

std::vector<int> mask_to_indices(std::uint32_t mask, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) out.push_back(i);
  }
  return out;
}

std::vector<int> flags_to_indices(const std::vector<char>& flags) {
  std::vector<int> out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

StepKernel kernel_of(const Graphon& step_graphon) {
  if (!step_graphon.is_step()) throw std::invalid_argument("kernel_of needs a step graphon");
  return StepKernel{step_graphon.partition(), step_graphon.values()};
}

StepKernel refine_kernel(const StepKernel& k, const Partition& target) {
  if (target == k.partition) return k;
  const int n = target.size();
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    idx[static_cast<std::size_t>(i)] = k.partition.interval_index(target.midpoint(i));
  Eigen::MatrixXd v(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      v(i, j) = k.values(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return StepKernel{target, std::move(v)};
}

StepKernel kernel_diff(const StepKernel& a, const StepKernel& b) {
  const Partition common = Partition::refine(a.partition, b.partition);
  const StepKernel ra = refine_kernel(a, common);
  const StepKernel rb = refine_kernel(b, common);
  return StepKernel{common, ra.values - rb.values};
}

StepKernel common_refinement_diff(const Graphon& a, const Graphon& b) {
  return kernel_diff(kernel_of(a), kernel_of(b));
}

double kernel_integral(const StepKernel& k) {
  const Eigen::VectorXd mu = k.partition.measures();
  return mu.dot(k.values * mu);
}

double lp_norm(const StepKernel& k, int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("lp_norm supports p = 1 or 2");
  const Eigen::VectorXd mu = k.partition.measures();
  double acc = 0.0;
  for (int i = 0; i < k.size(); ++i) {
    for (int j = 0; j < k.size(); ++j) {
      const double v = std::abs(k.values(i, j));
      acc += (p == 1 ? v : v * v) * mu[i] * mu[j];
    }
  }
  return p == 1 ? acc : std::sqrt(acc);
}

Eigen::MatrixXd symmetrized_operator(const StepKernel& k) {
  const Eigen::VectorXd d = k.partition.measures().cwiseSqrt();
  return d.asDiagonal() * k.values * d.asDiagonal();
}

double spectral_norm(const StepKernel& k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized_operator(k),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

CutNormResult cut_norm_exact(const StepKernel& k) {
  const int n = k.size();
  if (n > kExactCutNormLimit)
    throw std::length_error("cut_norm_exact is limited to 20 blocks; use cut_norm_heuristic");
  const Eigen::MatrixXd b = weighted_values(k);

  CutNormResult best;
  best.exact = true;

  // Reflected Gray code over row subsets: one row flips per step, so the
  // column sums update in O(n).
  Eigen::VectorXd col_sum = Eigen::VectorXd::Zero(n);
  std::uint32_t mask = 0;
  const std::uint32_t total = 1u << n;
  for (std::uint32_t g = 1; g < total; ++g) {
    const int flip = std::countr_zero(g);
    const std::uint32_t bit = 1u << flip;
    mask ^= bit;
    if (mask & bit) col_sum += b.row(flip).transpose();
    else col_sum -= b.row(flip).transpose();

    double pos = 0.0, neg = 0.0;
    for (int j = 0; j < n; ++j) {
      if (col_sum[j] > 0.0) pos += col_sum[j];
      else neg += col_sum[j];
    }
    const bool positive_side = pos >= -neg;
    const double cand = positive_side ? pos : -neg;
    if (cand > best.value) {
      best.value = cand;
      best.row_set = mask_to_indices(mask, n);
      best.col_set.clear();
      for (int j = 0; j < n; ++j) {
        if (positive_side ? col_sum[j] > 0.0 : col_sum[j] < 0.0) best.col_set.push_back(j);
      }
    }
  }
  return best;
}

CutNormResult cut_norm_heuristic(const StepKernel& k, int restarts, std::uint64_t seed) {
  const int n = k.size();
  const Eigen::MatrixXd b = weighted_values(k);
  const Rng root(seed);

  CutNormResult best;
  best.exact = false;

  for (int r = 0; r < std::max(restarts, 1); ++r) {
    Rng rng = root.fork(static_cast<std::uint64_t>(r));
    std::vector<char> start(static_cast<std::size_t>(n), 1);
    if (r > 0) {
      for (auto& f : start) f = rng.next_u64() & 1u ? 1 : 0;
    }
    // One alternation pass per objective sign.
    for (const double sign : {1.0, -1.0}) {
      std::vector<char> rows = start, cols(static_cast<std::size_t>(n), 0);
      double value = -1.0;
      for (int iter = 0; iter < 200; ++iter) {
        Eigen::VectorXd col_sum = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
          if (rows[static_cast<std::size_t>(i)]) col_sum += b.row(i).transpose();
        }
        double v = 0.0;
        for (int j = 0; j < n; ++j) {
          cols[static_cast<std::size_t>(j)] = sign * col_sum[j] > 0.0 ? 1 : 0;
          if (cols[static_cast<std::size_t>(j)]) v += sign * col_sum[j];
        }
        Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < n; ++j) {
          if (cols[static_cast<std::size_t>(j)]) row_sum += b.col(j);
        }
        double v2 = 0.0;
        for (int i = 0; i < n; ++i) {
          rows[static_cast<std::size_t>(i)] = sign * row_sum[i] > 0.0 ? 1 : 0;
          if (rows[static_cast<std::size_t>(i)]) v2 += sign * row_sum[i];
        }
        if (v2 <= value) {
          value = std::max(value, v2);
          break;
        }
        value = v2;
      }
      if (value > best.value) {
        best.value = value;
        best.row_set = flags_to_indices(rows);
        best.col_set = flags_to_indices(cols);
      }
    }
  }
  return best;
}

CutNormResult cut_norm(const StepKernel& k, int restarts, std::uint64_t seed) {
  if (k.size() <= kExactCutNormLimit) return cut_norm_exact(k);
  return cut_norm_heuristic(k, restarts, seed);
}

Motif Motif::single_vertex() { return Motif{1, {}}; }
Motif Motif::edge() { return from_edges(2, {{0, 1}}); }
Motif Motif::triangle() { return from_edges(3, {{0, 1}, {1, 2}, {0, 2}}); }
Motif Motif::path3() { return from_edges(3, {{0, 1}, {1, 2}}); }

Motif Motif::from_edges(int vertices, std::vector<std::pair<int, int>> edges) {
  if (vertices < 1 || vertices > 5)
    throw std::length_error("motifs are limited to 1..5 vertices");
  std::vector<std::pair<int, int>> seen;
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertices || v >= vertices)
      throw std::invalid_argument("motif edge endpoint out of range");
    if (u == v) throw std::invalid_argument("motifs have no self-loops");
    if (u > v) std::swap(u, v);
    if (std::find(seen.begin(), seen.end(), std::make_pair(u, v)) != seen.end())
      throw std::invalid_argument("motifs are simple graphs (duplicate edge)");
    seen.emplace_back(u, v);
  }
  return Motif{vertices, std::move(edges)};
}

namespace {

// Sum over all vertex maps of (edge-weight product) * (per-vertex weight
// product). Covers both the graph and the step-graphon densities.
double hom_sum(const Motif& h, const Eigen::MatrixXd& values, const Eigen::VectorXd* vertex_weight) {
  const int n = static_cast<int>(values.rows());
  const int v_count = h.vertex_count;
  std::vector<int> phi(static_cast<std::size_t>(v_count), 0);
  double total = 0.0;
  for (;;) {
    double term = 1.0;
    for (const auto& [u, v] : h.edges)
      term *= values(phi[static_cast<std::size_t>(u)], phi[static_cast<std::size_t>(v)]);
    if (vertex_weight) {
      for (int q = 0; q < v_count; ++q) term *= (*vertex_weight)[phi[static_cast<std::size_t>(q)]];
    }
    total += term;
    int d = 0;
    while (d < v_count && ++phi[static_cast<std::size_t>(d)] == n) {
      phi[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == v_count) break;
  }
  return total;
}

}  // namespace

double hom_density_graph(const Motif& h, const Eigen::MatrixXd& adjacency) {
  if (h.vertex_count > 5) throw std::length_error("motifs are limited to 5 vertices");
  if (adjacency.rows() != adjacency.cols() || adjacency.rows() < 1)
    throw std::invalid_argument("adjacency must be square and non-empty");
  const double n = static_cast<double>(adjacency.rows());
  return hom_sum(h, adjacency, nullptr) / std::pow(n, h.vertex_count);
}

double hom_density_graphon(const Motif& h, const Graphon& w) {
  if (h.vertex_count > 5) throw std::length_error("motifs are limited to 5 vertices");
  if (!w.is_step()) throw std::invalid_argument("hom_density_graphon needs a step graphon");
  const Eigen::VectorXd mu = w.partition().measures();
  return hom_sum(h, w.values(), &mu);
}

GraphonSpectrum spectrum_graphon(const Graphon& step_graphon) {
  const StepKernel k = kernel_of(step_graphon);
  const int n = k.size();
  const Eigen::VectorXd d = k.partition.measures().cwiseSqrt();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized_operator(k));
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double fa = std::abs(ev[a]), fb = std::abs(ev[b]);
    if (fa != fb) return fa > fb;
    return ev[a] > ev[b];
  });

  GraphonSpectrum out;
  out.partition = k.partition;
  out.eigenvalues.resize(n);
  out.eigenfunctions.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const int src = order[static_cast<std::size_t>(j)];
    out.eigenvalues[j] = ev[src];
    Eigen::VectorXd u = es.eigenvectors().col(src);
    // Deterministic sign: the largest-magnitude entry is made positive.
    int arg = 0;
    for (int i = 1; i < n; ++i) {
      if (std::abs(u[i]) > std::abs(u[arg])) arg = i;
    }
    if (u[arg] < 0.0) u = -u;
    out.eigenfunctions.col(j) = u.cwiseQuotient(d);
  }
  return out;
}

Eigen::VectorXd gphon_ft(const GraphonSignal& x, const GraphonSpectrum& spectrum) {
  if (x.partition == spectrum.partition) {
    const Eigen::VectorXd mu = x.partition.measures();
    return spectrum.eigenfunctions.transpose() * mu.cwiseProduct(x.values);
  }
  const Partition common = Partition::refine(x.partition, spectrum.partition);
  const GraphonSignal xr = refine_signal(x, common);
  const Eigen::VectorXd mu = common.measures();
  Eigen::VectorXd coeffs(spectrum.eigenfunctions.cols());
  for (int j = 0; j < spectrum.eigenfunctions.cols(); ++j) {
    const GraphonSignal phi{spectrum.partition, spectrum.eigenfunctions.col(j)};
    const GraphonSignal phir = refine_signal(phi, common);
    coeffs[j] = phir.values.dot(mu.cwiseProduct(xr.values));
  }
  return coeffs;
}

}  // namespace gpool
