#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "gpool/graphon.hpp"
#include "gpool/signal.hpp"

namespace gpool {

// Symmetric step function on [0,1]^2 with unconstrained real values; the
// difference of two graphons lives here.
struct StepKernel {
  Partition partition;
  Eigen::MatrixXd values;

  int size() const { return partition.size(); }
};

StepKernel kernel_of(const Graphon& step_graphon);

// Same kernel expressed on a finer partition (target must refine k's).
StepKernel refine_kernel(const StepKernel& k, const Partition& target);

// a - b blockwise on the union of both partitions.
StepKernel kernel_diff(const StepKernel& a, const StepKernel& b);
StepKernel common_refinement_diff(const Graphon& a, const Graphon& b);

// Integral of k over [0,1]^2.
double kernel_integral(const StepKernel& k);

// L^p norm of k as a function on [0,1]^2, p = 1 or 2. The L^2 norm equals the
// Hilbert-Schmidt norm of the associated integral operator.
double lp_norm(const StepKernel& k, int p);

// The operator T_k acts on step values as values * diag(mu); conjugating with
// diag(sqrt(mu)) gives the symmetric matrix used for all spectral work.
Eigen::MatrixXd symmetrized_operator(const StepKernel& k);

// Operator 2-norm of T_k (largest |eigenvalue| of the symmetrized matrix).
double spectral_norm(const StepKernel& k);

struct CutNormResult {
  double value = 0.0;
  std::vector<int> row_set;
  std::vector<int> col_set;
  bool exact = false;
};

// Exact cut norm of a step kernel: for every row subset S (2^n enumeration,
// n <= 20) the optimal column subset follows the signs of the weighted column
// sums; both signs of the objective are covered.
CutNormResult cut_norm_exact(const StepKernel& k);

// Alternating maximization from random starts (restart 0 always starts from
// the full row set). Feasible pairs only, so the value never exceeds the
// exact cut norm.
CutNormResult cut_norm_heuristic(const StepKernel& k, int restarts = 32, std::uint64_t seed = 0);

// Exact when the block count permits it, heuristic otherwise.
CutNormResult cut_norm(const StepKernel& k, int restarts = 32, std::uint64_t seed = 0);

// Small simple undirected motif used for homomorphism densities.
struct Motif {
  int vertex_count = 1;
  std::vector<std::pair<int, int>> edges;

  static Motif single_vertex();
  static Motif edge();
  static Motif triangle();
  static Motif path3();
  static Motif from_edges(int vertices, std::vector<std::pair<int, int>> edges);
};

// Weighted homomorphism density t(H,G): mean over all vertex maps of the
// product of edge weights. Coincides with the combinatorial count for 0/1
// adjacencies.
double hom_density_graph(const Motif& h, const Eigen::MatrixXd& adjacency);

// t(H,W) for a step graphon: the defining integral evaluated blockwise.
double hom_density_graphon(const Motif& h, const Graphon& w);

// Eigenpairs of the shift operator of a step graphon, ordered by decreasing
// |eigenvalue|. Column j of eigenfunctions holds the step values of the j-th
// eigenfunction, normalized to unit L^2 norm.
struct GraphonSpectrum {
  Partition partition;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenfunctions;
};

GraphonSpectrum spectrum_graphon(const Graphon& step_graphon);

// Fourier coefficients of x against the eigenfunctions (L^2 inner products).
Eigen::VectorXd gphon_ft(const GraphonSignal& x, const GraphonSpectrum& spectrum);

}  // namespace gpool
