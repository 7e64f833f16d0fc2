#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpool/filters.hpp"
#include "gpool/graphon.hpp"
#include "gpool/metrics.hpp"
#include "gpool/pooling.hpp"

namespace gpool {

// Outcome of one numeric check: per-trial records plus verdict counts.
// Re-running with the recorded seed reproduces the report exactly.
struct BoundReport {
  std::string check_id;
  std::uint64_t seed = 0;
  nlohmann::json params;
  std::vector<nlohmann::json> trials;
  int passed = 0;
  int failed = 0;

  bool pass() const { return failed == 0; }
  nlohmann::json to_json() const;
};

// Scaling identity between graph filtering with S/N and graphon filtering on
// the induced graphon; random (A, h, x) trials, residual must stay <= 1e-9.
BoundReport check_theorem1(int trials, int n_max, int k_max, std::uint64_t seed);

// Convergence of the regular-integration pooling: cut-norm estimates of
// W - W_G on a fine common grid must be non-increasing in the pooled size and
// below 2/sqrt(log N).
BoundReport check_theorem2(const Graphon& w, const std::vector<int>& sizes, int fine_n,
                           int restarts = 32, std::uint64_t seed = 0);

// Step-function representation adequacy: the canonical refinement H at
// refine_factor * n should be at least as close to W_G as the fine proxy is.
BoundReport check_lemma1(const Graphon& w, int n, int refine_factor, int fine_n,
                         int restarts = 64, std::uint64_t seed = 0);

// Filter perturbation bound: |h(T_W) - h(T_WG)| <= gamma C sqrt(8 |W-W_G|_cut)
// for Lipschitz filters that flatten out toward zero.
BoundReport check_theorem3(const Graphon& w, const std::vector<int>& n_list, int trials,
                           int fine_n, std::uint64_t seed);

// Cascade bound for the layered filter/ReLU network with per-layer pooled
// shift operators, unit-sup-norm filters.
BoundReport check_theorem4(const Graphon& w, const PoolingPlan& plan, int trials, int fine_n,
                           std::uint64_t seed);

// Stability of regular-integration pooling under perturbed graph estimates:
// cut norm of the difference of the pooled estimates stays below 32 eps.
BoundReport check_theorem5(const Graphon& w, double eps, int n_pool, int trials, int fine_n,
                           std::uint64_t seed);

// Edge dropping: the triangle inequality on spectral norms is asserted
// (always true) and the Lipschitz-filter variant is reported with the
// measured commutator factor.
BoundReport check_theorem6(const Graphon& w, int n, double drop_fraction,
                           const PolyFilter& filter, int trials, int fine_n,
                           std::uint64_t seed);

// Step-graphon proxy of w on the regular fine_n-grid (regular integration).
Graphon fine_proxy(const Graphon& w, int fine_n, double tol = Graphon::kDefaultTol);

// Step values of h(T_k) minus its constant term on k's partition; the
// identity parts cancel in every operator difference the checks take.
Eigen::MatrixXd filtered_kernel_values(const StepKernel& k, const PolyFilter& f);

// Layered graphon-filter cascade x -> relu(h_l(T_l) x) on a shared partition;
// used by the no-pooling and pooled sides of the network comparison.
GraphonSignal gphon_nn_cascade(const std::vector<StepKernel>& layer_kernels,
                               const std::vector<PolyFilter>& filters, const GraphonSignal& x);

}  // namespace gpool
