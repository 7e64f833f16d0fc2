#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gpool/pooling.hpp"

namespace gpool {

struct TrainHyper {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 20;
  int epochs = 300;
  std::uint64_t seed = 0;

  void validate() const;
};

// Labeled diffusion signals x_t = (S/|lambda_max|)^t e_c for sources c drawn
// from a fixed candidate set. Column s of signals is sample s.
struct DiffusionDataset {
  Eigen::MatrixXd signals;
  std::vector<int> labels;
  std::vector<int> source_nodes;
  int t_max = 25;
  std::uint64_t seed = 0;

  int count() const { return static_cast<int>(labels.size()); }
  int classes() const { return static_cast<int>(source_nodes.size()); }
};

DiffusionDataset make_diffusion_dataset(const Eigen::MatrixXd& adjacency, int n_samples,
                                        int classes, int t_max, std::uint64_t seed);

// Contiguous sample range [begin, begin+count) as its own dataset.
DiffusionDataset dataset_slice(const DiffusionDataset& ds, int begin, int count);

// Layer l filters on the layer-l graph of the plan (order sizes[l]) and then
// interpolates down to sizes[l+1], so a plan with sizes [N0, ..., NL] yields
// an L-layer network. features has L+1 entries (features[0] is the input
// feature count), taps has L.
struct GnnConfig {
  PoolingPlan plan;
  std::vector<int> features;
  std::vector<int> taps;
  int classes = 10;
  std::uint64_t seed = 0;

  int layer_count() const { return static_cast<int>(taps.size()); }
  void validate() const;
};

struct GnnWeights {
  // taps[l][k]: mixing matrix (F_in x F_out) applied to S^k x in layer l.
  std::vector<std::vector<Eigen::MatrixXd>> taps;
  Eigen::MatrixXd readout_weight;  // classes x (N_L * F_L)
  Eigen::VectorXd readout_bias;

  void set_zero();
  int parameter_count() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_error = 0.0;
};

struct TrainResult {
  GnnWeights weights;
  std::vector<EpochRecord> history;
};

// Precomputed shift operators (spectrally normalized) and interpolation maps
// for a config. Everything here is immutable after construction.
class GnnModel {
 public:
  explicit GnnModel(GnnConfig cfg);

  const GnnConfig& config() const { return cfg_; }
  const Eigen::MatrixXd& shift(int layer) const { return shifts_[static_cast<std::size_t>(layer)]; }
  const Eigen::MatrixXd& pooling_map(int layer) const { return interp_[static_cast<std::size_t>(layer)]; }

  GnnWeights zero_weights() const;
  GnnWeights init_weights(std::uint64_t seed) const;

  Eigen::VectorXd forward(const GnnWeights& w, const Eigen::VectorXd& x) const;

  // Mean cross-entropy over the index range [begin,end) of order, with
  // gradients accumulated into grads (which must start zeroed).
  double loss_and_gradients(const GnnWeights& w, const Eigen::MatrixXd& xs,
                            const std::vector<int>& labels, const std::vector<int>& order,
                            int begin, int end, GnnWeights& grads) const;

 private:
  GnnConfig cfg_;
  std::vector<Eigen::MatrixXd> shifts_;
  std::vector<Eigen::MatrixXd> interp_;
};

// ADAM with bias correction, applied tensor-by-tensor in a fixed order.
class AdamOptimizer {
 public:
  AdamOptimizer(const GnnWeights& shape, TrainHyper hyper);
  void step(GnnWeights& w, const GnnWeights& grads);

 private:
  TrainHyper hyper_;
  GnnWeights m_;
  GnnWeights v_;
  int t_ = 0;
};

// Deterministic given hyper.seed: fixed shuffling, fixed batch order, fixed
// reduction order. Throws std::runtime_error with the epoch index if the
// loss stops being finite.
TrainResult train(const GnnModel& model, const DiffusionDataset& train_set,
                  const DiffusionDataset& val_set, const TrainHyper& hyper);

// Fraction of argmax-logit mismatches.
double evaluate(const GnnModel& model, const GnnWeights& w, const DiffusionDataset& data);

double mse_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);
Eigen::VectorXd mse_loss_grad(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

double cross_entropy_loss(const Eigen::VectorXd& logits, int label);

}  // namespace gpool
