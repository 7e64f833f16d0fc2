#include "gpool/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gpool/filters.hpp"
#include "gpool/rng.hpp"

namespace gpool {

void TrainHyper::validate() const {
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0))
    throw std::invalid_argument("adam decay factors must lie in (0,1)");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (batch_size < 1 || epochs < 1) throw std::invalid_argument("batch size and epochs must be positive");
}

DiffusionDataset make_diffusion_dataset(const Eigen::MatrixXd& adjacency, int n_samples,
                                        int classes, int t_max, std::uint64_t seed) {
  const int n = static_cast<int>(adjacency.rows());
  if (classes < 1 || classes > n) throw std::domain_error("class count must be in [1, N]");
  if (t_max < 1) throw std::domain_error("t_max must be at least 1");
  if (n_samples < 0) throw std::domain_error("sample count must be non-negative");

  const Eigen::MatrixXd shift = ShiftOperator::from_adjacency(adjacency, ShiftScaling::Spectral).matrix;

  Rng rng(seed);
  // Candidate sources: uniform draw without replacement.
  std::vector<int> nodes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) nodes[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < classes; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)]);
  }
  nodes.resize(static_cast<std::size_t>(classes));

  DiffusionDataset ds;
  ds.source_nodes = nodes;
  ds.t_max = t_max;
  ds.seed = seed;
  ds.signals.resize(n, n_samples);
  ds.labels.resize(static_cast<std::size_t>(n_samples));
  for (int s = 0; s < n_samples; ++s) {
    const int cls = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(classes)));
    const int t = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(t_max)));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x[nodes[static_cast<std::size_t>(cls)]] = 1.0;
    for (int step = 0; step < t; ++step) x = shift * x;
    ds.signals.col(s) = x;
    ds.labels[static_cast<std::size_t>(s)] = cls;
  }
  return ds;
}

DiffusionDataset dataset_slice(const DiffusionDataset& ds, int begin, int count) {
  if (begin < 0 || count < 0 || begin + count > ds.count())
    throw std::invalid_argument("dataset slice out of range");
  DiffusionDataset out;
  out.signals = ds.signals.middleCols(begin, count);
  out.labels.assign(ds.labels.begin() + begin, ds.labels.begin() + begin + count);
  out.source_nodes = ds.source_nodes;
  out.t_max = ds.t_max;
  out.seed = ds.seed;
  return out;
}

void GnnConfig::validate() const {
  const int layers = layer_count();
  if (layers < 1) throw std::invalid_argument("gnn needs at least one layer");
  if (plan.layer_count() != layers + 1)
    throw std::invalid_argument("plan must provide layer_count + 1 graphs");
  if (static_cast<int>(features.size()) != layers + 1)
    throw std::invalid_argument("features must have layer_count + 1 entries");
  if (features.front() != 1)
    throw std::invalid_argument("the input is a single-feature graph signal");
  for (int f : features) {
    if (f < 1) throw std::invalid_argument("feature counts must be positive");
  }
  for (int k : taps) {
    if (k < 1) throw std::invalid_argument("tap counts must be positive");
  }
  if (classes < 1) throw std::invalid_argument("class count must be positive");
}

void GnnWeights::set_zero() {
  for (auto& layer : taps) {
    for (auto& h : layer) h.setZero();
  }
  readout_weight.setZero();
  readout_bias.setZero();
}

int GnnWeights::parameter_count() const {
  int count = static_cast<int>(readout_weight.size() + readout_bias.size());
  for (const auto& layer : taps) {
    for (const auto& h : layer) count += static_cast<int>(h.size());
  }
  return count;
}

GnnModel::GnnModel(GnnConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const int layers = cfg_.layer_count();
  for (int l = 0; l < layers; ++l) {
    shifts_.push_back(
        ShiftOperator::from_adjacency(cfg_.plan.layers[static_cast<std::size_t>(l)].adjacency,
                                      ShiftScaling::Spectral)
            .matrix);
    interp_.push_back(interpolation_matrix(cfg_.plan, l));
  }
}

GnnWeights GnnModel::zero_weights() const {
  GnnWeights w;
  const int layers = cfg_.layer_count();
  w.taps.resize(static_cast<std::size_t>(layers));
  for (int l = 0; l < layers; ++l) {
    w.taps[static_cast<std::size_t>(l)].assign(
        static_cast<std::size_t>(cfg_.taps[static_cast<std::size_t>(l)]),
        Eigen::MatrixXd::Zero(cfg_.features[static_cast<std::size_t>(l)],
                              cfg_.features[static_cast<std::size_t>(l) + 1]));
  }
  const int last = cfg_.plan.sizes.back() * cfg_.features.back();
  w.readout_weight = Eigen::MatrixXd::Zero(cfg_.classes, last);
  w.readout_bias = Eigen::VectorXd::Zero(cfg_.classes);
  return w;
}

GnnWeights GnnModel::init_weights(std::uint64_t seed) const {
  GnnWeights w = zero_weights();
  Rng rng(seed);
  for (auto& layer : w.taps) {
    const double fan_in = static_cast<double>(layer.size()) * static_cast<double>(layer[0].rows());
    const double bound = std::sqrt(3.0 / fan_in);
    for (auto& h : layer) {
      for (int j = 0; j < h.cols(); ++j) {
        for (int i = 0; i < h.rows(); ++i) h(i, j) = rng.uniform(-bound, bound);
      }
    }
  }
  const double bound = std::sqrt(3.0 / static_cast<double>(w.readout_weight.cols()));
  for (int j = 0; j < w.readout_weight.cols(); ++j) {
    for (int i = 0; i < w.readout_weight.rows(); ++i) w.readout_weight(i, j) = rng.uniform(-bound, bound);
  }
  return w;
}

namespace {

struct LayerTrace {
  std::vector<Eigen::MatrixXd> shifted;  // S^k X for k = 0..K-1
  Eigen::MatrixXd pre_activation;        // Y before the nonlinearity
};

// Runs the filter/ReLU/pool cascade; traces are recorded only when requested.
Eigen::VectorXd run_forward(const GnnModel& model, const GnnWeights& w, const Eigen::VectorXd& x,
                            std::vector<LayerTrace>* traces, Eigen::MatrixXd* last_features) {
  const GnnConfig& cfg = model.config();
  const int layers = cfg.layer_count();
  if (x.size() != cfg.plan.sizes.front())
    throw std::invalid_argument("input length must match the first layer size");

  Eigen::MatrixXd features = x;  // N_l x F_l
  for (int l = 0; l < layers; ++l) {
    const auto& taps = w.taps[static_cast<std::size_t>(l)];
    const int k_taps = static_cast<int>(taps.size());
    std::vector<Eigen::MatrixXd> shifted(static_cast<std::size_t>(k_taps));
    shifted[0] = features;
    for (int k = 1; k < k_taps; ++k)
      shifted[static_cast<std::size_t>(k)] = model.shift(l) * shifted[static_cast<std::size_t>(k) - 1];

    Eigen::MatrixXd y = shifted[0] * taps[0];
    for (int k = 1; k < k_taps; ++k) y += shifted[static_cast<std::size_t>(k)] * taps[static_cast<std::size_t>(k)];

    if (traces) {
      (*traces)[static_cast<std::size_t>(l)].shifted = std::move(shifted);
      (*traces)[static_cast<std::size_t>(l)].pre_activation = y;
    }
    features = model.pooling_map(l) * y.cwiseMax(0.0);
  }
  if (last_features) *last_features = features;
  const Eigen::Map<const Eigen::VectorXd> flat(features.data(), features.size());
  return w.readout_weight * flat + w.readout_bias;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp();
  return e / e.sum();
}

}  // namespace

Eigen::VectorXd GnnModel::forward(const GnnWeights& w, const Eigen::VectorXd& x) const {
  return run_forward(*this, w, x, nullptr, nullptr);
}

double GnnModel::loss_and_gradients(const GnnWeights& w, const Eigen::MatrixXd& xs,
                                    const std::vector<int>& labels, const std::vector<int>& order,
                                    int begin, int end, GnnWeights& grads) const {
  const int layers = cfg_.layer_count();
  const int count = end - begin;
  if (count < 1) throw std::invalid_argument("empty batch");
  const double inv = 1.0 / count;

  double loss = 0.0;
  std::vector<LayerTrace> traces(static_cast<std::size_t>(layers));
  for (int pos = begin; pos < end; ++pos) {
    const int s = order[static_cast<std::size_t>(pos)];
    const int label = labels[static_cast<std::size_t>(s)];
    Eigen::MatrixXd last;
    const Eigen::VectorXd logits = run_forward(*this, w, xs.col(s), &traces, &last);
    loss += cross_entropy_loss(logits, label) * inv;

    Eigen::VectorXd dlogits = softmax(logits) * inv;
    dlogits[label] -= inv;

    const Eigen::Map<const Eigen::VectorXd> flat(last.data(), last.size());
    grads.readout_weight += dlogits * flat.transpose();
    grads.readout_bias += dlogits;

    Eigen::VectorXd dflat = w.readout_weight.transpose() * dlogits;
    Eigen::MatrixXd dfeat = Eigen::Map<Eigen::MatrixXd>(dflat.data(), last.rows(), last.cols());
    for (int l = layers - 1; l >= 0; --l) {
      const LayerTrace& tr = traces[static_cast<std::size_t>(l)];
      // Pooling is a fixed linear map; its adjoint is the transpose.
      Eigen::MatrixXd dy = pooling_map(l).transpose() * dfeat;
      dy = (tr.pre_activation.array() > 0.0).select(dy, 0.0);
      const auto& taps = w.taps[static_cast<std::size_t>(l)];
      auto& tap_grads = grads.taps[static_cast<std::size_t>(l)];
      for (std::size_t k = 0; k < taps.size(); ++k) tap_grads[k] += tr.shifted[k].transpose() * dy;
      // S is symmetric, so the adjoint of X -> sum_k S^k X H_k accumulates
      // Horner style: S(...S(dy H_{K-1}^T) + dy H_k^T ...).
      Eigen::MatrixXd back = dy * taps.back().transpose();
      for (int k = static_cast<int>(taps.size()) - 2; k >= 0; --k)
        back = shift(l) * back + dy * taps[static_cast<std::size_t>(k)].transpose();
      dfeat = std::move(back);
    }
  }
  return loss;
}

AdamOptimizer::AdamOptimizer(const GnnWeights& shape, TrainHyper hyper)
    : hyper_(hyper), m_(shape), v_(shape) {
  hyper_.validate();
  m_.set_zero();
  v_.set_zero();
}

namespace {

void adam_update(Eigen::Ref<Eigen::MatrixXd> w, const Eigen::Ref<const Eigen::MatrixXd>& g,
                 Eigen::Ref<Eigen::MatrixXd> m, Eigen::Ref<Eigen::MatrixXd> v, int t,
                 const TrainHyper& h) {
  m = h.beta1 * m + (1.0 - h.beta1) * g;
  v = h.beta2 * v + (1.0 - h.beta2) * g.cwiseProduct(g);
  const double mc = 1.0 - std::pow(h.beta1, t);
  const double vc = 1.0 - std::pow(h.beta2, t);
  w -= (h.learning_rate * (m / mc).array() / ((v / vc).array().sqrt() + h.epsilon)).matrix();
}

}  // namespace

void AdamOptimizer::step(GnnWeights& w, const GnnWeights& grads) {
  ++t_;
  for (std::size_t l = 0; l < w.taps.size(); ++l) {
    for (std::size_t k = 0; k < w.taps[l].size(); ++k)
      adam_update(w.taps[l][k], grads.taps[l][k], m_.taps[l][k], v_.taps[l][k], t_, hyper_);
  }
  adam_update(w.readout_weight, grads.readout_weight, m_.readout_weight, v_.readout_weight, t_, hyper_);
  adam_update(w.readout_bias, grads.readout_bias, m_.readout_bias, v_.readout_bias, t_, hyper_);
}

TrainResult train(const GnnModel& model, const DiffusionDataset& train_set,
                  const DiffusionDataset& val_set, const TrainHyper& hyper) {
  hyper.validate();
  if (train_set.count() < 1) throw std::invalid_argument("empty training set");

  TrainResult result;
  result.weights = model.init_weights(model.config().seed);
  AdamOptimizer opt(result.weights, hyper);
  GnnWeights grads = model.zero_weights();

  const Rng root(hyper.seed);
  const int n = train_set.count();
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng rng = root.fork(static_cast<std::uint64_t>(epoch));
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    double epoch_loss = 0.0;
    for (int begin = 0; begin < n; begin += hyper.batch_size) {
      const int end = std::min(n, begin + hyper.batch_size);
      grads.set_zero();
      const double batch_loss = model.loss_and_gradients(result.weights, train_set.signals,
                                                         train_set.labels, order, begin, end, grads);
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("training diverged at epoch " + std::to_string(epoch));
      epoch_loss += batch_loss * (end - begin);
      opt.step(result.weights, grads);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / n;
    rec.val_error = val_set.count() > 0 ? evaluate(model, result.weights, val_set) : 0.0;
    result.history.push_back(rec);
  }
  return result;
}

double evaluate(const GnnModel& model, const GnnWeights& w, const DiffusionDataset& data) {
  if (data.count() < 1) throw std::invalid_argument("cannot evaluate on an empty dataset");
  int wrong = 0;
  for (int s = 0; s < data.count(); ++s) {
    const Eigen::VectorXd logits = model.forward(w, data.signals.col(s));
    int arg = 0;
    for (int c = 1; c < logits.size(); ++c) {
      if (logits[c] > logits[arg]) arg = c;
    }
    if (arg != data.labels[static_cast<std::size_t>(s)]) ++wrong;
  }
  return static_cast<double>(wrong) / data.count();
}

double mse_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
  if (pred.size() != target.size()) throw std::invalid_argument("mse operands must have equal length");
  if (pred.size() == 0) throw std::invalid_argument("mse needs at least one entry");
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

Eigen::VectorXd mse_loss_grad(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
  if (pred.size() != target.size()) throw std::invalid_argument("mse operands must have equal length");
  return 2.0 * (pred - target) / static_cast<double>(pred.size());
}

double cross_entropy_loss(const Eigen::VectorXd& logits, int label) {
  if (label < 0 || label >= logits.size()) throw std::invalid_argument("label out of range");
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return lse - logits[label];
}

}  // namespace gpool
