#include "cli_commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "gpool/gnn.hpp"
#include "gpool/io.hpp"
#include "gpool/metrics.hpp"
#include "gpool/rng.hpp"
#include "gpool/verify.hpp"

namespace gpool {
namespace {

namespace fs = std::filesystem;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("GRAPHON_POOL_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
  } else {
    write_text_file(out_path, text.back() == '\n' ? text : text + "\n");
  }
}

StepKernel load_kernel_csv(const std::string& path) {
  const Eigen::MatrixXd m = read_matrix_csv(path);
  if (m.rows() != m.cols()) throw std::runtime_error(path + ": kernel matrix must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::runtime_error(path + ": kernel matrix must be symmetric");
  return StepKernel{Partition::regular(static_cast<int>(m.rows())), m};
}

// ---------------------------------------------------------------------------
// pool

struct PoolOptions {
  std::string method = "m1";
  std::vector<int> sizes;
  std::string graphon;
  std::uint64_t seed = default_seed();
  double tol = Graphon::kDefaultTol;
  bool zero_diagonal = false;
  std::string out;
};

int cmd_pool(const PoolOptions& opt) {
  const Graphon w = parse_graphon_spec(opt.graphon);
  PoolingPlan plan = build_pooling_plan(w, parse_method(opt.method), opt.sizes, opt.seed, opt.tol);
  if (opt.zero_diagonal && plan.method == PoolingMethod::M3) {
    for (auto& layer : plan.layers) layer.adjacency.diagonal().setZero();
  }
  for (const std::string& warning : plan.warnings) std::cerr << "warning: " << warning << "\n";

  const bool csv_out = opt.out.empty() || opt.out.ends_with(".csv");
  if (csv_out) {
    emit(matrix_to_csv(plan.layers.back().adjacency), opt.out);
  } else {
    write_plan(opt.out, plan);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// filter

struct FilterOptions {
  std::string shift_csv;
  std::vector<double> coeffs;
  std::string signal_csv;
  std::string normalization = "raw";
  std::string out;
};

int cmd_filter(const FilterOptions& opt) {
  ShiftScaling scaling = ShiftScaling::Raw;
  if (opt.normalization == "graphon") scaling = ShiftScaling::Graphon;
  else if (opt.normalization == "spectral") scaling = ShiftScaling::Spectral;
  else if (opt.normalization != "raw")
    throw std::runtime_error("normalization must be graphon, spectral, or raw");
  const ShiftOperator s = ShiftOperator::from_adjacency(read_matrix_csv(opt.shift_csv), scaling);
  const Eigen::VectorXd x = read_vector_csv(opt.signal_csv);
  const Eigen::VectorXd y = apply_graph_filter(s, PolyFilter{opt.coeffs}, x);
  emit(matrix_to_csv(y), opt.out);
  return 0;
}

// ---------------------------------------------------------------------------
// cutnorm

struct CutNormOptions {
  std::string a_csv;
  std::string b_csv;
  bool exact = false;
  int heuristic_restarts = 0;
  std::uint64_t seed = default_seed();
  std::string out;
};

int cmd_cutnorm(const CutNormOptions& opt) {
  StepKernel kernel = load_kernel_csv(opt.a_csv);
  if (!opt.b_csv.empty()) kernel = kernel_diff(kernel, load_kernel_csv(opt.b_csv));

  CutNormResult result;
  if (opt.exact) result = cut_norm_exact(kernel);
  else if (opt.heuristic_restarts > 0)
    result = cut_norm_heuristic(kernel, opt.heuristic_restarts, opt.seed);
  else result = cut_norm(kernel, 32, opt.seed);

  nlohmann::json j;
  j["value"] = result.value;
  j["method"] = result.exact ? "exact" : "heuristic";
  j["row_set"] = result.row_set;
  j["col_set"] = result.col_set;
  j["blocks"] = kernel.size();
  emit(j.dump(2), opt.out);
  return 0;
}

// ---------------------------------------------------------------------------
// homdensity

struct HomOptions {
  std::string motif = "edge";
  std::string graph_csv;
  std::string out;
};

int cmd_homdensity(const HomOptions& opt) {
  Motif motif;
  if (opt.motif == "edge") motif = Motif::edge();
  else if (opt.motif == "triangle") motif = Motif::triangle();
  else if (opt.motif == "path3") motif = Motif::path3();
  else throw std::runtime_error("motif must be edge, triangle, or path3");
  const Eigen::MatrixXd a = read_matrix_csv(opt.graph_csv);
  nlohmann::json j;
  j["motif"] = opt.motif;
  j["density"] = hom_density_graph(motif, a);
  emit(j.dump(2), opt.out);
  return 0;
}

// ---------------------------------------------------------------------------
// spectrum

struct SpectrumOptions {
  std::string graph_csv;
  std::string graphon;
  std::string out;
};

int cmd_spectrum(const SpectrumOptions& opt) {
  if (opt.graph_csv.empty() == opt.graphon.empty())
    throw std::runtime_error("provide exactly one of --graph or --graphon");
  Graphon w = opt.graph_csv.empty() ? parse_graphon_spec(opt.graphon)
                                    : Graphon::induced(read_matrix_csv(opt.graph_csv));
  if (!w.is_step()) throw std::runtime_error("spectrum needs a step graphon (or a graph)");
  const GraphonSpectrum spec = spectrum_graphon(w);
  nlohmann::json j;
  j["eigenvalues"] = std::vector<double>(spec.eigenvalues.data(),
                                         spec.eigenvalues.data() + spec.eigenvalues.size());
  auto funcs = nlohmann::json::array();
  for (int c = 0; c < spec.eigenfunctions.cols(); ++c) {
    funcs.push_back(std::vector<double>(spec.eigenfunctions.col(c).data(),
                                        spec.eigenfunctions.col(c).data() +
                                            spec.eigenfunctions.rows()));
  }
  j["eigenfunctions"] = std::move(funcs);
  emit(j.dump(2), opt.out);
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::string theorem;
  std::string graphon = "exp:2.3";
  std::uint64_t seed = default_seed();
  int trials = 0;  // 0: per-check default
  int fine_n = 0;
  std::vector<int> sizes;
  int n = 0;
  int refine_factor = 4;
  double eps = 0.05;
  double drop = 0.1;
  int n_pool = 8;
  std::string out;
};

int cmd_verify(const VerifyOptions& opt) {
  const Graphon w = parse_graphon_spec(opt.graphon);
  BoundReport report;
  if (opt.theorem == "1") {
    report = check_theorem1(opt.trials > 0 ? opt.trials : 50, 30, 5, opt.seed);
  } else if (opt.theorem == "2") {
    const std::vector<int> sizes = opt.sizes.empty() ? std::vector<int>{4, 8, 16, 32} : opt.sizes;
    report = check_theorem2(w, sizes, opt.fine_n > 0 ? opt.fine_n : 64, 32, opt.seed);
  } else if (opt.theorem == "lemma1") {
    const int n = opt.n > 0 ? opt.n : 4;
    report = check_lemma1(w, n, opt.refine_factor, opt.fine_n > 0 ? opt.fine_n : 64, 64, opt.seed);
  } else if (opt.theorem == "3") {
    const std::vector<int> sizes = opt.sizes.empty() ? std::vector<int>{16, 32} : opt.sizes;
    report = check_theorem3(w, sizes, opt.trials > 0 ? opt.trials : 20,
                            opt.fine_n > 0 ? opt.fine_n : 256, opt.seed);
  } else if (opt.theorem == "4") {
    const std::vector<int> sizes = opt.sizes.empty() ? std::vector<int>{64, 32, 16} : opt.sizes;
    const PoolingPlan plan = build_pooling_plan(w, PoolingMethod::M1, sizes, opt.seed);
    report = check_theorem4(w, plan, opt.trials > 0 ? opt.trials : 10,
                            opt.fine_n > 0 ? opt.fine_n : 256, opt.seed);
  } else if (opt.theorem == "5") {
    report = check_theorem5(w, opt.eps, opt.n_pool, opt.trials > 0 ? opt.trials : 10,
                            opt.fine_n > 0 ? opt.fine_n : 256, opt.seed);
  } else if (opt.theorem == "6") {
    const int n = opt.n > 0 ? opt.n : 16;
    report = check_theorem6(w, n, opt.drop, flat_lipschitz_filter(1.0, 2),
                            opt.trials > 0 ? opt.trials : 10,
                            opt.fine_n > 0 ? opt.fine_n : 256, opt.seed);
  } else {
    throw std::runtime_error("theorem must be 1..6 or lemma1");
  }
  const std::string text = report.to_json().dump(2);
  if (!opt.out.empty()) write_text_file(opt.out, text + "\n");
  std::cout << report.check_id << ": " << (report.pass() ? "pass" : "FAIL") << " ("
            << report.passed << "/" << report.passed + report.failed << " trials)\n";
  if (opt.out.empty()) std::cout << text << "\n";
  return report.pass() ? 0 : 2;
}

// ---------------------------------------------------------------------------
// sourceloc

struct SourcelocOptions {
  std::string graphon = "exp:2.3";
  std::string method = "m1";
  std::vector<int> sizes = {100, 50, 25};
  int features = 8;
  int taps = 5;
  int classes = 10;
  int t_max = 25;
  int train_samples = 1000;
  int val_samples = 240;
  int test_samples = 200;
  int epochs = 300;
  int batch = 20;
  double lr = 5e-4;
  int realizations = 1;
  int jobs = 1;
  std::uint64_t seed = default_seed();
  bool mini = false;
  bool dry_run = false;
  std::string out = "sourceloc_out";
};

nlohmann::json sourceloc_config_json(const SourcelocOptions& o) {
  nlohmann::json j;
  j["graphon"] = o.graphon;
  j["method"] = o.method;
  j["sizes"] = o.sizes;
  j["features"] = o.features;
  j["taps"] = o.taps;
  j["classes"] = o.classes;
  j["t_max"] = o.t_max;
  j["train_samples"] = o.train_samples;
  j["val_samples"] = o.val_samples;
  j["test_samples"] = o.test_samples;
  j["epochs"] = o.epochs;
  j["batch"] = o.batch;
  j["learning_rate"] = o.lr;
  j["realizations"] = o.realizations;
  j["seed"] = o.seed;
  return j;
}

struct RealizationResult {
  int index = 0;
  double test_error = 0.0;
  std::string metrics_file;
};

RealizationResult run_realization(const SourcelocOptions& opt, const PoolingPlan& plan, int r,
                                  const fs::path& out_dir) {
  const Rng stream = Rng(opt.seed).fork(static_cast<std::uint64_t>(r));
  const std::uint64_t data_seed = stream.fork(0).next_u64();
  const std::uint64_t init_seed = stream.fork(1).next_u64();
  const std::uint64_t train_seed = stream.fork(2).next_u64();

  const int total = opt.train_samples + opt.val_samples + opt.test_samples;
  const DiffusionDataset all =
      make_diffusion_dataset(plan.layers.front().adjacency, total, opt.classes, opt.t_max, data_seed);
  const DiffusionDataset train_set = dataset_slice(all, 0, opt.train_samples);
  const DiffusionDataset val_set = dataset_slice(all, opt.train_samples, opt.val_samples);
  const DiffusionDataset test_set =
      dataset_slice(all, opt.train_samples + opt.val_samples, opt.test_samples);

  GnnConfig cfg;
  cfg.plan = plan;
  cfg.features.assign(plan.sizes.size(), opt.features);
  cfg.features.front() = 1;
  cfg.taps.assign(plan.sizes.size() - 1, opt.taps);
  cfg.classes = opt.classes;
  cfg.seed = init_seed;
  const GnnModel model(cfg);

  TrainHyper hyper;
  hyper.learning_rate = opt.lr;
  hyper.batch_size = opt.batch;
  hyper.epochs = opt.epochs;
  hyper.seed = train_seed;
  const TrainResult trained = train(model, train_set, val_set, hyper);

  RealizationResult result;
  result.index = r;
  result.test_error = evaluate(model, trained.weights, test_set);

  std::string metrics;
  for (const EpochRecord& rec : trained.history) {
    metrics += "{\"epoch\":" + std::to_string(rec.epoch) +
               ",\"train_loss\":" + format_double(rec.train_loss) +
               ",\"val_error\":" + format_double(rec.val_error) + "}\n";
  }
  const std::string tag = "r" + std::to_string(r);
  result.metrics_file = "metrics_" + tag + ".jsonl";
  write_text_file((out_dir / result.metrics_file).string(), metrics);
  write_weights((out_dir / ("weights_" + tag + ".bin")).string(),
                (out_dir / ("weights_" + tag + ".json")).string(), trained.weights);

  nlohmann::json rj;
  rj["realization"] = r;
  rj["data_seed"] = data_seed;
  rj["init_seed"] = init_seed;
  rj["train_seed"] = train_seed;
  rj["test_error"] = result.test_error;
  rj["source_nodes"] = all.source_nodes;
  write_text_file((out_dir / ("result_" + tag + ".json")).string(), rj.dump(2) + "\n");
  return result;
}

int cmd_sourceloc(SourcelocOptions opt) {
  std::string stage = "config";
  try {
    if (opt.mini) {
      opt.train_samples = 500;
      opt.val_samples = 120;
      opt.test_samples = 100;
      opt.epochs = 60;
      if (opt.realizations == 1) opt.realizations = 3;
    }
    const fs::path out_dir(opt.out);
    fs::create_directories(out_dir);
    const nlohmann::json cfg = sourceloc_config_json(opt);
    write_text_file((out_dir / "config.json").string(), cfg.dump(2) + "\n");

    stage = "plan";
    const Graphon w = parse_graphon_spec(opt.graphon);
    const PoolingPlan plan =
        build_pooling_plan(w, parse_method(opt.method), opt.sizes, opt.seed);
    for (const std::string& warning : plan.warnings) std::cerr << "warning: " << warning << "\n";
    write_plan((out_dir / "plan.json").string(), plan);

    std::vector<std::string> artifacts{"config.json", "plan.json"};
    for (int l = 0; l < plan.layer_count(); ++l)
      artifacts.push_back("plan_layer" + std::to_string(l) + ".csv");

    std::vector<RealizationResult> results(static_cast<std::size_t>(opt.realizations));
    if (!opt.dry_run) {
      stage = "train";
      std::mutex mu;
      int next = 0;
      std::exception_ptr error;
      const int workers = std::max(1, std::min(opt.jobs, opt.realizations));
      auto worker = [&]() {
        for (;;) {
          int r;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= opt.realizations || error) return;
            r = next++;
          }
          try {
            RealizationResult res = run_realization(opt, plan, r, out_dir);
            std::lock_guard<std::mutex> lock(mu);
            results[static_cast<std::size_t>(r)] = std::move(res);
          } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!error) error = std::current_exception();
            return;
          }
        }
      };
      if (workers == 1) {
        worker();
      } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
      }
      if (error) std::rethrow_exception(error);

      stage = "summary";
      double mean = 0.0;
      for (const auto& r : results) mean += r.test_error;
      mean /= opt.realizations;
      double var = 0.0;
      for (const auto& r : results) var += (r.test_error - mean) * (r.test_error - mean);
      const double stddev = opt.realizations > 1 ? std::sqrt(var / (opt.realizations - 1)) : 0.0;

      nlohmann::json summary;
      summary["realizations"] = opt.realizations;
      summary["mean_test_error_pct"] = 100.0 * mean;
      summary["std_test_error_pct"] = 100.0 * stddev;
      auto per = nlohmann::json::array();
      for (const auto& r : results) per.push_back(100.0 * r.test_error);
      summary["per_realization_test_error_pct"] = std::move(per);
      write_text_file((out_dir / "summary.json").string(), summary.dump(2) + "\n");
      artifacts.push_back("summary.json");
      for (const auto& r : results) {
        const std::string tag = "r" + std::to_string(r.index);
        artifacts.push_back(r.metrics_file);
        artifacts.push_back("weights_" + tag + ".bin");
        artifacts.push_back("weights_" + tag + ".json");
        artifacts.push_back("result_" + tag + ".json");
      }

      char line[256];
      std::snprintf(line, sizeof(line), "%s %s sizes=", opt.method.c_str(), opt.graphon.c_str());
      std::string sizes_text;
      for (std::size_t i = 0; i < opt.sizes.size(); ++i)
        sizes_text += (i ? "," : "") + std::to_string(opt.sizes[i]);
      std::snprintf(line, sizeof(line), "%s %s sizes=%s  test error %% = %.2f +/- %.2f  (%d realizations)",
                    opt.method.c_str(), opt.graphon.c_str(), sizes_text.c_str(), 100.0 * mean,
                    100.0 * stddev, opt.realizations);
      std::cout << line << "\n";
    }

    stage = "manifest";
    nlohmann::json manifest;
    manifest["config_hash"] = hex64(fnv1a64(cfg.dump()));
    manifest["artifacts"] = artifacts;
    write_text_file((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    err["stage"] = stage;
    std::cerr << err.dump() << "\n";
    return 1;
  }
}

}  // namespace

int run_cli(std::vector<std::string> args) {
  CLI::App app{"graphon pooling toolkit"};
  app.require_subcommand(1);

  PoolOptions pool_opt;
  CLI::App* pool = app.add_subcommand("pool", "discretize a graphon into layer graphs");
  pool->add_option("--method", pool_opt.method, "m1 | m2 | m3");
  pool->add_option("--sizes", pool_opt.sizes, "layer sizes, e.g. 100,50,25")
      ->required()
      ->delimiter(',');
  pool->add_option("--graphon", pool_opt.graphon, "graphon spec")->required();
  pool->add_option("--seed", pool_opt.seed, "generator seed");
  pool->add_option("--tol", pool_opt.tol, "quadrature tolerance");
  pool->add_flag("--zero-diagonal", pool_opt.zero_diagonal, "zero the M3 diagonal");
  pool->add_option("--out", pool_opt.out, "output: .csv (last layer) or plan .json");

  FilterOptions filter_opt;
  CLI::App* filter = app.add_subcommand("filter", "apply a polynomial graph filter");
  filter->add_option("--shift", filter_opt.shift_csv, "shift operator CSV")->required();
  filter->add_option("--coeffs", filter_opt.coeffs, "filter taps h0,h1,...")
      ->required()
      ->delimiter(',');
  filter->add_option("--signal", filter_opt.signal_csv, "input signal CSV")->required();
  filter->add_option("--normalization", filter_opt.normalization, "graphon | spectral | raw");
  filter->add_option("--out", filter_opt.out, "output CSV (stdout otherwise)");

  CutNormOptions cut_opt;
  CLI::App* cut = app.add_subcommand("cutnorm", "cut norm of a step kernel (or a difference)");
  cut->add_option("--a", cut_opt.a_csv, "kernel CSV")->required();
  cut->add_option("--b", cut_opt.b_csv, "second kernel CSV; the difference a-b is measured");
  cut->add_flag("--exact", cut_opt.exact, "force exact enumeration (<= 20 blocks)");
  cut->add_option("--heuristic", cut_opt.heuristic_restarts, "force heuristic with N restarts");
  cut->add_option("--seed", cut_opt.seed, "heuristic restart seed");
  cut->add_option("--out", cut_opt.out, "output JSON (stdout otherwise)");

  HomOptions hom_opt;
  CLI::App* hom = app.add_subcommand("homdensity", "weighted homomorphism density");
  hom->add_option("--motif", hom_opt.motif, "edge | triangle | path3");
  hom->add_option("--graph", hom_opt.graph_csv, "adjacency CSV")->required();
  hom->add_option("--out", hom_opt.out, "output JSON (stdout otherwise)");

  SpectrumOptions spec_opt;
  CLI::App* spec = app.add_subcommand("spectrum", "shift-operator eigenpairs of a step graphon");
  spec->add_option("--graph", spec_opt.graph_csv, "adjacency CSV");
  spec->add_option("--graphon", spec_opt.graphon, "graphon spec (step only)");
  spec->add_option("--out", spec_opt.out, "output JSON (stdout otherwise)");

  VerifyOptions verify_opt;
  CLI::App* verify = app.add_subcommand("verify", "numeric theorem checks");
  verify->add_option("--theorem", verify_opt.theorem, "1..6 or lemma1")->required();
  verify->add_option("--graphon", verify_opt.graphon, "graphon spec");
  verify->add_option("--seed", verify_opt.seed, "trial seed");
  verify->add_option("--trials", verify_opt.trials, "trial count (0: default)");
  verify->add_option("--fine", verify_opt.fine_n, "fine proxy resolution (0: default)");
  verify->add_option("--sizes", verify_opt.sizes, "pooled sizes")->delimiter(',');
  verify->add_option("--n", verify_opt.n, "pooled size (theorem 6 / lemma1)");
  verify->add_option("--refine-factor", verify_opt.refine_factor, "lemma1 refinement factor");
  verify->add_option("--eps", verify_opt.eps, "theorem-5 estimate distance");
  verify->add_option("--drop", verify_opt.drop, "theorem-6 drop fraction");
  verify->add_option("--n-pool", verify_opt.n_pool, "theorem-5 pooled size");
  verify->add_option("--out", verify_opt.out, "report JSON path");

  SourcelocOptions src_opt;
  CLI::App* src = app.add_subcommand("sourceloc", "diffusion source-localization experiment");
  src->add_option("--graphon", src_opt.graphon, "graphon spec");
  src->add_option("--method", src_opt.method, "m1 | m2 | m3");
  src->add_option("--sizes", src_opt.sizes, "layer sizes")->delimiter(',');
  src->add_option("--features", src_opt.features, "features per layer");
  src->add_option("--taps", src_opt.taps, "filter taps per layer");
  src->add_option("--classes", src_opt.classes, "source classes");
  src->add_option("--t-max", src_opt.t_max, "max diffusion steps");
  src->add_option("--samples", src_opt.train_samples, "training samples");
  src->add_option("--val-samples", src_opt.val_samples, "validation samples");
  src->add_option("--test-samples", src_opt.test_samples, "test samples");
  src->add_option("--epochs", src_opt.epochs, "training epochs");
  src->add_option("--batch", src_opt.batch, "batch size");
  src->add_option("--lr", src_opt.lr, "learning rate");
  src->add_option("--realizations", src_opt.realizations, "independent seeds");
  src->add_option("--jobs", src_opt.jobs, "concurrent realizations");
  src->add_option("--seed", src_opt.seed, "base seed");
  src->add_flag("--mini", src_opt.mini, "desk-scale preset (500 samples, 60 epochs, 3 seeds)");
  src->add_flag("--dry-run", src_opt.dry_run, "validate and write the plan, no training");
  src->add_option("--out", src_opt.out, "output directory");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (pool->parsed()) return cmd_pool(pool_opt);
    if (filter->parsed()) return cmd_filter(filter_opt);
    if (cut->parsed()) return cmd_cutnorm(cut_opt);
    if (hom->parsed()) return cmd_homdensity(hom_opt);
    if (spec->parsed()) return cmd_spectrum(spec_opt);
    if (verify->parsed()) return cmd_verify(verify_opt);
    if (src->parsed()) return cmd_sourceloc(src_opt);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace gpool
