#include <doctest.h>

#include <cmath>

#include "gpool/verify.hpp"

using namespace gpool;

namespace {

Graphon constant_graphon(double c) {
  Eigen::MatrixXd v(1, 1);
  v << c;
  return Graphon::induced(v);
}

}  // namespace

TEST_CASE("theorem 1 check") {
  const BoundReport r = check_theorem1(5, 12, 4, 42);
  CHECK(r.pass());
  CHECK(r.trials.size() == 5);
  for (const auto& t : r.trials) CHECK(t.at("residual").get<double>() <= 1e-9);
  // Regenerable from the seed.
  CHECK(r.to_json() == check_theorem1(5, 12, 4, 42).to_json());
}

TEST_CASE("theorem 2 check") {
  const BoundReport r = check_theorem2(Graphon::exponential(2.3), {4, 8}, 16, 16, 1);
  CHECK(r.pass());
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& t : r.trials) {
    const double est = t.at("estimate").get<double>();
    CHECK(est <= t.at("bound").get<double>());
    CHECK(est <= prev + 1e-12);
    prev = est;
  }

  // A constant graphon is reproduced exactly at every size.
  const BoundReport c = check_theorem2(constant_graphon(0.4), {2, 4}, 8, 8, 1);
  CHECK(c.pass());
  for (const auto& t : c.trials) CHECK(t.at("estimate").get<double>() <= 1e-13);

  CHECK_THROWS_AS(check_theorem2(Graphon::bilinear(), {1, 2}, 8, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(check_theorem2(Graphon::bilinear(), {3, 5}, 8, 8, 1), std::invalid_argument);
}

TEST_CASE("lemma 1 check") {
  const BoundReport c = check_lemma1(constant_graphon(0.6), 2, 2, 8, 16, 3);
  CHECK(c.pass());
  CHECK(c.trials[0].at("refined_cut_norm").get<double>() <= 1e-13);
  CHECK(c.trials[0].at("proxy_cut_norm").get<double>() <= 1e-13);

  const BoundReport b = check_lemma1(Graphon::bilinear(), 4, 4, 64, 32, 3);
  CHECK(b.pass());
  CHECK(b.trials[0].at("gap").get<double>() >= -1e-9);

  // A step graphon pooled at its own resolution: both sides vanish.
  Eigen::MatrixXd v(4, 4);
  v.setConstant(0.25);
  v.diagonal().setConstant(0.75);
  const BoundReport s = check_lemma1(Graphon::step(Partition::regular(4), v), 4, 2, 8, 16, 3);
  CHECK(s.pass());
  CHECK(s.trials[0].at("proxy_cut_norm").get<double>() <= 1e-13);
}

TEST_CASE("filtered kernel values") {
  // The zero filter maps every operator to zero.
  Eigen::MatrixXd v(3, 3);
  v.setConstant(0.5);
  const StepKernel k{Partition::regular(3), v};
  CHECK(filtered_kernel_values(k, PolyFilter{{0.0, 0.0, 0.0}}).cwiseAbs().maxCoeff() <= 1e-15);
  // h(t) = t returns the kernel itself.
  CHECK((filtered_kernel_values(k, PolyFilter{{0.0, 1.0}}) - v).cwiseAbs().maxCoeff() <= 1e-12);
  // The constant term never reaches the kernel.
  CHECK((filtered_kernel_values(k, PolyFilter{{5.0, 1.0}}) - v).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("theorem 3 check") {
  const BoundReport r = check_theorem3(Graphon::exponential(2.3), {8}, 3, 32, 7);
  CHECK(r.pass());
  for (const auto& t : r.trials) {
    CHECK(t.at("gamma").get<double>() >= 1.0);
    CHECK(t.at("lhs").get<double>() <= t.at("rhs").get<double>() + 1e-12);
  }
  CHECK(r.to_json() == check_theorem3(Graphon::exponential(2.3), {8}, 3, 32, 7).to_json());

  // Pooling a step graphon at its own resolution gives lhs = rhs = 0.
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(8, 8, 0.3);
  const Graphon step = Graphon::step(Partition::regular(8), v);
  const BoundReport zero = check_theorem3(step, {8}, 2, 32, 7);
  CHECK(zero.pass());
  for (const auto& t : zero.trials) CHECK(t.at("lhs").get<double>() <= 1e-12);
}

TEST_CASE("cascade basics") {
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(4, 4, 0.5);
  const StepKernel k{Partition::regular(4), v};
  const std::vector<StepKernel> kernels{k, k};
  const std::vector<PolyFilter> filters{PolyFilter{{0.0, 1.0}}, PolyFilter{{0.0, 1.0}}};
  const GraphonSignal zero{Partition::regular(4), Eigen::VectorXd::Zero(4)};
  CHECK(gphon_nn_cascade(kernels, filters, zero).values.cwiseAbs().maxCoeff() == 0.0);

  const GraphonSignal ones{Partition::regular(4), Eigen::VectorXd::Ones(4)};
  // Each layer: relu(T ones) = 0.5 * previous.
  const GraphonSignal out = gphon_nn_cascade(kernels, filters, ones);
  CHECK(out.values[0] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("theorem 4 check") {
  const Graphon w = Graphon::exponential(2.3);
  const PoolingPlan plan = build_pooling_plan(w, PoolingMethod::M1, {16, 8}, 5);
  const BoundReport r = check_theorem4(w, plan, 2, 32, 5);
  CHECK(r.pass());
  CHECK(r.to_json() == check_theorem4(w, plan, 2, 32, 5).to_json());
}

TEST_CASE("theorem 5 check") {
  const Graphon w = Graphon::exponential(2.3);
  const BoundReport zero_eps = check_theorem5(w, 0.0, 4, 2, 32, 9);
  CHECK(zero_eps.pass());
  for (const auto& t : zero_eps.trials) CHECK(t.at("cut_norm").get<double>() <= 1e-13);

  const BoundReport r = check_theorem5(w, 0.05, 4, 2, 32, 9);
  CHECK(r.pass());
  for (const auto& t : r.trials) {
    CHECK(t.at("measured_eps")[0].get<double>() <= 0.05);
    CHECK(t.at("cut_norm").get<double>() <= 32.0 * 0.05);
  }
}

TEST_CASE("theorem 6 check") {
  const Graphon w = Graphon::exponential(2.3);
  const PolyFilter f = flat_lipschitz_filter(1.0, 2);

  const BoundReport none = check_theorem6(w, 8, 0.0, f, 2, 32, 11);
  CHECK(none.pass());
  for (const auto& t : none.trials) CHECK(t.at("t0_norm").get<double>() == 0.0);

  const BoundReport all = check_theorem6(w, 8, 1.0, f, 2, 32, 11);
  CHECK(all.pass());

  const BoundReport some = check_theorem6(w, 8, 0.25, f, 3, 32, 11);
  CHECK(some.pass());
  for (const auto& t : some.trials) CHECK(t.at("margin_triangle").get<double>() >= -1e-9);
  CHECK(some.to_json() == check_theorem6(w, 8, 0.25, f, 3, 32, 11).to_json());
}
