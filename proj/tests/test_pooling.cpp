#include <doctest.h>

#include <cmath>

#include "gpool/pooling.hpp"
#include "gpool/rng.hpp"

using namespace gpool;

namespace {

Eigen::MatrixXd random_symmetric01(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      a(i, j) = rng.next_double();
      a(j, i) = a(i, j);
    }
  }
  return a;
}

// Brute-force block average of a kn x kn matrix down to n x n.
Eigen::MatrixXd block_average_oracle(const Eigen::MatrixXd& a, int n) {
  const int k = static_cast<int>(a.rows()) / n;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int p = 0; p < k; ++p) {
        for (int q = 0; q < k; ++q) out(i, j) += a(i * k + p, j * k + q);
      }
      out(i, j) /= k * k;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("regular partitions") {
  CHECK(regular_partition(2).breakpoints() == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(regular_partition(1).breakpoints() == std::vector<double>{0.0, 1.0});
  const Eigen::VectorXd mids = regular_partition(4).midpoints();
  CHECK(mids[0] == doctest::Approx(0.125));
  CHECK(mids[1] == doctest::Approx(0.375));
  CHECK(mids[2] == doctest::Approx(0.625));
  CHECK(mids[3] == doctest::Approx(0.875));
}

TEST_CASE("random partitions") {
  CHECK(random_partition(1, 99).breakpoints() == std::vector<double>{0.0, 1.0});
  CHECK(random_partition(5, 7).breakpoints() == random_partition(5, 7).breakpoints());
  const Partition p = random_partition(16, 7);
  CHECK(p.size() == 16);
  CHECK(p.breakpoints().front() == 0.0);
  CHECK(p.breakpoints().back() == 1.0);
  CHECK(std::is_sorted(p.breakpoints().begin(), p.breakpoints().end()));
  CHECK(p.measures().sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sample points") {
  const SamplePoints one = sample_points(1, 3);
  CHECK(one.size() == 1);
  CHECK(one.points[0] >= 0.0);
  CHECK(one.points[0] <= 1.0);
  CHECK(sample_points(10, 3).points == sample_points(10, 3).points);
  const SamplePoints pts = sample_points(10, 3);
  for (std::size_t i = 0; i + 1 < pts.points.size(); ++i) CHECK(pts.points[i] < pts.points[i + 1]);
  CHECK_THROWS_AS(sample_points(0, 1), std::domain_error);
  CHECK_THROWS_AS(SamplePoints::from_points({0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("pool_m1 on the bilinear graphon") {
  const Eigen::MatrixXd a = pool_m1(Graphon::bilinear(), 2);
  // Symbolic: A(0,0) = 4 (1/8)^2, A(0,1) = 4 (1/8)(3/8), A(1,1) = 4 (3/8)^2.
  CHECK(a(0, 0) == doctest::Approx(1.0 / 16).epsilon(1e-12));
  CHECK(a(0, 1) == doctest::Approx(3.0 / 16).epsilon(1e-12));
  CHECK(a(1, 0) == doctest::Approx(3.0 / 16).epsilon(1e-12));
  CHECK(a(1, 1) == doctest::Approx(9.0 / 16).epsilon(1e-12));
  CHECK_THROWS_AS(pool_m1(Graphon::bilinear(), 0), std::domain_error);
}

TEST_CASE("pool_m1 reproduces constants") {
  Eigen::MatrixXd c(1, 1);
  c << 0.42;
  const Graphon g = Graphon::induced(c);
  for (int n : {1, 3, 7}) {
    const Eigen::MatrixXd a = pool_m1(g, n);
    CHECK(a.minCoeff() == doctest::Approx(0.42).epsilon(1e-14));
    CHECK(a.maxCoeff() == doctest::Approx(0.42).epsilon(1e-14));
  }
}

TEST_CASE("pool_m1 on a step graphon is the exact block average") {
  const Eigen::MatrixXd v = random_symmetric01(4, 21);
  const Eigen::MatrixXd pooled = pool_m1(Graphon::induced(v), 2);
  const Eigen::MatrixXd oracle = block_average_oracle(v, 2);
  CHECK((pooled - oracle).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("pool_m2 equals pool_m1 on the regular partition") {
  const Graphon g = Graphon::exponential(2.3);
  const Eigen::MatrixXd m1 = pool_m1(g, 4);
  const Eigen::MatrixXd m2 = pool_m2(g, regular_partition(4));
  CHECK((m1 - m2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("pool_m2 on an irregular partition") {
  const Partition p = Partition::from_breakpoints({0.0, 0.25, 1.0});
  const Eigen::MatrixXd a = pool_m2(Graphon::bilinear(), p);
  // Products of interval means: int_0^{1/4} x = 1/32, int_{1/4}^1 x = 15/32.
  CHECK(a(0, 0) == doctest::Approx(1.0 / 64).epsilon(1e-12));
  CHECK(a(0, 1) == doctest::Approx(5.0 / 64).epsilon(1e-12));
  CHECK(a(1, 1) == doctest::Approx(25.0 / 64).epsilon(1e-12));

  Eigen::MatrixXd c(1, 1);
  c << 0.3;
  const Eigen::MatrixXd constant = pool_m2(Graphon::induced(c), p);
  CHECK(constant.minCoeff() == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(constant.maxCoeff() == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("pool_m3 samples pointwise") {
  const Eigen::MatrixXd a = pool_m3(Graphon::bilinear(), SamplePoints::from_points({0.5, 1.0}));
  CHECK(a(0, 0) == 0.25);
  CHECK(a(0, 1) == 0.5);
  CHECK(a(1, 0) == 0.5);
  CHECK(a(1, 1) == 1.0);

  const Eigen::MatrixXd b = pool_m3(Graphon::absolute(), SamplePoints::from_points({0.2, 0.7}));
  CHECK(b(0, 0) == 0.0);
  CHECK(b(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b(1, 1) == 0.0);

  Eigen::MatrixXd c(1, 1);
  c << 0.8;
  const Eigen::MatrixXd cc = pool_m3(Graphon::induced(c), sample_points(5, 4));
  CHECK(cc.minCoeff() == 0.8);
  CHECK(cc.maxCoeff() == 0.8);

  const Eigen::MatrixXd z = pool_m3(Graphon::bilinear(), SamplePoints::from_points({0.5, 1.0}), true);
  CHECK(z(0, 0) == 0.0);
  CHECK(z(1, 1) == 0.0);
  CHECK(z(0, 1) == 0.5);
}

TEST_CASE("M1 and M2 stay symmetric with entries in [0,1]") {
  const Graphon families[] = {Graphon::exponential(2.3), Graphon::bilinear(),
                              Graphon::polynomial(), Graphon::logmax(), Graphon::absolute()};
  for (const Graphon& g : families) {
    for (int n : {1, 2, 3, 5, 8}) {
      const Eigen::MatrixXd a = pool_m1(g, n, 1e-8);
      CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(a.minCoeff() >= 0.0);
      CHECK(a.maxCoeff() <= 1.0);
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Eigen::MatrixXd b = pool_m2(g, random_partition(n, seed), 1e-8);
        CHECK((b - b.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(b.minCoeff() >= 0.0);
        CHECK(b.maxCoeff() <= 1.0);
      }
    }
  }
  const Eigen::MatrixXd big = pool_m1(Graphon::exponential(2.3), 64, 1e-8);
  CHECK((big - big.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(big.minCoeff() >= 0.0);
  CHECK(big.maxCoeff() <= 1.0);
}

TEST_CASE("nested M1 pooling composes") {
  const Graphon g = Graphon::exponential(2.3);
  const Eigen::MatrixXd direct = pool_m1(g, 4);
  const Eigen::MatrixXd nested = pool_m1(Graphon::induced(pool_m1(g, 8)), 4);
  CHECK((direct - nested).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("interval interpolation") {
  Eigen::VectorXd fine(4);
  fine << 1, 2, 3, 4;
  const GraphonSignal x{regular_partition(4), fine};
  const GraphonSignal coarse = interpolate_signal_intervals(x, regular_partition(2));
  CHECK(coarse.values[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(coarse.values[1] == doctest::Approx(3.5).epsilon(1e-15));

  // Constants survive interpolation.
  const GraphonSignal c{regular_partition(4), Eigen::VectorXd::Constant(4, 2.5)};
  const GraphonSignal cc = interpolate_signal_intervals(c, random_partition(3, 5));
  for (int i = 0; i < 3; ++i) CHECK(cc.values[i] == doctest::Approx(2.5).epsilon(1e-15));

  // Identical partitions: the midpoint tie rule returns the value itself.
  const GraphonSignal same = interpolate_signal_intervals(x, regular_partition(4));
  CHECK((same.values - fine).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("point interpolation") {
  Eigen::VectorXd vals(2);
  vals << 0, 10;
  const SamplePoints fine = SamplePoints::from_points({0.1, 0.9});
  CHECK(interpolate_signal_points(vals, fine, SamplePoints::from_points({0.5}))[0] == 5.0);
  CHECK(interpolate_signal_points(vals, fine, SamplePoints::from_points({0.05}))[0] == 0.0);
  CHECK(interpolate_signal_points(vals, fine, SamplePoints::from_points({0.95}))[0] == 10.0);
  const Eigen::VectorXd same = interpolate_signal_points(vals, fine, fine);
  CHECK(same[0] == 0.0);
  CHECK(same[1] == 10.0);
}

TEST_CASE("interpolation is monotone on nonnegative signals") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v(8);
    for (int i = 0; i < 8; ++i) v[i] = rng.next_double();
    const GraphonSignal out =
        interpolate_signal_intervals({regular_partition(8), v}, random_partition(3, trial));
    CHECK(out.values.minCoeff() >= 0.0);
  }
}

TEST_CASE("pooling plans") {
  const Graphon g = Graphon::exponential(2.3);
  const PoolingPlan plan = build_pooling_plan(g, PoolingMethod::M1, {16, 8, 4}, 42);
  CHECK(plan.layer_count() == 3);
  CHECK(plan.layers[0].adjacency.rows() == 16);
  CHECK(plan.layers[1].adjacency.rows() == 8);
  CHECK(plan.layers[2].adjacency.rows() == 4);
  CHECK(plan.layers[0].partition.refines(plan.layers[1].partition));
  CHECK(plan.layers[1].partition.refines(plan.layers[2].partition));
  CHECK(plan.warnings.empty());

  // Bit-identical regeneration.
  const PoolingPlan again = build_pooling_plan(g, PoolingMethod::M1, {16, 8, 4}, 42);
  for (int l = 0; l < 3; ++l)
    CHECK(plan.layers[l].adjacency == again.layers[l].adjacency);

  const PoolingPlan warned = build_pooling_plan(g, PoolingMethod::M1, {6, 4}, 1);
  CHECK(warned.warnings.size() == 1);

  CHECK_THROWS_AS(build_pooling_plan(g, PoolingMethod::M1, {8, 8}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_pooling_plan(g, PoolingMethod::M1, {}, 1), std::invalid_argument);
}

TEST_CASE("plan layer-2 of a step graphon is the block average") {
  const Eigen::MatrixXd v = random_symmetric01(4, 8);
  const PoolingPlan plan = build_pooling_plan(Graphon::induced(v), PoolingMethod::M1, {4, 2}, 0);
  CHECK((plan.layers[0].adjacency - v).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((plan.layers[1].adjacency - block_average_oracle(v, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("M2 and M3 plans are deterministic with independent layers") {
  const Graphon g = Graphon::bilinear();
  const PoolingPlan m2a = build_pooling_plan(g, PoolingMethod::M2, {6, 3}, 9);
  const PoolingPlan m2b = build_pooling_plan(g, PoolingMethod::M2, {6, 3}, 9);
  CHECK(m2a.layers[0].partition == m2b.layers[0].partition);
  CHECK(m2a.layers[1].partition == m2b.layers[1].partition);
  CHECK(m2a.layers[0].adjacency == m2b.layers[0].adjacency);

  const PoolingPlan m3 = build_pooling_plan(g, PoolingMethod::M3, {6, 3}, 9);
  CHECK(m3.layers[0].points.size() == 6);
  CHECK(m3.layers[1].points.size() == 3);
  const Eigen::MatrixXd p = interpolation_matrix(m3, 0);
  CHECK(p.rows() == 3);
  CHECK(p.cols() == 6);
  // Each output mixes at most two inputs with total weight one.
  for (int r = 0; r < 3; ++r) CHECK(p.row(r).sum() == doctest::Approx(1.0).epsilon(1e-15));
}
