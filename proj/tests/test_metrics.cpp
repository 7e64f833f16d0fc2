#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gpool/metrics.hpp"
#include "gpool/rng.hpp"

using namespace gpool;

namespace {

StepKernel random_kernel(int n, Rng& rng, bool nonnegative) {
  Eigen::MatrixXd v(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      v(i, j) = nonnegative ? rng.next_double() : rng.uniform(-1.0, 1.0);
      v(j, i) = v(i, j);
    }
  }
  return StepKernel{Partition::regular(n), v};
}

// Independent oracle: enumerate every (S,T) subset pair directly.
double cut_norm_pair_oracle(const StepKernel& k) {
  const int n = k.size();
  const Eigen::VectorXd mu = k.partition.measures();
  double best = 0.0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    for (std::uint32_t t = 0; t < (1u << n); ++t) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!(s & (1u << i))) continue;
        for (int j = 0; j < n; ++j) {
          if (t & (1u << j)) acc += k.values(i, j) * mu[i] * mu[j];
        }
      }
      best = std::max(best, std::abs(acc));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("common refinement differences") {
  Eigen::MatrixXd v(2, 2);
  v << 0.2, 0.6, 0.6, 0.8;
  const Graphon w = Graphon::step(Partition::regular(2), v);
  const StepKernel zero = common_refinement_diff(w, w);
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);

  const StepKernel d = common_refinement_diff(w, Graphon::induced(Eigen::MatrixXd::Identity(4, 4)));
  CHECK(d.partition.size() == 4);
  CHECK(d.values(0, 0) == doctest::Approx(0.2 - 1.0));
  CHECK(d.values(0, 1) == doctest::Approx(0.2));

  Eigen::MatrixXd one(1, 1), quarter(1, 1);
  one << 1.0;
  quarter << 0.25;
  const StepKernel s = common_refinement_diff(Graphon::induced(one), Graphon::induced(quarter));
  CHECK(s.values(0, 0) == doctest::Approx(0.75));
}

TEST_CASE("exact cut norm on small kernels") {
  Eigen::MatrixXd offdiag(2, 2);
  offdiag << 0, 1, 1, 0;
  const CutNormResult r1 = cut_norm_exact(StepKernel{Partition::regular(2), offdiag});
  CHECK(r1.value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r1.exact);
  CHECK(r1.row_set == std::vector<int>{0, 1});
  CHECK(r1.col_set == std::vector<int>{0, 1});

  Eigen::MatrixXd signed_k(2, 2);
  signed_k << 1, -1, -1, 1;
  const CutNormResult r2 = cut_norm_exact(StepKernel{Partition::regular(2), signed_k});
  CHECK(r2.value == doctest::Approx(0.25).epsilon(1e-14));

  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
  CHECK(cut_norm_exact(StepKernel{Partition::regular(3), zero}).value == 0.0);
}

TEST_CASE("exact cut norm equals full pair enumeration") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const StepKernel k = random_kernel(trial % 2 ? 4 : 6, rng, false);
    CHECK(cut_norm_exact(k).value ==
          doctest::Approx(cut_norm_pair_oracle(k)).epsilon(1e-12));
  }
}

TEST_CASE("exact cut norm of a nonnegative kernel is its integral") {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const StepKernel k = random_kernel(5, rng, true);
    CHECK(cut_norm_exact(k).value == doctest::Approx(kernel_integral(k)).epsilon(1e-13));
  }
}

TEST_CASE("exact cut norm size cap") {
  Rng rng(1);
  CHECK_THROWS_AS(cut_norm_exact(random_kernel(21, rng, true)), std::length_error);
}

TEST_CASE("heuristic cut norm is a lower bound, tight on easy cases") {
  Rng rng(8);
  int equal = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const StepKernel k = random_kernel(2 + trial % 9, rng, trial % 3 == 0);
    const double exact = cut_norm_exact(k).value;
    const double heur = cut_norm_heuristic(k, 32, trial).value;
    CHECK(heur <= exact + 1e-12);
    if (heur >= exact - 1e-12) ++equal;
    if (trial % 3 == 0) CHECK(heur == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(equal >= trials * 9 / 10);

  const StepKernel zero{Partition::regular(4), Eigen::MatrixXd::Zero(4, 4)};
  CHECK(cut_norm_heuristic(zero, 8, 0).value == 0.0);
  // Determinism contract.
  const StepKernel k = random_kernel(7, rng, false);
  CHECK(cut_norm_heuristic(k, 16, 3).value == cut_norm_heuristic(k, 16, 3).value);
}

TEST_CASE("cut norm scales absolutely") {
  Rng rng(9);
  const StepKernel k = random_kernel(6, rng, false);
  const CutNormResult base = cut_norm_exact(k);
  for (double alpha : {2.0, 0.5, -3.0}) {
    const CutNormResult scaled = cut_norm_exact(StepKernel{k.partition, alpha * k.values});
    CHECK(scaled.value == doctest::Approx(std::abs(alpha) * base.value).epsilon(1e-12));
    if (alpha > 0) {
      CHECK(scaled.row_set == base.row_set);
      CHECK(scaled.col_set == base.col_set);
    }
  }
}

TEST_CASE("sandwich bound over random kernels") {
  Rng rng(10);
  for (int trial = 0; trial < 1000; ++trial) {
    const StepKernel k = random_kernel(2 + trial % 9, rng, trial % 2 == 0);
    const double exact = cut_norm_exact(k).value;
    CHECK(std::abs(kernel_integral(k)) <= exact + 1e-12);
    CHECK(exact <= lp_norm(k, 1) + 1e-12);
  }
}

TEST_CASE("lp norms") {
  Eigen::MatrixXd v(2, 2);
  v << 1, -1, -1, 1;
  const StepKernel k{Partition::regular(2), v};
  CHECK(lp_norm(k, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lp_norm(k, 2) == doctest::Approx(1.0).epsilon(1e-15));
  const StepKernel zero{Partition::regular(2), Eigen::MatrixXd::Zero(2, 2)};
  CHECK(lp_norm(zero, 1) == 0.0);
  CHECK_THROWS_AS(lp_norm(k, 3), std::invalid_argument);
}

TEST_CASE("homomorphism densities on graphs") {
  Eigen::MatrixXd edge_graph(2, 2);
  edge_graph << 0, 1, 1, 0;
  // 2 of the 4 maps contribute weight 1.
  CHECK(hom_density_graph(Motif::edge(), edge_graph) == doctest::Approx(0.5).epsilon(1e-15));

  const double p = 0.7;
  const Eigen::MatrixXd complete = Eigen::MatrixXd::Constant(4, 4, p);
  CHECK(hom_density_graph(Motif::triangle(), complete) == doctest::Approx(p * p * p).epsilon(1e-14));
  CHECK(hom_density_graph(Motif::single_vertex(), complete) == doctest::Approx(1.0));

  CHECK_THROWS_AS(Motif::from_edges(6, {}), std::length_error);
  CHECK_THROWS_AS(Motif::from_edges(3, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Motif::from_edges(3, {{0, 1}, {1, 0}}), std::invalid_argument);
}

TEST_CASE("graphon densities match graph densities on induced graphons") {
  Rng rng(12);
  const Motif motifs[] = {Motif::edge(), Motif::triangle(), Motif::path3()};
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(9));
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        a(i, j) = rng.next_double();
        a(j, i) = a(i, j);
      }
    }
    const Graphon w = Graphon::induced(a);
    for (const Motif& h : motifs)
      CHECK(hom_density_graphon(h, w) == doctest::Approx(hom_density_graph(h, a)).epsilon(1e-12));
  }
}

TEST_CASE("edge density is the integral; constants behave") {
  Eigen::MatrixXd c(1, 1);
  c << 0.6;
  const Graphon w = Graphon::induced(c);
  CHECK(hom_density_graphon(Motif::edge(), w) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(hom_density_graphon(Motif::triangle(), w) == doctest::Approx(0.216).epsilon(1e-14));

  Rng rng(13);
  const StepKernel k = random_kernel(5, rng, true);
  const Graphon sw = Graphon::step(k.partition, k.values);
  CHECK(hom_density_graphon(Motif::edge(), sw) ==
        doctest::Approx(kernel_integral(k)).epsilon(1e-13));
}

TEST_CASE("graphon spectrum of a two-node graph") {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 1, 0;
  const GraphonSpectrum s = spectrum_graphon(Graphon::induced(a));
  CHECK(s.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.eigenvalues[1] == doctest::Approx(-0.5).epsilon(1e-14));
  for (int j = 0; j < 2; ++j) {
    const GraphonSignal phi{s.partition, s.eigenfunctions.col(j)};
    CHECK(phi.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // phi = sqrt(N) u lifted to steps.
  CHECK(std::abs(s.eigenfunctions(0, 0)) == doctest::Approx(std::sqrt(2.0) * std::sqrt(0.5)));
}

TEST_CASE("eigenvalue scaling on regular partitions") {
  Rng rng(14);
  for (int n : {5, 20, 50}) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        a(i, j) = rng.next_double();
        a(j, i) = a(i, j);
      }
    }
    const GraphonSpectrum s = spectrum_graphon(Graphon::induced(a));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(a);
    Eigen::VectorXd scaled = oracle.eigenvalues() / n;
    std::sort(scaled.data(), scaled.data() + n,
              [](double x, double y) { return std::abs(x) > std::abs(y); });
    for (int i = 0; i < n; ++i) CHECK(s.eigenvalues[i] == doctest::Approx(scaled[i]).epsilon(1e-10));
  }
}

TEST_CASE("spectrum on an irregular partition stays orthonormal") {
  Rng rng(15);
  const Partition p = Partition::from_breakpoints({0.0, 0.2, 0.5, 1.0});
  Eigen::MatrixXd v(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      v(i, j) = rng.next_double();
      v(j, i) = v(i, j);
    }
  }
  const GraphonSpectrum s = spectrum_graphon(Graphon::step(p, v));
  const Eigen::VectorXd mu = p.measures();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double dot = s.eigenfunctions.col(i).dot(mu.cwiseProduct(s.eigenfunctions.col(j)));
      CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("graphon Fourier transform") {
  Rng rng(16);
  Eigen::MatrixXd a(6, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = i; j < 6; ++j) {
      a(i, j) = rng.next_double();
      a(j, i) = a(i, j);
    }
  }
  const GraphonSpectrum s = spectrum_graphon(Graphon::induced(a));

  // An eigenfunction transforms to a unit coordinate vector.
  const GraphonSignal phi2{s.partition, s.eigenfunctions.col(2)};
  const Eigen::VectorXd coeffs = gphon_ft(phi2, s);
  for (int j = 0; j < 6; ++j)
    CHECK(std::abs(coeffs[j] - (j == 2 ? 1.0 : 0.0)) <= 1e-10);

  // Parseval on the step space.
  Eigen::VectorXd x(6);
  for (int i = 0; i < 6; ++i) x[i] = rng.uniform(-2.0, 2.0);
  const GraphonSignal xs{s.partition, x};
  const Eigen::VectorXd xhat = gphon_ft(xs, s);
  CHECK(xhat.squaredNorm() == doctest::Approx(xs.l2_norm() * xs.l2_norm()).epsilon(1e-10));

  const GraphonSignal zero{s.partition, Eigen::VectorXd::Zero(6)};
  CHECK(gphon_ft(zero, s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectral norm matches the dense-matrix oracle on regular grids") {
  Rng rng(18);
  const StepKernel k = random_kernel(12, rng, false);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k.values);
  const double oracle = es.eigenvalues().cwiseAbs().maxCoeff() / 12.0;
  CHECK(spectral_norm(k) == doctest::Approx(oracle).epsilon(1e-12));
}
