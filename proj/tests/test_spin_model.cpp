#include "qrc/spin_model.hpp"
#include "support.hpp"

#include <doctest.h>

#include <bit>

using namespace qrc;

TEST_CASE("sampled Hamiltonian matches the term-by-term oracle") {
  for (double W : {0.0, 2.5, 10.0}) {
    for (double eps : {0.0, 0.05}) {
      ModelParams p{5, 1.0, W, eps, 42};
      const auto h = sample_hamiltonian(p, 3);
      CHECK(max_abs(h.matrix - test::ising_oracle(h.couplings, h.fields, eps)) < 1e-12);
      CHECK(max_abs(h.matrix - h.matrix.adjoint()) == 0.0);
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
          const double J = h.couplings(i, j);
          if (i > j) {
            CHECK(J >= 0.0);
            CHECK(J <= 1.0);
          } else {
            CHECK(J == 0.0);
          }
        }
        CHECK(h.fields[static_cast<std::size_t>(i)] >= 1.0 - W);
        CHECK(h.fields[static_cast<std::size_t>(i)] <= 1.0 + W);
        if (W == 0.0) CHECK(h.fields[static_cast<std::size_t>(i)] == 1.0);
      }
    }
  }
}

TEST_CASE("sampling is deterministic and realization streams differ") {
  ModelParams p{5, 1.0, 3.0, 0.0, 9};
  const auto a = sample_hamiltonian(p, 0);
  const auto b = sample_hamiltonian(p, 0);
  const auto c = sample_hamiltonian(p, 1);
  CHECK(max_abs(a.matrix - b.matrix) == 0.0);
  CHECK(max_abs(a.matrix - c.matrix) > 0.0);
  // Same index, different W: same couplings and disorder pattern.
  ModelParams q = p;
  q.W = 6.0;
  const auto d = sample_hamiltonian(q, 0);
  CHECK((a.couplings - d.couplings).cwiseAbs().maxCoeff() == 0.0);
  CHECK((d.fields[2] - 1.0) == doctest::Approx(2.0 * (a.fields[2] - 1.0)));
}

TEST_CASE("parity is conserved without the symmetry-breaking field") {
  ModelParams p{5, 1.0, 1.0, 0.0, 5};
  const auto h = sample_hamiltonian(p, 0);
  for (Eigen::Index i = 0; i < 32; ++i)
    for (Eigen::Index j = 0; j < 32; ++j)
      if ((std::popcount(static_cast<unsigned>(i)) + std::popcount(static_cast<unsigned>(j))) % 2 == 1) {
        CHECK(std::abs(h.matrix(i, j)) == 0.0);
      }
  p.epsilon = 0.05;
  const auto broken = sample_hamiltonian(p, 0);
  CHECK(std::abs(broken.matrix(0, 1)) > 0.0);
}

TEST_CASE("gap ratios") {
  const double equal[] = {0, 1, 2, 3};
  CHECK(gap_ratio_statistic(equal) == doctest::Approx(1.0));
  const double mixed[] = {0, 1, 3};
  CHECK(gap_ratio_statistic(mixed) == doctest::Approx(0.5));
  const double degenerate_one[] = {0, 0, 1};
  CHECK(gap_ratios(degenerate_one).front() == 0.0);
  const double degenerate_both[] = {1, 1, 1, 2};
  CHECK(gap_ratios(degenerate_both).size() == 1);
  const double too_short[] = {0, 1};
  CHECK_THROWS_AS(gap_ratio_statistic(too_short), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> levels(200);
  for (double& x : levels) x = u(rng);
  std::sort(levels.begin(), levels.end());
  for (double r : gap_ratios(levels)) {
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("Poisson and GOE reference values of the gap-ratio mean") {
  std::mt19937_64 rng(11);
  // Uncorrelated levels.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> levels(200000);
  for (double& x : levels) x = u(rng);
  std::sort(levels.begin(), levels.end());
  CHECK(gap_ratio_statistic(levels) == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(0.01));

  // Real symmetric Gaussian matrices, bulk of the spectrum.
  std::normal_distribution<double> g;
  double sum = 0.0;
  int count = 0;
  for (int trial = 0; trial < 20; ++trial) {
    RealMatrix a(200, 200);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    const RealMatrix h = a + a.transpose();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
    const RealVector ev = es.eigenvalues();
    const std::vector<double> bulk(ev.data() + 50, ev.data() + 150);
    for (double r : gap_ratios(bulk)) {
      sum += r;
      ++count;
    }
  }
  CHECK(sum / count == doctest::Approx(0.5307).epsilon(0.02));
}

TEST_CASE("phase scan cells and degenerate averages") {
  PhaseScanSpec spec;
  spec.h_values = {1.0};
  spec.W_values = {0.0, 10.0};
  spec.n_realizations = 1;
  spec.seed = 4;
  const auto cells = phase_scan(spec);
  REQUIRE(cells.size() == 2);
  const auto h = sample_hamiltonian({5, 1.0, 0.0, 0.0, 4}, 0);
  CHECK(cells[0].mean_r == doctest::Approx(realization_gap_ratio(h, spec.options)));
  CHECK(cells[0].W == 0.0);
  CHECK(cells[1].W == 10.0);

  GapRatioOptions plain{false, 0};
  const std::vector<double> spectrum(h.spectrum.values.data(), h.spectrum.values.data() + h.spectrum.values.size());
  CHECK(realization_gap_ratio(h, plain) == doctest::Approx(gap_ratio_statistic(spectrum)));

  spec.n_realizations = 8;
  const auto one = phase_scan(spec, 1);
  const auto many = phase_scan(spec, 3);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].mean_r == many[i].mean_r);
}

TEST_CASE("model parameters are validated") {
  CHECK_THROWS_AS((ModelParams{1, 1.0, 0.0, 0.0, 0}.validate()), Error);
  CHECK_THROWS_AS((ModelParams{11, 1.0, 0.0, 0.0, 0}.validate()), Error);
  CHECK_THROWS_AS((ModelParams{5, 1.0, -1.0, 0.0, 0}.validate()), Error);
}
