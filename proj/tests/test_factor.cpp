#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mcma/factor.hpp"
#include "mcma/synthgen.hpp"

using namespace mcma;
using namespace mcma::factor;

namespace {

// Draws N x D data from a known PPCA model.
Eigen::MatrixXd sample_ppca(const Eigen::MatrixXd& w, const Eigen::VectorXd& mu,
                            double noise_var, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index d = w.rows();
  const Eigen::Index k = w.cols();
  Eigen::MatrixXd data(n, d);
  const double sd = std::sqrt(noise_var);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd z(k);
    for (Eigen::Index c = 0; c < k; ++c) z(c) = normal(eng);
    for (Eigen::Index j = 0; j < d; ++j) {
      data(i, j) = mu(j) + w.row(j).dot(z) + sd * normal(eng);
    }
  }
  return data;
}

double cosine_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

Eigen::VectorXd pack(const Eigen::MatrixXd& w, const Eigen::VectorXd& mu,
                     double noise_var) {
  Eigen::VectorXd packed(w.size() + mu.size() + 1);
  Eigen::Index idx = 0;
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) packed(idx++) = w(r, c);
  }
  packed.segment(idx, mu.size()) = mu;
  packed(packed.size() - 1) = std::log(noise_var);
  return packed;
}

} // namespace

// Oracle: the analytic gradient of the observed-data log-likelihood must
// match central finite differences, with and without a holdout mask.
TEST_CASE("ppca objective gradient matches finite differences") {
  std::mt19937_64 eng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index n = 40, d = 5;
  const int k = 2;
  Eigen::MatrixXd data(n, d);
  for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = normal(eng);

  Eigen::MatrixXd w(d, k);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = 0.5 * normal(eng);
  Eigen::VectorXd mu(d);
  for (Eigen::Index i = 0; i < d; ++i) mu(i) = 0.3 * normal(eng);
  const Eigen::VectorXd packed = pack(w, mu, 0.7);

  HoldoutMask mask = make_holdout(n, d, 0.3, 99);

  for (const auto* held : {static_cast<const decltype(mask.held)*>(nullptr),
                           &mask.held}) {
    const auto analytic = detail::eval_packed_objective(data, held, k, packed);
    const double h = 1e-6;
    double max_rel = 0.0;
    for (Eigen::Index p = 0; p < packed.size(); ++p) {
      Eigen::VectorXd plus = packed, minus = packed;
      plus(p) += h;
      minus(p) -= h;
      const double numeric =
          (detail::eval_packed_objective(data, held, k, plus).loglik -
           detail::eval_packed_objective(data, held, k, minus).loglik) /
          (2.0 * h);
      const double a = analytic.grad(p);
      max_rel = std::max(max_rel, std::abs(a - numeric) /
                                      std::max({1e-4, std::abs(a),
                                                std::abs(numeric)}));
    }
    CHECK(max_rel < 1e-5);
  }
}

// Oracle: generate-and-recover. Also the basis of acceptance criterion 6.
TEST_CASE("fit_ppca recovers a known one-factor model") {
  std::mt19937_64 eng(42);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index d = 10;
  Eigen::MatrixXd w_true(d, 1);
  for (Eigen::Index j = 0; j < d; ++j) w_true(j, 0) = normal(eng);
  Eigen::VectorXd mu_true(d);
  for (Eigen::Index j = 0; j < d; ++j) mu_true(j) = 0.5 * normal(eng);
  const double noise_true = 0.1;

  const Eigen::MatrixXd data = sample_ppca(w_true, mu_true, noise_true, 5000, 7);
  const FactorModel model = fit_ppca(data, 1);

  CHECK(model.converged);
  CHECK(cosine_angle(model.loadings.col(0), w_true.col(0)) > 0.95);
  CHECK(std::abs(model.noise_var - noise_true) / noise_true < 0.15);
  CHECK((model.mean - mu_true).cwiseAbs().maxCoeff() < 0.15);
}

TEST_CASE("fit_ppca on a constant matrix") {
  const Eigen::MatrixXd data = Eigen::MatrixXd::Constant(50, 4, 0.75);
  const FactorModel model = fit_ppca(data, 1);
  CHECK(model.loadings.norm() < 0.05);
  CHECK((model.mean.array() - 0.75).abs().maxCoeff() < 0.01);
  CHECK(model.noise_var < 1e-4); // driven to the configured floor
}

TEST_CASE("fit_ppca rank and input validation") {
  const Eigen::MatrixXd data = Eigen::MatrixXd::Random(20, 4).cwiseAbs();
  CHECK_THROWS_AS(fit_ppca(data, 4), RankError);
  CHECK_THROWS_AS(fit_ppca(data, 5), RankError);
  CHECK_THROWS_AS(fit_ppca(data, 0), DomainError);
  const Eigen::MatrixXd one_row = Eigen::MatrixXd::Zero(1, 4);
  CHECK_THROWS_AS(fit_ppca(one_row, 1), DomainError);
}

TEST_CASE("fit_ppca sets the non-convergence warning instead of throwing") {
  const Eigen::MatrixXd data = sample_ppca(
      Eigen::MatrixXd::Constant(6, 1, 1.0), Eigen::VectorXd::Zero(6), 0.5, 200, 3);
  FitConfig config;
  config.max_iters = 3;
  config.min_iters = 0;
  const FactorModel model = fit_ppca(data, 1, config);
  CHECK_FALSE(model.converged);
  CHECK(model.iterations == 3);
}

TEST_CASE("adamax log-likelihood is non-decreasing over 50-iteration windows") {
  const Eigen::MatrixXd data = sample_ppca(
      Eigen::MatrixXd::Constant(8, 1, 0.8), Eigen::VectorXd::Zero(8), 0.3, 500, 13);
  const FactorModel model = fit_ppca(data, 1);
  const auto& trace = model.loglik_trace;
  REQUIRE(trace.size() > 51);
  for (std::size_t t = 0; t + 50 < trace.size(); t += 50) {
    const double slack = 1e-6 * std::max(1.0, std::abs(trace[t]));
    CHECK(trace[t + 50] >= trace[t] - slack);
  }
}

TEST_CASE("posterior_mean closed-form cases") {
  FactorModel model;
  model.latent_dim = 1;
  model.loadings = Eigen::MatrixXd::Zero(3, 1);
  model.mean = Eigen::VectorXd::Zero(3);
  model.noise_var = 0.5;

  SUBCASE("zero loadings give zero posterior") {
    const Eigen::VectorXd z = posterior_mean(model, Eigen::Vector3d(1, 0, 1));
    CHECK(z(0) == 0.0);
  }

  SUBCASE("input at the mean gives zero posterior") {
    model.loadings << 1.0, -2.0, 0.5;
    model.mean << 0.3, 0.6, 0.9;
    const Eigen::VectorXd z = posterior_mean(model, model.mean);
    CHECK(std::abs(z(0)) < 1e-12);
  }

  SUBCASE("hand-computed instance") {
    FactorModel hand;
    hand.latent_dim = 1;
    hand.loadings = Eigen::MatrixXd(2, 1);
    hand.loadings << 1.0, 1.0;
    hand.mean = Eigen::VectorXd::Zero(2);
    hand.noise_var = 1.0;
    const Eigen::VectorXd z = posterior_mean(hand, Eigen::Vector2d(1.0, 1.0));
    CHECK(z(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("posterior_mean is affine in the input") {
  std::mt19937_64 eng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  FactorModel model;
  model.latent_dim = 2;
  model.loadings = Eigen::MatrixXd(5, 2);
  for (Eigen::Index i = 0; i < model.loadings.size(); ++i) {
    model.loadings.data()[i] = normal(eng);
  }
  model.mean = Eigen::VectorXd::Zero(5);
  for (Eigen::Index i = 0; i < 5; ++i) model.mean(i) = normal(eng);
  model.noise_var = 0.4;

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
  const Eigen::VectorXd base = posterior_mean(model, zero);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a(5), b(5);
    for (Eigen::Index i = 0; i < 5; ++i) {
      a(i) = normal(eng);
      b(i) = normal(eng);
    }
    const Eigen::VectorXd lhs = posterior_mean(model, a + b) - base;
    const Eigen::VectorXd rhs = (posterior_mean(model, a) - base) +
                                (posterior_mean(model, b) - base);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("posterior_mean shrinks toward zero as noise grows") {
  FactorModel model;
  model.latent_dim = 1;
  model.loadings = Eigen::MatrixXd(4, 1);
  model.loadings << 1.0, 0.5, -0.5, 2.0;
  model.mean = Eigen::VectorXd::Zero(4);
  const Eigen::VectorXd a = Eigen::Vector4d(1.0, 1.0, 0.0, 1.0);

  model.noise_var = 0.1;
  const double z_small = std::abs(posterior_mean(model, a)(0));
  model.noise_var = 10.0;
  const double z_large = std::abs(posterior_mean(model, a)(0));
  CHECK(z_large < z_small);
}

TEST_CASE("make_holdout honors the rounding and clamping rules") {
  const HoldoutMask m1 = make_holdout(20, 10, 0.2, 4);
  for (Eigen::Index i = 0; i < 20; ++i) {
    int held = 0;
    for (Eigen::Index j = 0; j < 10; ++j) held += m1.held(i, j) ? 1 : 0;
    CHECK(held == 2);
  }

  const HoldoutMask m2 = make_holdout(15, 2, 0.9, 4);
  for (Eigen::Index i = 0; i < 15; ++i) {
    int held = 0;
    for (Eigen::Index j = 0; j < 2; ++j) held += m2.held(i, j) ? 1 : 0;
    CHECK(held == 1); // round(1.8) clamped to D-1
  }

  const HoldoutMask a = make_holdout(30, 6, 0.4, 9);
  const HoldoutMask b = make_holdout(30, 6, 0.4, 9);
  CHECK(a.held == b.held);

  CHECK_THROWS_AS(make_holdout(5, 1, 0.5, 0), DomainError);
  CHECK_THROWS_AS(make_holdout(5, 4, 0.0, 0), DomainError);
  CHECK_THROWS_AS(make_holdout(5, 4, 1.0, 0), DomainError);
}

TEST_CASE("predictive_check validation and score bounds") {
  const Eigen::MatrixXd data = sample_ppca(
      Eigen::MatrixXd::Constant(6, 1, 1.0), Eigen::VectorXd::Zero(6), 0.4, 150, 2);
  const HoldoutMask mask = make_holdout(150, 6, 0.2, 3);
  const FactorModel model = fit_ppca_masked(data, mask, 1);

  CHECK_THROWS_AS(predictive_check(model, data, mask, 0, 0), DomainError);

  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    const CheckResult r = predictive_check(model, data, mask, 25, seed);
    CHECK(r.score >= 0.0);
    CHECK(r.score <= 1.0);
    CHECK(r.passed == (r.score > 0.5));
    CHECK(r.n_replications == 25);
  }
}

// Calibration oracle: data truly from the model class makes t_obs
// exchangeable with the replicated statistics.
TEST_CASE("predictive_check is calibrated on well-specified data") {
  std::mt19937_64 eng(6);
  std::normal_distribution<double> normal(0.0, 1.0);
  double total = 0.0;
  const int trials = 6;
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::MatrixXd w(8, 1);
    for (Eigen::Index j = 0; j < 8; ++j) w(j, 0) = normal(eng);
    Eigen::VectorXd mu(8);
    for (Eigen::Index j = 0; j < 8; ++j) mu(j) = normal(eng);
    const Eigen::MatrixXd data =
        sample_ppca(w, mu, 0.3, 400, 100 + static_cast<std::uint64_t>(trial));
    const HoldoutMask mask =
        make_holdout(400, 8, 0.2, 200 + static_cast<std::uint64_t>(trial));
    const FactorModel model = fit_ppca_masked(data, mask, 1);
    const CheckResult r = predictive_check(model, data, mask, 100,
                                           300 + static_cast<std::uint64_t>(trial));
    total += r.score;
  }
  const double mean_score = total / trials;
  CHECK(mean_score > 0.25);
  CHECK(mean_score < 0.75);
}

// Comparative check: a model whose per-column parameters are misaligned with
// the data must score below the well-specified fit on the same holdout.
TEST_CASE("predictive_check penalizes a column-permuted model") {
  std::mt19937_64 eng(14);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd w(8, 1);
  Eigen::VectorXd mu(8);
  for (Eigen::Index j = 0; j < 8; ++j) {
    w(j, 0) = 1.5 * normal(eng);
    mu(j) = 2.0 * normal(eng);
  }
  const Eigen::MatrixXd data = sample_ppca(w, mu, 0.1, 500, 21);
  const HoldoutMask mask = make_holdout(500, 8, 0.2, 22);
  const FactorModel good = fit_ppca_masked(data, mask, 1);

  FactorModel bad = good;
  // rotate the per-column parameters by one position
  for (Eigen::Index j = 0; j < 8; ++j) {
    bad.loadings.row(j) = good.loadings.row((j + 1) % 8);
    bad.mean(j) = good.mean((j + 1) % 8);
  }

  const CheckResult r_good = predictive_check(good, data, mask, 200, 30);
  const CheckResult r_bad = predictive_check(bad, data, mask, 200, 30);
  CHECK(r_bad.score < r_good.score);
  CHECK(r_bad.score < 0.05);
}

TEST_CASE("fit_ppca_masked ignores held entries") {
  // corrupt the held entries; the masked fit must be unaffected
  const Eigen::MatrixXd clean = sample_ppca(
      Eigen::MatrixXd::Constant(6, 1, 1.0), Eigen::VectorXd::Zero(6), 0.2, 300, 17);
  const HoldoutMask mask = make_holdout(300, 6, 0.2, 18);
  Eigen::MatrixXd corrupted = clean;
  for (Eigen::Index i = 0; i < corrupted.rows(); ++i) {
    for (Eigen::Index j = 0; j < corrupted.cols(); ++j) {
      if (mask.held(i, j)) corrupted(i, j) = 1e6;
    }
  }
  const FactorModel a = fit_ppca_masked(clean, mask, 1);
  const FactorModel b = fit_ppca_masked(corrupted, mask, 1);
  CHECK(a.loadings == b.loadings);
  CHECK(a.mean == b.mean);
  CHECK(a.noise_var == b.noise_var);
}
