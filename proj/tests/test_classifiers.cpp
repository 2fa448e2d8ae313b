#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mcma/classifiers.hpp"

using namespace mcma;
using namespace mcma::classifiers;

namespace {

AssociationLabels labels_of(std::vector<int> v) { return AssociationLabels(std::move(v)); }

// 3 disjoint indicator columns; class = index of the hot column.
std::pair<Eigen::MatrixXd, AssociationLabels> separable_instance(int per_class) {
  const int n = 3 * per_class;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, 3);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int c = i % 3;
    x(i, c) = 1.0;
    y[static_cast<std::size_t>(i)] = c;
  }
  return {x, labels_of(y)};
}

OutcomeModel mnlogit_with(const Eigen::MatrixXd& w, const Eigen::Vector3d& b) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "mnlogit";
  j["input_dim"] = static_cast<int>(w.rows());
  j["single_class"] = false;
  j["converged"] = true;
  j["standardizer"] = nullptr;
  nlohmann::json weights = nlohmann::json::array();
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    weights.push_back({w(i, 0), w(i, 1), w(i, 2)});
  }
  j["params"] = {{"weights", weights}, {"bias", {b(0), b(1), b(2)}}};
  return OutcomeModel::from_json(j);
}

} // namespace

TEST_CASE("MNLogit separates disjoint indicator classes") {
  const auto [x, y] = separable_instance(10);
  TrainConfig config;
  config.l2_penalty = 1e-4;
  const OutcomeModel model = fit(ClassifierKind::MNLogit, x, y, config);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Simplex3 p = model.predict_proba(x.row(i).transpose());
    CHECK(predicted_class(p) == y[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("MNLogit training loss is non-increasing") {
  std::mt19937_64 eng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(60, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(eng);
  std::vector<int> y(60);
  for (auto& v : y) v = std::uniform_int_distribution<int>(0, 2)(eng);

  const OutcomeModel model = fit(ClassifierKind::MNLogit, x, labels_of(y), {});
  const auto& trace = model.loss_trace();
  REQUIRE(trace.size() > 2);
  for (std::size_t t = 1; t < trace.size(); ++t) {
    CHECK(trace[t] <= trace[t - 1] + 1e-12);
  }
}

TEST_CASE("MNLogit zero model predicts the uniform simplex") {
  const OutcomeModel model =
      mnlogit_with(Eigen::MatrixXd::Zero(4, 3), Eigen::Vector3d::Zero());
  const Simplex3 p = model.predict_proba(Eigen::Vector4d(1, -2, 0.5, 3));
  for (int c = 0; c < 3; ++c) CHECK(p[c] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("MNLogit softmax is shift invariant") {
  std::mt19937_64 eng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd w(5, 3);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(eng);
  const Eigen::Vector3d b(0.3, -0.2, 0.8);
  const double shift = 7.5;

  Eigen::MatrixXd w2 = w;
  const OutcomeModel m1 = mnlogit_with(w, b);
  const OutcomeModel m2 = mnlogit_with(
      w2, Eigen::Vector3d(b(0) + shift, b(1) + shift, b(2) + shift));
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x(5);
    for (Eigen::Index i = 0; i < 5; ++i) x(i) = normal(eng);
    const Simplex3 p1 = m1.predict_proba(x);
    const Simplex3 p2 = m2.predict_proba(x);
    for (int c = 0; c < 3; ++c) CHECK(p1[c] == doctest::Approx(p2[c]).epsilon(1e-12));
  }
}

TEST_CASE("single-class training yields the degenerate model with a warning") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(8, 2);
  for (ClassifierKind kind :
       {ClassifierKind::MNLogit, ClassifierKind::KNN, ClassifierKind::GaussianNB,
        ClassifierKind::MLP, ClassifierKind::GBT}) {
    const OutcomeModel model = fit(kind, x, labels_of({2, 2, 2, 2, 2, 2, 2, 2}), {});
    CHECK(model.single_class());
    const Simplex3 p = model.predict_proba(Eigen::Vector2d(0.0, 0.0));
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 0.0);
    CHECK(p[2] == 1.0);
  }
}

TEST_CASE("GaussianNB with identical class-conditionals returns the priors") {
  // the same 4 feature rows appear in every class; likelihoods cancel
  Eigen::MatrixXd block(4, 2);
  block << 0.0, 1.0, 1.0, 0.0, 0.5, 0.5, 0.25, 0.75;
  Eigen::MatrixXd x(12, 2);
  std::vector<int> y;
  for (int c = 0; c < 3; ++c) {
    x.block(4 * c, 0, 4, 2) = block;
    for (int i = 0; i < 4; ++i) y.push_back(c);
  }
  // skew priors by duplicating class 0 rows
  Eigen::MatrixXd x2(16, 2);
  x2 << x, block;
  for (int i = 0; i < 4; ++i) y.push_back(0);

  const OutcomeModel model = fit(ClassifierKind::GaussianNB, x2, labels_of(y), {});
  const Simplex3 p = model.predict_proba(Eigen::Vector2d(0.5, 0.5));
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p[1] == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(p[2] == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("GaussianNB never emits NaN for zero-variance features") {
  Eigen::MatrixXd x(9, 2);
  x << 1, 0, 1, 0, 1, 1, 1, 0, 1, 1, 1, 0, 1, 1, 1, 0, 1, 1; // column 0 constant
  const OutcomeModel model = fit(ClassifierKind::GaussianNB, x,
                                 labels_of({0, 0, 0, 1, 1, 1, 2, 2, 2}), {});
  const Simplex3 p = model.predict_proba(Eigen::Vector2d(1.0, 0.5));
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    CHECK(std::isfinite(p[c]));
    sum += p[c];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("kNN with k = N returns the training frequencies for any query") {
  std::mt19937_64 eng(12);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(10, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(eng);
  const std::vector<int> y{0, 0, 0, 0, 1, 1, 1, 2, 2, 2};
  TrainConfig config;
  config.knn_k = 10;
  const OutcomeModel model = fit(ClassifierKind::KNN, x, labels_of(y), config);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd q(3);
    for (Eigen::Index i = 0; i < 3; ++i) q(i) = 10.0 * normal(eng);
    const Simplex3 p = model.predict_proba(q);
    CHECK(p[0] == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(p[2] == doctest::Approx(0.3).epsilon(1e-6));
  }
}

TEST_CASE("kNN prediction is invariant to training-row permutation") {
  std::mt19937_64 eng(15);
  std::uniform_int_distribution<int> bit(0, 1);
  Eigen::MatrixXd x(30, 4);
  std::vector<int> y(30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) x(i, j) = bit(eng); // many distance ties
    y[static_cast<std::size_t>(i)] = std::uniform_int_distribution<int>(0, 2)(eng);
  }
  const OutcomeModel a = fit(ClassifierKind::KNN, x, labels_of(y), {});

  std::vector<int> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), eng);
  Eigen::MatrixXd xp(30, 4);
  std::vector<int> yp(30);
  for (int i = 0; i < 30; ++i) {
    xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
    yp[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
  }
  const OutcomeModel b = fit(ClassifierKind::KNN, xp, labels_of(yp), {});

  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd q(4);
    for (Eigen::Index j = 0; j < 4; ++j) q(j) = bit(eng);
    const Simplex3 pa = a.predict_proba(q);
    const Simplex3 pb = b.predict_proba(q);
    for (int c = 0; c < 3; ++c) CHECK(pa[c] == doctest::Approx(pb[c]).epsilon(1e-12));
  }
}

TEST_CASE("MLP learns a separable problem and is seed-deterministic") {
  const auto [x, y] = separable_instance(12);
  TrainConfig config;
  config.seed = 5;
  config.max_iters = 800;
  const OutcomeModel a = fit(ClassifierKind::MLP, x, y, config);
  const OutcomeModel b = fit(ClassifierKind::MLP, x, y, config);
  int correct = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Simplex3 pa = a.predict_proba(x.row(i).transpose());
    const Simplex3 pb = b.predict_proba(x.row(i).transpose());
    for (int c = 0; c < 3; ++c) CHECK(pa[c] == pb[c]);
    correct += predicted_class(pa) == y[static_cast<std::size_t>(i)] ? 1 : 0;
  }
  CHECK(correct == x.rows());
}

TEST_CASE("GBT fits a separable problem deterministically") {
  const auto [x, y] = separable_instance(10);
  TrainConfig config;
  config.gbt_rounds = 20;
  const OutcomeModel a = fit(ClassifierKind::GBT, x, y, config);
  const OutcomeModel b = fit(ClassifierKind::GBT, x, y, config);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Simplex3 pa = a.predict_proba(x.row(i).transpose());
    const Simplex3 pb = b.predict_proba(x.row(i).transpose());
    for (int c = 0; c < 3; ++c) CHECK(pa[c] == pb[c]);
    CHECK(predicted_class(pa) == y[static_cast<std::size_t>(i)]);
  }
  const auto& trace = a.loss_trace();
  REQUIRE(trace.size() > 2);
  CHECK(trace.back() < trace.front());
}

TEST_CASE("predict_proba always returns a valid simplex") {
  std::mt19937_64 eng(33);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> label(0, 2);
  for (ClassifierKind kind :
       {ClassifierKind::MNLogit, ClassifierKind::KNN, ClassifierKind::GaussianNB,
        ClassifierKind::MLP, ClassifierKind::GBT}) {
    Eigen::MatrixXd x(24, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(eng);
    std::vector<int> y(24);
    for (auto& v : y) v = label(eng);
    TrainConfig config;
    config.max_iters = 200;
    config.gbt_rounds = 15;
    const OutcomeModel model = fit(kind, x, labels_of(y), config);
    for (int trial = 0; trial < 25; ++trial) {
      Eigen::VectorXd q(3);
      for (Eigen::Index j = 0; j < 3; ++j) q(j) = 3.0 * normal(eng);
      const Simplex3 p = model.predict_proba(q); // constructor enforces validity
      double sum = 0.0;
      for (int c = 0; c < 3; ++c) {
        CHECK(p[c] >= 0.0);
        sum += p[c];
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("predict_proba rejects dimension mismatches") {
  const auto [x, y] = separable_instance(4);
  const OutcomeModel model = fit(ClassifierKind::MNLogit, x, y, {});
  CHECK_THROWS_AS(model.predict_proba(Eigen::Vector2d(0, 1)), DimensionMismatch);
}

TEST_CASE("gradient check: MNLogit within 1e-5, MLP within 1e-4") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(gradient_check(ClassifierKind::MNLogit, 20, 4, seed) < 1e-5);
    CHECK(gradient_check(ClassifierKind::MLP, 20, 4, seed, 8) < 1e-4);
  }
  CHECK_THROWS_AS(gradient_check(ClassifierKind::KNN, 20, 4, 0), DomainError);
}

TEST_CASE("zero-weight MNLogit gradient of bias terms vanishes on balanced data") {
  const auto [x, y] = separable_instance(6);
  const Eigen::VectorXd packed = Eigen::VectorXd::Zero(3 * 3 + 3);
  const auto lg = detail::mnlogit_loss_grad(x, y.values(), packed, 0.0, false);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(lg.grad(9 + c)) < 1e-15);
  }
}

TEST_CASE("serialization round trip preserves predictions") {
  std::mt19937_64 eng(44);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(18, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(eng);
  std::vector<int> y(18);
  for (auto& v : y) v = std::uniform_int_distribution<int>(0, 2)(eng);

  for (ClassifierKind kind :
       {ClassifierKind::MNLogit, ClassifierKind::KNN, ClassifierKind::GaussianNB,
        ClassifierKind::MLP, ClassifierKind::GBT}) {
    TrainConfig config;
    config.max_iters = 100;
    config.gbt_rounds = 10;
    config.standardize_cols = {2};
    const OutcomeModel model = fit(kind, x, labels_of(y), config);
    const OutcomeModel restored = OutcomeModel::from_json(model.to_json());
    CHECK(restored.kind() == kind);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd q(3);
      for (Eigen::Index j = 0; j < 3; ++j) q(j) = normal(eng);
      const Simplex3 pa = model.predict_proba(q);
      const Simplex3 pb = restored.predict_proba(q);
      for (int c = 0; c < 3; ++c) CHECK(pa[c] == doctest::Approx(pb[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("fit input validation") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, 2);
  CHECK_THROWS_AS(fit(ClassifierKind::MNLogit, x, labels_of({0, 1}), {}),
                  DomainError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Random(4, 2);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fit(ClassifierKind::MNLogit, bad, labels_of({0, 1, 2, 0}), {}),
                  DomainError);
}
