#pragma once

// From-scratch multi-class probabilistic classifiers behind one interface.
//
// Every kind returns a valid 3-class probability vector from predict_proba.
// Training is deterministic given the config seed. Single-class training
// data never throws: the fitted model returns that class with probability 1
// and carries a warning flag, whatever the requested kind.

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "mcma/core.hpp"

namespace mcma::classifiers {

enum class ClassifierKind { MNLogit, KNN, GaussianNB, MLP, GBT };

const char* kind_name(ClassifierKind kind);
ClassifierKind kind_from_name(const std::string& name);

struct TrainConfig {
  std::uint64_t seed = 0;
  int max_iters = 2000;
  double tol = 1e-7; // relative loss change

  // MNLogit
  double l2_penalty = 1e-4;
  bool l2_penalize_bias = false;

  // kNN
  int knn_k = 5;

  // MLP
  int mlp_hidden = 16;
  double mlp_learning_rate = 0.05;

  // gradient-boosted trees
  int gbt_rounds = 100;
  int gbt_depth = 3;
  double gbt_learning_rate = 0.1;
  double gbt_lambda = 1.0; // leaf-value L2

  // Columns standardized to zero mean / unit variance (training statistics)
  // before fitting; applied only for the scale-sensitive kinds (kNN, MLP).
  std::vector<int> standardize_cols;

  void validate() const;
};

class OutcomeModel {
public:
  OutcomeModel() = default;

  ClassifierKind kind() const;
  int input_dim() const;
  bool single_class() const; // degenerate-training warning
  bool converged() const;    // false = NonConvergence warning
  const std::vector<double>& loss_trace() const; // iterative kinds only

  Simplex3 predict_proba(const Eigen::VectorXd& features) const;
  Eigen::MatrixXd predict_proba_rows(const Eigen::MatrixXd& features) const; // N x 3

  nlohmann::json to_json() const;
  static OutcomeModel from_json(const nlohmann::json& j);

  struct Impl;
  explicit OutcomeModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

private:
  std::shared_ptr<const Impl> impl_;
};

// Fits the requested kind on an N x F feature matrix. Throws DomainError on
// non-finite features or N < 3.
OutcomeModel fit(ClassifierKind kind, const Eigen::MatrixXd& features,
                 const AssociationLabels& labels, const TrainConfig& config = {});

// Analytic-vs-central-finite-difference check (h = 1e-5) of the training
// gradient on a random instance; returns the max relative error over all
// parameters. Only MNLogit and MLP are differentiable.
double gradient_check(ClassifierKind kind, int n, int f, std::uint64_t seed,
                      int mlp_hidden = 8);

// argmax with ties broken toward the lowest class index
int predicted_class(const Simplex3& probs);

namespace detail {

// Loss and gradient of the penalized mean cross-entropy for MNLogit with
// parameters packed as [vec(W) column-major, b]; exposed for tests.
struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
};
LossGrad mnlogit_loss_grad(const Eigen::MatrixXd& x, const std::vector<int>& y,
                           const Eigen::VectorXd& packed, double l2,
                           bool penalize_bias);
// Same for the one-hidden-layer MLP, packed as [vec(W1), b1, vec(W2), b2].
LossGrad mlp_loss_grad(const Eigen::MatrixXd& x, const std::vector<int>& y,
                       const Eigen::VectorXd& packed, int hidden);

} // namespace detail

} // namespace mcma::classifiers
