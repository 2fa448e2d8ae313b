#pragma once

// Internal model representations shared between classifiers.cpp and gbt.cpp.

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "mcma/classifiers.hpp"

namespace mcma::classifiers::internal {

struct Standardizer {
  bool active = false;
  Eigen::VectorXd shift; // subtracted
  Eigen::VectorXd scale; // divided by; 1 for untouched columns

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    if (!active) return x;
    return (x - shift).cwiseQuotient(scale);
  }
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& x) const {
    if (!active) return x;
    Eigen::MatrixXd out = x.rowwise() - shift.transpose();
    out.array().rowwise() /= scale.transpose().array();
    return out;
  }
};

struct Degenerate {
  int cls = 0;
};

struct MnLogit {
  Eigen::MatrixXd weights; // F x 3
  Eigen::Vector3d bias;
};

struct Knn {
  Eigen::MatrixXd train_x; // standardized
  std::vector<int> train_y;
  int k = 5;
};

struct Gnb {
  std::array<double, 3> prior{0.0, 0.0, 0.0}; // class frequencies, may be 0
  Eigen::MatrixXd mean; // 3 x F
  Eigen::MatrixXd var;  // 3 x F, floored
};

struct Mlp {
  Eigen::MatrixXd w1; // F x H
  Eigen::VectorXd b1; // H
  Eigen::MatrixXd w2; // H x 3
  Eigen::VectorXd b2; // 3
};

struct GbtNode {
  int feature = -1; // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct GbtTree {
  std::vector<GbtNode> nodes; // nodes[0] is the root
  double eval(const Eigen::VectorXd& x) const;
};

struct Gbt {
  double learning_rate = 0.1;
  std::vector<std::array<GbtTree, 3>> rounds;
};

using ModelVariant = std::variant<Degenerate, MnLogit, Knn, Gnb, Mlp, Gbt>;

// Fits the boosted-trees model; returns the per-round training loss trace.
Gbt fit_gbt(const Eigen::MatrixXd& x, const std::vector<int>& y,
            const TrainConfig& config, std::vector<double>& loss_trace);

Eigen::Vector3d gbt_scores(const Gbt& model, const Eigen::VectorXd& x);

nlohmann::json gbt_to_json(const Gbt& model);
Gbt gbt_from_json(const nlohmann::json& j);

Eigen::Vector3d softmax3(const Eigen::Vector3d& logits);

} // namespace mcma::classifiers::internal

namespace mcma::classifiers {

struct OutcomeModel::Impl {
  ClassifierKind kind = ClassifierKind::MNLogit;
  int input_dim = 0;
  bool single_class = false;
  bool converged = true;
  internal::Standardizer standardizer;
  std::vector<double> loss_trace;
  internal::ModelVariant model;
};

} // namespace mcma::classifiers
