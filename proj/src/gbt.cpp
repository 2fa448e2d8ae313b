#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "src/classifiers_internal.hpp"
#include "src/json_util.hpp"

// Multiclass gradient-boosted regression trees with a softmax objective:
// one depth-limited tree per class per round, fit to the current gradient
// and hessian of the cross-entropy, with second-order (gain-based) splits
// and L2-regularized leaf values. Deterministic: no subsampling, ties in
// gain keep the earliest (feature, threshold) candidate.

namespace mcma::classifiers::internal {

namespace {

constexpr double kMinGain = 1e-12;
constexpr double kHessianFloor = 1e-16;

struct SplitScan {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

struct TreeBuilder {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& grad;
  const Eigen::VectorXd& hess;
  double lambda;
  int max_depth;
  GbtTree tree;

  double leaf_value(double g_sum, double h_sum) const {
    return -g_sum / (h_sum + lambda);
  }

  SplitScan best_split(const std::vector<int>& samples) const {
    SplitScan best;
    double g_total = 0.0, h_total = 0.0;
    for (int i : samples) {
      g_total += grad(i);
      h_total += hess(i);
    }
    const double base = g_total * g_total / (h_total + lambda);

    std::vector<std::pair<double, int>> sorted(samples.size());
    for (int f = 0; f < x.cols(); ++f) {
      for (std::size_t t = 0; t < samples.size(); ++t) {
        sorted[t] = {x(samples[t], f), samples[t]};
      }
      std::sort(sorted.begin(), sorted.end());
      double g_left = 0.0, h_left = 0.0;
      for (std::size_t t = 0; t + 1 < sorted.size(); ++t) {
        g_left += grad(sorted[t].second);
        h_left += hess(sorted[t].second);
        if (sorted[t].first == sorted[t + 1].first) continue;
        const double g_right = g_total - g_left;
        const double h_right = h_total - h_left;
        const double gain = g_left * g_left / (h_left + lambda) +
                            g_right * g_right / (h_right + lambda) - base;
        if (gain > best.gain + kMinGain) {
          best.found = true;
          best.feature = f;
          best.threshold = 0.5 * (sorted[t].first + sorted[t + 1].first);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  int build(const std::vector<int>& samples, int depth) {
    double g_sum = 0.0, h_sum = 0.0;
    for (int i : samples) {
      g_sum += grad(i);
      h_sum += hess(i);
    }
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[static_cast<std::size_t>(node_id)].value = leaf_value(g_sum, h_sum);

    if (depth >= max_depth || samples.size() < 2) return node_id;
    const SplitScan split = best_split(samples);
    if (!split.found) return node_id;

    std::vector<int> left, right;
    for (int i : samples) {
      (x(i, split.feature) <= split.threshold ? left : right).push_back(i);
    }
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    GbtNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return node_id;
  }
};

} // namespace

double GbtTree::eval(const Eigen::VectorXd& x) const {
  int idx = 0;
  while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
    const GbtNode& node = nodes[static_cast<std::size_t>(idx)];
    idx = x(node.feature) <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(idx)].value;
}

Gbt fit_gbt(const Eigen::MatrixXd& x, const std::vector<int>& y,
            const TrainConfig& config, std::vector<double>& loss_trace) {
  const Eigen::Index n = x.rows();
  Gbt model;
  model.learning_rate = config.gbt_learning_rate;
  model.rounds.reserve(static_cast<std::size_t>(config.gbt_rounds));

  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n, 3);
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);

  for (int round = 0; round < config.gbt_rounds; ++round) {
    Eigen::MatrixXd p(n, 3);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = scores.row(i).maxCoeff();
      p.row(i) = (scores.row(i).array() - m).exp();
      p.row(i) /= p.row(i).sum();
      loss -= std::log(std::max(p(i, y[static_cast<std::size_t>(i)]),
                                std::numeric_limits<double>::min()));
    }
    loss_trace.push_back(loss / static_cast<double>(n));

    std::array<GbtTree, 3> trees;
    for (int c = 0; c < 3; ++c) {
      Eigen::VectorXd grad(n), hess(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double pc = p(i, c);
        grad(i) = pc - (y[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0);
        hess(i) = std::max(pc * (1.0 - pc), kHessianFloor);
      }
      TreeBuilder builder{x, grad, hess, config.gbt_lambda, config.gbt_depth, {}};
      builder.build(all, 0);
      trees[static_cast<std::size_t>(c)] = std::move(builder.tree);
      for (Eigen::Index i = 0; i < n; ++i) {
        scores(i, c) += config.gbt_learning_rate *
                        trees[static_cast<std::size_t>(c)].eval(x.row(i).transpose());
      }
    }
    model.rounds.push_back(std::move(trees));
  }
  return model;
}

Eigen::Vector3d gbt_scores(const Gbt& model, const Eigen::VectorXd& x) {
  Eigen::Vector3d scores = Eigen::Vector3d::Zero();
  for (const auto& round : model.rounds) {
    for (int c = 0; c < 3; ++c) {
      scores(c) += model.learning_rate * round[static_cast<std::size_t>(c)].eval(x);
    }
  }
  return scores;
}

nlohmann::json gbt_to_json(const Gbt& model) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& round : model.rounds) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : round) {
      nlohmann::json nodes = nlohmann::json::array();
      for (const auto& node : tree.nodes) {
        nodes.push_back({{"f", node.feature},
                         {"t", node.threshold},
                         {"l", node.left},
                         {"r", node.right},
                         {"v", node.value}});
      }
      trees.push_back({{"nodes", std::move(nodes)}});
    }
    rounds.push_back(std::move(trees));
  }
  return {{"learning_rate", model.learning_rate}, {"rounds", std::move(rounds)}};
}

Gbt gbt_from_json(const nlohmann::json& j) {
  Gbt model;
  model.learning_rate = j.at("learning_rate").get<double>();
  for (const auto& round : j.at("rounds")) {
    if (round.size() != 3) throw ParseError("gbt round must hold 3 trees");
    std::array<GbtTree, 3> trees;
    for (int c = 0; c < 3; ++c) {
      for (const auto& nj : round[static_cast<std::size_t>(c)].at("nodes")) {
        GbtNode node;
        node.feature = nj.at("f").get<int>();
        node.threshold = nj.at("t").get<double>();
        node.left = nj.at("l").get<int>();
        node.right = nj.at("r").get<int>();
        node.value = nj.at("v").get<double>();
        trees[static_cast<std::size_t>(c)].nodes.push_back(node);
      }
    }
    model.rounds.push_back(std::move(trees));
  }
  return model;
}

} // namespace mcma::classifiers::internal
