#include "mcma/synthgen.hpp"

#include <cmath>

#include "mcma/rng.hpp"

namespace mcma::synthgen {

namespace {

int sample_multinomial3(double p0, double p1, double /*p2*/, double r) {
  if (r < p0) return 0;
  if (r < p0 + p1) return 1;
  return 2;
}

Eigen::VectorXd draw_poisson_vector(std::mt19937_64& eng, Eigen::Index d,
                                    double rate) {
  std::poisson_distribution<int> dist(rate);
  Eigen::VectorXd w(d);
  for (Eigen::Index j = 0; j < d; ++j) w(j) = static_cast<double>(dist(eng));
  return w;
}

} // namespace

Simplex3 ground_truth_summary(double w_u) {
  if (!(w_u >= 0.0) || !std::isfinite(w_u)) {
    throw DomainError("ground_truth_summary: w_u must be finite and >= 0");
  }
  const double l = 4.0 + w_u;
  return Simplex3(4.0 / l, 0.0, w_u / l);
}

namespace detail {

std::pair<Dataset, GroundTruth> generate_with_weights(
    const SyntheticParams& params, const Eigen::VectorXd& w1,
    const Eigen::VectorXd& w2, const Eigen::VectorXd& w3,
    const GenOptions& options) {
  params.validate();
  const Eigen::Index n = params.n;
  const Eigen::Index d = params.d;
  if (w1.size() != d || w2.size() != d || w3.size() != d) {
    throw DimensionMismatch("generate_with_weights: weight vector length != d");
  }
  if (w1.isZero(0.0) && w2.isZero(0.0) && w3.isZero(0.0) && params.w_u == 0.0) {
    throw DegenerateWeightsError(
        "all weight vectors are zero and w_u = 0; class probabilities are "
        "degenerate at a = 0 rows");
  }

  auto u_eng = rng::engine(params.seed, rng::Stream::Confounder);
  auto bias_eng = rng::engine(params.seed, rng::Stream::Bias);
  auto label_eng = rng::engine(params.seed, rng::Stream::Labels);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> u(static_cast<std::size_t>(n));
  for (auto& ui : u) ui = rng::uniform_open01(u_eng);

  Eigen::MatrixXd bias(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p_high = 0.25 + 0.5 * u[static_cast<std::size_t>(i)];
    while (true) {
      bool any_high = false;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double bit = unif(bias_eng) < p_high ? 1.0 : 0.0;
        bias(i, j) = bit;
        any_high = any_high || bit == 1.0;
      }
      if (any_high || options.skip_min_one_high) break;
    }
  }
  if (options.force_zero_bias) bias.setZero();

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ui = u[static_cast<std::size_t>(i)];
    const Eigen::VectorXd a = bias.row(i).transpose();
    const double n1 = w1.dot(a) * ui + 4.0 * ui;
    const double n2 = w2.dot(a);
    const double n3 = w3.dot(a) + params.w_u * ui;
    const double l = n1 + n2 + n3;
    if (!(l > 0.0)) {
      throw DegenerateWeightsError("class-probability normalizer is zero");
    }
    labels[static_cast<std::size_t>(i)] =
        sample_multinomial3(n1 / l, n2 / l, n3 / l, unif(label_eng));
  }

  Dataset dataset = validate_dataset(bias, labels, default_domain_names(d),
                                     SyntheticProvenance{params});
  GroundTruth truth{ground_truth_summary(params.w_u), std::move(u)};
  return {std::move(dataset), std::move(truth)};
}

std::pair<Dataset, GroundTruth> generate_synthetic_with_options(
    const SyntheticParams& params, const GenOptions& options) {
  params.validate();
  auto weight_eng = rng::engine(params.seed, rng::Stream::Weights);
  const Eigen::VectorXd w1 = draw_poisson_vector(weight_eng, params.d, 3.0);
  const Eigen::VectorXd w2 = draw_poisson_vector(weight_eng, params.d, 2.0);
  const Eigen::VectorXd w3 = draw_poisson_vector(weight_eng, params.d, 1.0);
  return generate_with_weights(params, w1, w2, w3, options);
}

} // namespace detail

std::pair<Dataset, GroundTruth> generate_synthetic(const SyntheticParams& params) {
  return detail::generate_synthetic_with_options(params, {});
}

SemiSynthParams estimate_semisynth_params(const Dataset& dataset) {
  const Eigen::MatrixXd& bias = dataset.bias().values();
  SemiSynthParams params;
  params.bernoulli_rates.resize(static_cast<std::size_t>(bias.cols()));
  for (Eigen::Index j = 0; j < bias.cols(); ++j) {
    params.bernoulli_rates[static_cast<std::size_t>(j)] = bias.col(j).mean();
  }
  std::array<double, 3> counts{0.0, 0.0, 0.0};
  for (int y : dataset.labels().values()) counts[static_cast<std::size_t>(y)] += 1.0;
  const double n = static_cast<double>(dataset.n());
  params.outcome_probs = Simplex3(counts[0] / n, counts[1] / n, counts[2] / n);
  params.domain_names = dataset.bias().domain_names();
  params.n = dataset.n();
  params.seed = 0;
  return params;
}

Dataset generate_semisynthetic(const SemiSynthParams& params) {
  params.validate();
  const Eigen::Index n = params.n;
  const Eigen::Index d = static_cast<Eigen::Index>(params.bernoulli_rates.size());

  auto bias_eng = rng::engine(params.seed, rng::Stream::Bias);
  auto label_eng = rng::engine(params.seed, rng::Stream::Labels);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::MatrixXd bias(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      bias(i, j) =
          unif(bias_eng) < params.bernoulli_rates[static_cast<std::size_t>(j)]
              ? 1.0
              : 0.0;
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(n));
  const auto& p = params.outcome_probs;
  for (auto& y : labels) {
    y = sample_multinomial3(p[0], p[1], p[2], unif(label_eng));
  }

  std::vector<std::string> names =
      params.domain_names.empty() ? default_domain_names(d) : params.domain_names;
  return validate_dataset(bias, labels, std::move(names),
                          SemiSyntheticProvenance{params});
}

} // namespace mcma::synthgen
