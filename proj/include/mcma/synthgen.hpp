#pragma once

// Synthetic and semi-synthetic dataset generation.
//
// The synthetic generator draws a hidden confounder u_i ~ Unif(0,1) per RCT,
// bias bits a_ij | u_i ~ Bern(0.25 + 0.5 u_i), dataset-level weight vectors
// w_1 ~ Poisson(3), w_2 ~ Poisson(2), w_3 ~ Poisson(1) (componentwise over the
// D domains), and labels y_i ~ Multinomial(p_1, p_2, p_3) with
//
//   p_1 = (w_1'a_i u_i + 4 u_i) / l,   p_2 = (w_2'a_i) / l,
//   p_3 = (w_3'a_i + w_u u_i) / l,     l = sum of the three numerators.
//
// Rows drawn all-zero are resampled until at least one domain is high, so the
// constraint preserves the conditional distribution. Setting a = 0 makes the
// u factors cancel, giving the closed-form interventional summary
// (4, 0, w_u) / (4 + w_u) computed by ground_truth_summary.
//
// Randomness: one substream per purpose (confounder, bias, weights, labels),
// derived from the dataset seed; see rng.hpp.

#include <cstdint>
#include <utility>

#include "mcma/core.hpp"

namespace mcma::synthgen {

struct GroundTruth {
  Simplex3 summary;        // interventional class distribution at a = 0
  std::vector<double> u;   // hidden confounder draws, diagnostics only
};

// Draws a dataset from the confounded generative process. Pure function of
// params.seed. Throws DegenerateWeightsError when all three weight vectors
// are zero and w_u = 0.
std::pair<Dataset, GroundTruth> generate_synthetic(const SyntheticParams& params);

// Closed-form p(Y = c | do(a = 0)) for the synthetic process; the second
// component is exactly 0 and the result does not depend on u.
Simplex3 ground_truth_summary(double w_u);

// Column means and empirical class frequencies of an existing dataset,
// packaged as generation parameters (n and seed left at defaults).
SemiSynthParams estimate_semisynth_params(const Dataset& dataset);

// Independent per-domain Bernoulli bias bits and i.i.d. multinomial labels.
Dataset generate_semisynthetic(const SemiSynthParams& params);

namespace detail {

// Test hooks. force_zero_bias draws labels (and stores bias) as if a = 0;
// skip_min_one_high disables the all-zero-row resampling.
struct GenOptions {
  bool skip_min_one_high = false;
  bool force_zero_bias = false;
};

std::pair<Dataset, GroundTruth> generate_synthetic_with_options(
    const SyntheticParams& params, const GenOptions& options);

// Same process with caller-supplied weight vectors (length-d each).
std::pair<Dataset, GroundTruth> generate_with_weights(
    const SyntheticParams& params, const Eigen::VectorXd& w1,
    const Eigen::VectorXd& w2, const Eigen::VectorXd& w3,
    const GenOptions& options = {});

} // namespace detail

} // namespace mcma::synthgen
