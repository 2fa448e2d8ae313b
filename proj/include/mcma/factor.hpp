#pragma once

// Probabilistic PCA over the bias matrix, substitute-confounder inference,
// and posterior-predictive checking on held-out entries.
//
// Model: a_i ~ N(mu, W W' + sigma^2 I) with W a D x k loading matrix. Binary
// bias entries are treated as real values. Fitting maximizes the marginal
// likelihood of the observed entries by Adamax (the default configuration,
// learning rate 0.01); rows are grouped by their observed-entry pattern so
// holdout-masked fits share the same code path as full fits.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mcma/core.hpp"

namespace mcma::factor {

struct FitConfig {
  int max_iters = 2000;
  double tol = 1e-6;          // relative log-likelihood change
  double learning_rate = 0.01; // Adamax step size
  std::uint64_t seed = 0;
  double noise_floor = 1e-6;  // lower bound on sigma^2
  int min_iters = 20;         // iterations before the tol stop may trigger
};

struct FactorModel {
  Eigen::MatrixXd loadings; // D x k
  Eigen::VectorXd mean;     // D
  double noise_var = 1.0;   // sigma^2 > 0
  int latent_dim = 1;

  bool converged = true; // false = NonConvergence warning (max_iters hit)
  int iterations = 0;
  double final_loglik = 0.0;
  std::vector<double> loglik_trace; // value at the start of each iteration
};

struct HoldoutMask {
  // held(i,j) = true marks an entry excluded from fitting and scored by the
  // predictive check. Every row keeps at least one held and one observed
  // entry.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> held;
  double fraction = 0.2;
};

struct CheckResult {
  double score = 0.0; // in [0,1]
  int n_replications = 0;
  bool passed = false; // score > 0.5
};

// Full-matrix fit. Throws RankError when k >= D; DomainError on bad inputs.
// On hitting max_iters without meeting tol the model is returned with
// converged = false (never throws for that).
FactorModel fit_ppca(const Eigen::MatrixXd& data, int k, const FitConfig& config = {});
FactorModel fit_ppca(const BiasMatrix& bias, int k, const FitConfig& config = {});

// Fit using only entries not marked held in the mask.
FactorModel fit_ppca_masked(const Eigen::MatrixXd& data, const HoldoutMask& mask,
                            int k, const FitConfig& config = {});

// Closed-form posterior mean E[z | a] = (W'W + sigma^2 I)^{-1} W' (a - mu).
Eigen::VectorXd posterior_mean(const FactorModel& model, const Eigen::VectorXd& a);

// Row-wise posterior means, N x k.
Eigen::MatrixXd posterior_mean_all(const FactorModel& model,
                                   const Eigen::MatrixXd& data);

// Per row, round(fraction * D) entries are held, clamped to [1, D-1].
// Deterministic given seed. Throws DomainError when D < 2 or fraction is
// outside (0,1).
HoldoutMask make_holdout(Eigen::Index n, Eigen::Index d, double fraction,
                         std::uint64_t seed);
HoldoutMask make_holdout(const BiasMatrix& bias, double fraction, std::uint64_t seed);

// Posterior-predictive check. The model must have been fit on the observed
// (non-held) entries of `data`. The observed statistic is the log-likelihood
// of the held entries under the predictive distribution given the observed
// entries; each replication scores a fresh draw from that predictive
// distribution. score = mean of [t_rep < t_obs], ties (within 1e-12) counted
// as 0.5.
CheckResult predictive_check(const FactorModel& model, const Eigen::MatrixXd& data,
                             const HoldoutMask& mask, int n_replications,
                             std::uint64_t seed);

namespace detail {

// Observed-data log-likelihood and its gradient, exposed for testing the
// optimizer against finite differences. Parameters are packed as
// [vec(W) column-major, mu, log sigma^2].
struct PackedObjective {
  double loglik = 0.0;
  Eigen::VectorXd grad;
};
PackedObjective eval_packed_objective(
    const Eigen::MatrixXd& data,
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>* held, int k,
    const Eigen::VectorXd& packed);

} // namespace detail

} // namespace mcma::factor
