#pragma once

// End-to-end orchestration: correlation screening, factor fitting with a
// predictive check, confounder augmentation, outcome fitting, and the
// interventional summary at a = 0. The Basic path fits the classifier on the
// raw bias matrix and predicts at the zero vector; the MCMA path augments
// each RCT's screened bias row with its substitute confounder and averages
// the prediction at a = 0 over the inferred confounders.

#include <cstdint>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "mcma/classifiers.hpp"
#include "mcma/core.hpp"
#include "mcma/factor.hpp"

namespace mcma::pipeline {

enum class Mode { Basic, MCMA };

const char* mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

struct ScreenReport {
  std::vector<int> kept; // indices into the original D domains
  // (kept_index, dropped_index, correlation); constant columns are recorded
  // as (j, j, 1.0).
  std::vector<std::tuple<int, int, double>> dropped_pairs;
};

enum class InterventionAverage { PerRct, MeanZ };

struct PipelineConfig {
  int k = 1;                      // latent dimension
  double screen_threshold = 0.95; // drop pairs with |r| >= threshold
  double holdout_fraction = 0.2;
  int check_replications = 100;
  bool force_check = false; // proceed past a failed predictive check
  InterventionAverage intervention = InterventionAverage::PerRct;
  std::uint64_t seed = 0;
  factor::FitConfig ppca;
  classifiers::TrainConfig train;

  void validate() const;
};

// Raised when the predictive check fails and force_check is off.
struct CheckFailedError : Error {
  explicit CheckFailedError(const factor::CheckResult& r)
      : Error("predictive check failed with score " + std::to_string(r.score)),
        result(r) {}
  factor::CheckResult result;
};

struct PipelineResult {
  Mode mode = Mode::Basic;
  SummaryEstimate summary{1.0, 0.0, 0.0};
  std::optional<factor::CheckResult> check;
  std::optional<ScreenReport> screen;
  Eigen::MatrixXd per_rct_probs; // N x 3, on the training data
  nlohmann::json factor_model_json;  // null for Basic
  nlohmann::json outcome_model_json;

  nlohmann::json to_json() const;
};

// Screening: pairwise Pearson correlation over columns; for each pair with
// |r| >= threshold the higher-index column is dropped (greedy, ascending
// order); constant columns are dropped first with sentinel correlation 1.0.
// Throws AllDroppedError when fewer than two columns survive.
std::pair<BiasMatrix, ScreenReport> screen_correlated(const BiasMatrix& bias,
                                                      double threshold);

// Fitted-state bundles, reusable for out-of-sample prediction.
struct BasicFit {
  classifiers::OutcomeModel outcome;
  Eigen::Index input_dim = 0;
};

struct McmaFit {
  ScreenReport screen;
  factor::FactorModel factor_model;   // fit on the full screened matrix
  factor::CheckResult check;          // from the holdout-masked fit
  Eigen::MatrixXd z;                  // N x k training substitute confounders
  classifiers::OutcomeModel outcome;  // fit on [screened a, z]
  Eigen::Index screened_d = 0;
};

BasicFit fit_basic(const Dataset& dataset, classifiers::ClassifierKind kind,
                   const PipelineConfig& config);
McmaFit fit_mcma(const Dataset& dataset, classifiers::ClassifierKind kind,
                 const PipelineConfig& config);

// Per-row prediction from a full-width bias row (screening applied inside
// the MCMA variant; z inferred from the fitted factor model).
Simplex3 predict_basic(const BasicFit& fit, const Eigen::VectorXd& bias_row);
Simplex3 predict_mcma(const McmaFit& fit, const Eigen::VectorXd& bias_row);

// Average over rows of predict_proba([0 ... 0, z_i]); the empirical
// expectation over substitute confounders of the conditional at a = 0.
SummaryEstimate intervene_summary(const classifiers::OutcomeModel& outcome,
                                  const Eigen::MatrixXd& z_all,
                                  Eigen::Index screened_d,
                                  InterventionAverage average = InterventionAverage::PerRct);

PipelineResult run_basic(const Dataset& dataset, classifiers::ClassifierKind kind,
                         const PipelineConfig& config);
PipelineResult run_mcma(const Dataset& dataset, classifiers::ClassifierKind kind,
                        const PipelineConfig& config);

} // namespace mcma::pipeline
