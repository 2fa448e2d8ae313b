#pragma once

// Metrics and the replicated-experiment harness.
//
// AUC is one-vs-rest with midpoint rank handling of ties, macro-averaged over
// the classes present in the labels. F1 is macro over all three classes with
// 0/0 defined as 0. The harness generates a fresh dataset per replication
// (seed = base_seed + rep), scores AUC/F1 on a stratified 80/20 split, and
// estimates the interventional summary on the full dataset.

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "mcma/classifiers.hpp"
#include "mcma/core.hpp"
#include "mcma/pipeline.hpp"

namespace mcma::eval {

double auc_macro_ovr(const AssociationLabels& labels, const Eigen::MatrixXd& probs);
double f1_macro(const AssociationLabels& labels, const std::vector<int>& predicted);
std::array<double, 3> abs_error(const Simplex3& truth, const Simplex3& estimate);

enum class Axis { WU, N };

struct SweepSpec {
  Axis axis = Axis::WU;
  std::vector<double> values; // non-empty, strictly increasing
  // Dataset source; axis values override w_u or n of the synthetic template.
  // Semi-synthetic sweeps support Axis::N only and carry no ground truth.
  std::variant<SyntheticParams, SemiSynthParams> source = SyntheticParams{};
  std::vector<classifiers::ClassifierKind> kinds = {
      classifiers::ClassifierKind::MNLogit};
  std::vector<pipeline::Mode> modes = {pipeline::Mode::Basic, pipeline::Mode::MCMA};
  pipeline::PipelineConfig pipeline_config; // force_check defaults to true here
  double test_fraction = 0.2;
  int threads = 0; // 0 = hardware concurrency

  void validate() const;
};

struct MetricReport {
  Axis axis = Axis::WU;
  double axis_value = 0.0;
  classifiers::ClassifierKind kind = classifiers::ClassifierKind::MNLogit;
  pipeline::Mode mode = pipeline::Mode::Basic;

  int n_replications = 0; // successful replications aggregated below
  int n_failed = 0;       // recorded failures (e.g. CheckFailed)

  double auc_mean = 0.0, auc_std = 0.0;
  double f1_mean = 0.0, f1_std = 0.0;
  bool has_ground_truth = false;
  std::array<double, 3> abs_err_mean{0.0, 0.0, 0.0};
  std::array<double, 3> abs_err_std{0.0, 0.0, 0.0};
  std::vector<double> check_scores; // MCMA, per successful replication

  // config echo
  Eigen::Index n = 0, d = 0;
  double w_u = 0.0;
  std::uint64_t base_seed = 0;

  nlohmann::json to_json() const;
};

// One report per sweep value x classifier x mode, in that nesting order.
std::vector<MetricReport> run_replicated(const SweepSpec& spec, int reps,
                                         std::uint64_t base_seed);

// Stratified train/test split; test gets round(test_fraction * n_c) rows of
// each class, clamped to [1, n_c - 1] for classes with n_c >= 2.
struct Split {
  std::vector<int> train;
  std::vector<int> test;
};
Split stratified_split(const AssociationLabels& labels, double test_fraction,
                       std::uint64_t seed);

// Flat CSV serialization of reports (one row each, fixed 6-decimal floats).
std::string reports_to_csv(const std::vector<MetricReport>& reports);

} // namespace mcma::eval
