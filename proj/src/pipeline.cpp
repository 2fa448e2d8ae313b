#include "mcma/pipeline.hpp"

#include <cmath>
#include <limits>

#include "mcma/rng.hpp"
#include "src/json_util.hpp"

namespace mcma::pipeline {

namespace {

// Pearson correlation of two columns; NaN for a constant column.
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean();
  const double mb = b.mean();
  const Eigen::ArrayXd da = a.array() - ma;
  const Eigen::ArrayXd db = b.array() - mb;
  const double sa = std::sqrt(da.square().sum());
  const double sb = std::sqrt(db.square().sum());
  if (sa == 0.0 || sb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp((da * db).sum() / (sa * sb), -1.0, 1.0);
}

Eigen::VectorXd augmented_row(const Eigen::VectorXd& screened_row,
                              const Eigen::VectorXd& z) {
  Eigen::VectorXd row(screened_row.size() + z.size());
  row << screened_row, z;
  return row;
}

} // namespace

const char* mode_name(Mode mode) {
  return mode == Mode::Basic ? "basic" : "mcma";
}

Mode mode_from_name(const std::string& name) {
  if (name == "basic") return Mode::Basic;
  if (name == "mcma") return Mode::MCMA;
  throw DomainError("unknown mode: " + name);
}

void PipelineConfig::validate() const {
  if (k < 1) throw DomainError("PipelineConfig: k >= 1 required");
  if (!(screen_threshold > 0.0 && screen_threshold <= 1.0)) {
    throw DomainError("PipelineConfig: screen_threshold must be in (0,1]");
  }
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw DomainError("PipelineConfig: holdout_fraction must be in (0,1)");
  }
  if (check_replications < 1) {
    throw DomainError("PipelineConfig: check_replications >= 1 required");
  }
  train.validate();
}

std::pair<BiasMatrix, ScreenReport> screen_correlated(const BiasMatrix& bias,
                                                      double threshold) {
  if (bias.cols() < 2) throw DomainError("screen_correlated: D >= 2 required");
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw DomainError("screen_correlated: threshold must be in (0,1]");
  }
  const Eigen::MatrixXd& values = bias.values();
  const auto d = static_cast<int>(values.cols());

  ScreenReport report;
  std::vector<bool> dropped(static_cast<std::size_t>(d), false);

  // Constant columns carry no correlation information; drop them first with
  // the sentinel value.
  for (int j = 0; j < d; ++j) {
    const double v0 = values(0, j);
    if ((values.col(j).array() == v0).all()) {
      dropped[static_cast<std::size_t>(j)] = true;
      report.dropped_pairs.emplace_back(j, j, 1.0);
    }
  }

  for (int i = 0; i < d; ++i) {
    if (dropped[static_cast<std::size_t>(i)]) continue;
    for (int j = i + 1; j < d; ++j) {
      if (dropped[static_cast<std::size_t>(j)]) continue;
      const double r = pearson(values.col(i), values.col(j));
      if (std::abs(r) >= threshold) {
        dropped[static_cast<std::size_t>(j)] = true;
        report.dropped_pairs.emplace_back(i, j, r);
      }
    }
  }

  for (int j = 0; j < d; ++j) {
    if (!dropped[static_cast<std::size_t>(j)]) report.kept.push_back(j);
  }
  if (report.kept.size() < 2) {
    throw AllDroppedError("screening left fewer than 2 bias domains");
  }
  return {bias.select_columns(report.kept), std::move(report)};
}

BasicFit fit_basic(const Dataset& dataset, classifiers::ClassifierKind kind,
                   const PipelineConfig& config) {
  config.validate();
  classifiers::TrainConfig train = config.train;
  train.seed = rng::derive(config.seed, rng::Stream::Train);
  BasicFit fit;
  fit.input_dim = dataset.d();
  fit.outcome =
      classifiers::fit(kind, dataset.bias().values(), dataset.labels(), train);
  return fit;
}

McmaFit fit_mcma(const Dataset& dataset, classifiers::ClassifierKind kind,
                 const PipelineConfig& config) {
  config.validate();
  if (dataset.n() < 10) throw DomainError("run_mcma: N >= 10 required");

  auto [screened, report] = screen_correlated(dataset.bias(), config.screen_threshold);
  const Eigen::MatrixXd& a = screened.values();

  // Holdout-masked fit feeds the predictive check; the model used downstream
  // is refit on the full screened matrix.
  const factor::HoldoutMask mask = factor::make_holdout(
      a.rows(), a.cols(), config.holdout_fraction,
      rng::derive(config.seed, rng::Stream::Holdout));

  factor::FitConfig masked_cfg = config.ppca;
  masked_cfg.seed = rng::derive(config.seed, rng::Stream::PpcaInit, 1);
  const factor::FactorModel held_model =
      factor::fit_ppca_masked(a, mask, config.k, masked_cfg);

  const factor::CheckResult check = factor::predictive_check(
      held_model, a, mask, config.check_replications,
      rng::derive(config.seed, rng::Stream::Check));
  if (!check.passed && !config.force_check) throw CheckFailedError(check);

  factor::FitConfig full_cfg = config.ppca;
  full_cfg.seed = rng::derive(config.seed, rng::Stream::PpcaInit, 2);
  factor::FactorModel full_model = factor::fit_ppca(a, config.k, full_cfg);

  McmaFit fit;
  fit.screen = std::move(report);
  fit.check = check;
  fit.screened_d = a.cols();
  fit.z = factor::posterior_mean_all(full_model, a);
  fit.factor_model = std::move(full_model);

  Eigen::MatrixXd features(a.rows(), a.cols() + config.k);
  features << a, fit.z;

  classifiers::TrainConfig train = config.train;
  train.seed = rng::derive(config.seed, rng::Stream::Train);
  // z columns are the real-valued ones; scale-sensitive kinds standardize them
  train.standardize_cols.clear();
  for (int c = 0; c < config.k; ++c) {
    train.standardize_cols.push_back(static_cast<int>(a.cols()) + c);
  }
  fit.outcome = classifiers::fit(kind, features, dataset.labels(), train);
  return fit;
}

Simplex3 predict_basic(const BasicFit& fit, const Eigen::VectorXd& bias_row) {
  if (bias_row.size() != fit.input_dim) {
    throw DimensionMismatch("predict_basic: row width mismatch");
  }
  return fit.outcome.predict_proba(bias_row);
}

Simplex3 predict_mcma(const McmaFit& fit, const Eigen::VectorXd& bias_row) {
  Eigen::VectorXd screened(static_cast<Eigen::Index>(fit.screen.kept.size()));
  for (std::size_t c = 0; c < fit.screen.kept.size(); ++c) {
    const int j = fit.screen.kept[c];
    if (j >= bias_row.size()) {
      throw DimensionMismatch("predict_mcma: row width mismatch");
    }
    screened(static_cast<Eigen::Index>(c)) = bias_row(j);
  }
  const Eigen::VectorXd z = factor::posterior_mean(fit.factor_model, screened);
  return fit.outcome.predict_proba(augmented_row(screened, z));
}

SummaryEstimate intervene_summary(const classifiers::OutcomeModel& outcome,
                                  const Eigen::MatrixXd& z_all,
                                  Eigen::Index screened_d,
                                  InterventionAverage average) {
  if (outcome.input_dim() != screened_d + z_all.cols()) {
    throw DimensionMismatch("intervene_summary: outcome input_dim != D + k");
  }
  if (z_all.rows() < 1) throw DomainError("intervene_summary: empty z");
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(screened_d);

  if (average == InterventionAverage::MeanZ) {
    const Eigen::VectorXd z_mean = z_all.colwise().mean();
    return outcome.predict_proba(augmented_row(zeros, z_mean));
  }

  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (Eigen::Index i = 0; i < z_all.rows(); ++i) {
    const Simplex3 p =
        outcome.predict_proba(augmented_row(zeros, z_all.row(i).transpose()));
    acc += Eigen::Vector3d(p[0], p[1], p[2]);
  }
  acc /= static_cast<double>(z_all.rows());
  return Simplex3(acc(0), acc(1), acc(2));
}

PipelineResult run_basic(const Dataset& dataset, classifiers::ClassifierKind kind,
                         const PipelineConfig& config) {
  const BasicFit fit = fit_basic(dataset, kind, config);
  PipelineResult result;
  result.mode = Mode::Basic;
  result.per_rct_probs = fit.outcome.predict_proba_rows(dataset.bias().values());
  result.summary =
      fit.outcome.predict_proba(Eigen::VectorXd::Zero(dataset.d()));
  result.factor_model_json = nullptr;
  result.outcome_model_json = fit.outcome.to_json();
  return result;
}

PipelineResult run_mcma(const Dataset& dataset, classifiers::ClassifierKind kind,
                        const PipelineConfig& config) {
  const McmaFit fit = fit_mcma(dataset, kind, config);

  PipelineResult result;
  result.mode = Mode::MCMA;
  result.check = fit.check;
  result.screen = fit.screen;

  const Eigen::MatrixXd& a = dataset.bias().values();
  Eigen::MatrixXd features(a.rows(), fit.screened_d + fit.z.cols());
  for (std::size_t c = 0; c < fit.screen.kept.size(); ++c) {
    features.col(static_cast<Eigen::Index>(c)) = a.col(fit.screen.kept[c]);
  }
  features.rightCols(fit.z.cols()) = fit.z;
  result.per_rct_probs = fit.outcome.predict_proba_rows(features);

  result.summary =
      intervene_summary(fit.outcome, fit.z, fit.screened_d, config.intervention);

  nlohmann::json fm;
  fm["loadings"] = jsonutil::mat_to_json(fit.factor_model.loadings);
  fm["mean"] = jsonutil::vec_to_json(fit.factor_model.mean);
  fm["noise_var"] = fit.factor_model.noise_var;
  fm["k"] = fit.factor_model.latent_dim;
  fm["converged"] = fit.factor_model.converged;
  result.factor_model_json = std::move(fm);
  result.outcome_model_json = fit.outcome.to_json();
  return result;
}

nlohmann::json PipelineResult::to_json() const {
  nlohmann::json j;
  j["mode"] = mode_name(mode);
  j["summary"] = {summary[0], summary[1], summary[2]};
  if (check.has_value()) {
    j["check"] = {{"score", check->score},
                  {"n_replications", check->n_replications},
                  {"passed", check->passed}};
  } else {
    j["check"] = nullptr;
  }
  if (screen.has_value()) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [i, k2, r] : screen->dropped_pairs) {
      pairs.push_back({i, k2, r});
    }
    j["screen"] = {{"kept", screen->kept}, {"dropped_pairs", std::move(pairs)}};
  } else {
    j["screen"] = nullptr;
  }
  j["per_rct_probs"] = jsonutil::mat_to_json(per_rct_probs);
  j["models"] = {{"factor", factor_model_json}, {"outcome", outcome_model_json}};
  return j;
}

} // namespace mcma::pipeline
