#include "mcma/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "mcma/rng.hpp"
#include "mcma/synthgen.hpp"

namespace mcma::eval {

namespace {

// AUC for one class via midpoint-rank Mann-Whitney U.
double auc_one_vs_rest(const std::vector<double>& scores,
                       const std::vector<bool>& positive) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t t = i; t <= j; ++t) {
      if (positive[order[t]]) {
        rank_sum_pos += midrank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const std::size_t n_neg = n - n_pos;
  const double u = rank_sum_pos -
                   0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

const char* axis_name(Axis axis) { return axis == Axis::WU ? "w_u" : "n"; }

// Outcome of one replication for one (kind, mode) cell.
struct CellOutcome {
  bool ok = false;
  std::string failure;
  double auc = 0.0;
  double f1 = 0.0;
  bool has_abs_err = false;
  std::array<double, 3> abs_err{0.0, 0.0, 0.0};
  double check_score = 0.0;
  bool has_check = false;
};

struct RepTask {
  std::size_t value_index;
  int rep;
};

} // namespace

double auc_macro_ovr(const AssociationLabels& labels, const Eigen::MatrixXd& probs) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (probs.rows() != n || probs.cols() != kNumClasses) {
    throw DimensionMismatch("auc_macro_ovr: probs must be N x 3");
  }
  std::array<int, 3> counts{0, 0, 0};
  for (int y : labels.values()) counts[static_cast<std::size_t>(y)]++;
  const int present =
      (counts[0] > 0 ? 1 : 0) + (counts[1] > 0 ? 1 : 0) + (counts[2] > 0 ? 1 : 0);
  if (present < 2) {
    throw DegenerateLabelsError("auc_macro_ovr: at least two classes required");
  }

  double total = 0.0;
  int used = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) continue;
    std::vector<double> scores(static_cast<std::size_t>(n));
    std::vector<bool> positive(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      scores[static_cast<std::size_t>(i)] = probs(i, c);
      positive[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(i)] == c;
    }
    total += auc_one_vs_rest(scores, positive);
    ++used;
  }
  return total / static_cast<double>(used);
}

double f1_macro(const AssociationLabels& labels, const std::vector<int>& predicted) {
  if (labels.size() != predicted.size()) {
    throw DimensionMismatch("f1_macro: length mismatch");
  }
  for (int p : predicted) {
    if (p < 0 || p >= kNumClasses) throw DomainError("f1_macro: invalid class");
  }
  double total = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const bool truth = labels[i] == c;
      const bool pred = predicted[i] == c;
      if (truth && pred) tp += 1.0;
      if (!truth && pred) fp += 1.0;
      if (truth && !pred) fn += 1.0;
    }
    const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    total += f1;
  }
  return total / static_cast<double>(kNumClasses);
}

std::array<double, 3> abs_error(const Simplex3& truth, const Simplex3& estimate) {
  return {std::abs(truth[0] - estimate[0]), std::abs(truth[1] - estimate[1]),
          std::abs(truth[2] - estimate[2])};
}

Split stratified_split(const AssociationLabels& labels, double test_fraction,
                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DomainError("stratified_split: test_fraction must be in (0,1)");
  }
  auto eng = rng::engine(seed, rng::Stream::Split);
  Split split;
  for (int c = 0; c < kNumClasses; ++c) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) idx.push_back(static_cast<int>(i));
    }
    if (idx.empty()) continue;
    if (idx.size() == 1) {
      split.train.push_back(idx.front());
      continue;
    }
    std::shuffle(idx.begin(), idx.end(), eng);
    const auto n_c = static_cast<long>(idx.size());
    const long n_test = std::clamp<long>(
        std::lround(test_fraction * static_cast<double>(n_c)), 1L, n_c - 1);
    for (long t = 0; t < n_c; ++t) {
      (t < n_test ? split.test : split.train).push_back(idx[static_cast<std::size_t>(t)]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

void SweepSpec::validate() const {
  if (values.empty()) throw DomainError("SweepSpec: values must be non-empty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw DomainError("SweepSpec: values must be strictly increasing");
    }
  }
  if (kinds.empty() || modes.empty()) {
    throw DomainError("SweepSpec: kinds and modes must be non-empty");
  }
  if (std::holds_alternative<SemiSynthParams>(source) && axis == Axis::WU) {
    throw DomainError("SweepSpec: semi-synthetic sweeps support the N axis only");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DomainError("SweepSpec: test_fraction must be in (0,1)");
  }
}

namespace {

Dataset subset_dataset(const Dataset& dataset, const std::vector<int>& rows) {
  Eigen::MatrixXd bias(static_cast<Eigen::Index>(rows.size()), dataset.d());
  std::vector<int> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bias.row(static_cast<Eigen::Index>(i)) = dataset.bias().values().row(rows[i]);
    labels[i] = dataset.labels()[static_cast<std::size_t>(rows[i])];
  }
  return validate_dataset(bias, labels, dataset.bias().domain_names(),
                          dataset.provenance());
}

CellOutcome evaluate_cell(const Dataset& dataset, const Split& split,
                          const std::optional<Simplex3>& truth,
                          classifiers::ClassifierKind kind, pipeline::Mode mode,
                          const pipeline::PipelineConfig& config) {
  CellOutcome out;
  try {
    const Dataset train = subset_dataset(dataset, split.train);

    Eigen::MatrixXd test_probs(static_cast<Eigen::Index>(split.test.size()), 3);
    std::vector<int> test_labels(split.test.size());
    std::vector<int> test_pred(split.test.size());

    auto fill_test = [&](auto&& predict) {
      for (std::size_t t = 0; t < split.test.size(); ++t) {
        const Eigen::VectorXd row =
            dataset.bias().values().row(split.test[t]).transpose();
        const Simplex3 p = predict(row);
        test_probs(static_cast<Eigen::Index>(t), 0) = p[0];
        test_probs(static_cast<Eigen::Index>(t), 1) = p[1];
        test_probs(static_cast<Eigen::Index>(t), 2) = p[2];
        test_labels[t] = dataset.labels()[static_cast<std::size_t>(split.test[t])];
        test_pred[t] = classifiers::predicted_class(p);
      }
    };

    if (mode == pipeline::Mode::Basic) {
      const pipeline::BasicFit fit = pipeline::fit_basic(train, kind, config);
      fill_test([&](const Eigen::VectorXd& row) { return predict_basic(fit, row); });
      const pipeline::BasicFit full = pipeline::fit_basic(dataset, kind, config);
      const Simplex3 summary =
          predict_basic(full, Eigen::VectorXd::Zero(dataset.d()));
      if (truth.has_value()) {
        out.abs_err = abs_error(*truth, summary);
        out.has_abs_err = true;
      }
    } else {
      const pipeline::McmaFit fit = pipeline::fit_mcma(train, kind, config);
      fill_test([&](const Eigen::VectorXd& row) { return predict_mcma(fit, row); });
      const pipeline::McmaFit full = pipeline::fit_mcma(dataset, kind, config);
      const Simplex3 summary = pipeline::intervene_summary(
          full.outcome, full.z, full.screened_d, config.intervention);
      if (truth.has_value()) {
        out.abs_err = abs_error(*truth, summary);
        out.has_abs_err = true;
      }
      out.check_score = full.check.score;
      out.has_check = true;
    }

    const AssociationLabels labels(test_labels);
    out.auc = auc_macro_ovr(labels, test_probs);
    out.f1 = f1_macro(labels, test_pred);
    out.ok = true;
  } catch (const Error& e) {
    out.ok = false;
    out.failure = e.what();
  }
  return out;
}

} // namespace

std::vector<MetricReport> run_replicated(const SweepSpec& spec, int reps,
                                         std::uint64_t base_seed) {
  spec.validate();
  if (reps < 1) throw DomainError("run_replicated: reps >= 1 required");

  const std::size_t n_values = spec.values.size();
  const std::size_t n_kinds = spec.kinds.size();
  const std::size_t n_modes = spec.modes.size();

  // cell outcomes indexed by ((value, rep), kind, mode)
  std::vector<std::vector<CellOutcome>> outcomes(
      n_values * static_cast<std::size_t>(reps),
      std::vector<CellOutcome>(n_kinds * n_modes));

  std::vector<RepTask> tasks;
  tasks.reserve(outcomes.size());
  for (std::size_t v = 0; v < n_values; ++v) {
    for (int rep = 0; rep < reps; ++rep) tasks.push_back({v, rep});
  }

  auto run_task = [&](const RepTask& task) {
    const double value = spec.values[task.value_index];
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(task.rep);

    Dataset dataset = [&]() {
      if (std::holds_alternative<SyntheticParams>(spec.source)) {
        SyntheticParams params = std::get<SyntheticParams>(spec.source);
        if (spec.axis == Axis::WU) {
          params.w_u = value;
        } else {
          params.n = static_cast<Eigen::Index>(std::llround(value));
        }
        params.seed = seed;
        return synthgen::generate_synthetic(params).first;
      }
      SemiSynthParams params = std::get<SemiSynthParams>(spec.source);
      params.n = static_cast<Eigen::Index>(std::llround(value));
      params.seed = seed;
      return synthgen::generate_semisynthetic(params);
    }();

    std::optional<Simplex3> truth;
    if (std::holds_alternative<SyntheticParams>(spec.source)) {
      const double w_u = spec.axis == Axis::WU
                             ? value
                             : std::get<SyntheticParams>(spec.source).w_u;
      truth = synthgen::ground_truth_summary(w_u);
    }

    pipeline::PipelineConfig config = spec.pipeline_config;
    config.seed = rng::derive(seed, rng::Stream::Replication);
    const Split split =
        stratified_split(dataset.labels(), spec.test_fraction,
                         rng::derive(seed, rng::Stream::Split));

    auto& cell_row =
        outcomes[task.value_index * static_cast<std::size_t>(reps) +
                 static_cast<std::size_t>(task.rep)];
    for (std::size_t ki = 0; ki < n_kinds; ++ki) {
      for (std::size_t mi = 0; mi < n_modes; ++mi) {
        cell_row[ki * n_modes + mi] = evaluate_cell(
            dataset, split, truth, spec.kinds[ki], spec.modes[mi], config);
      }
    }
  };

  unsigned n_threads = spec.threads > 0
                           ? static_cast<unsigned>(spec.threads)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(tasks.size()));
  if (n_threads <= 1) {
    for (const RepTask& task : tasks) run_task(task);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
      workers.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          run_task(tasks[i]);
        }
      });
    }
    for (auto& w : workers) w.join();
  }

  // Deterministic reduce ordered by (sweep point, kind, mode, rep index).
  std::vector<MetricReport> reports;
  reports.reserve(n_values * n_kinds * n_modes);
  const bool synthetic = std::holds_alternative<SyntheticParams>(spec.source);
  for (std::size_t v = 0; v < n_values; ++v) {
    for (std::size_t ki = 0; ki < n_kinds; ++ki) {
      for (std::size_t mi = 0; mi < n_modes; ++mi) {
        MetricReport report;
        report.axis = spec.axis;
        report.axis_value = spec.values[v];
        report.kind = spec.kinds[ki];
        report.mode = spec.modes[mi];
        report.base_seed = base_seed;
        if (synthetic) {
          const auto& params = std::get<SyntheticParams>(spec.source);
          report.n = spec.axis == Axis::N
                         ? static_cast<Eigen::Index>(std::llround(spec.values[v]))
                         : params.n;
          report.d = params.d;
          report.w_u = spec.axis == Axis::WU ? spec.values[v] : params.w_u;
        } else {
          const auto& params = std::get<SemiSynthParams>(spec.source);
          report.n = static_cast<Eigen::Index>(std::llround(spec.values[v]));
          report.d = static_cast<Eigen::Index>(params.bernoulli_rates.size());
          report.w_u = std::numeric_limits<double>::quiet_NaN();
        }

        std::vector<double> aucs, f1s;
        std::array<std::vector<double>, 3> errs;
        for (int rep = 0; rep < reps; ++rep) {
          const CellOutcome& cell =
              outcomes[v * static_cast<std::size_t>(reps) +
                       static_cast<std::size_t>(rep)][ki * n_modes + mi];
          if (!cell.ok) {
            report.n_failed++;
            continue;
          }
          report.n_replications++;
          aucs.push_back(cell.auc);
          f1s.push_back(cell.f1);
          if (cell.has_abs_err) {
            for (int c = 0; c < 3; ++c) {
              errs[static_cast<std::size_t>(c)].push_back(
                  cell.abs_err[static_cast<std::size_t>(c)]);
            }
            report.has_ground_truth = true;
          }
          if (cell.has_check) report.check_scores.push_back(cell.check_score);
        }
        const MeanStd auc = mean_std(aucs);
        const MeanStd f1 = mean_std(f1s);
        report.auc_mean = auc.mean;
        report.auc_std = auc.std;
        report.f1_mean = f1.mean;
        report.f1_std = f1.std;
        for (int c = 0; c < 3; ++c) {
          const MeanStd e = mean_std(errs[static_cast<std::size_t>(c)]);
          report.abs_err_mean[static_cast<std::size_t>(c)] = e.mean;
          report.abs_err_std[static_cast<std::size_t>(c)] = e.std;
        }
        reports.push_back(std::move(report));
      }
    }
  }
  return reports;
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j;
  j["axis"] = axis_name(axis);
  j["axis_value"] = axis_value;
  j["classifier"] = classifiers::kind_name(kind);
  j["mode"] = pipeline::mode_name(mode);
  j["n"] = n;
  j["d"] = d;
  if (std::isfinite(w_u)) {
    j["w_u"] = w_u;
  } else {
    j["w_u"] = nullptr;
  }
  j["n_replications"] = n_replications;
  j["n_failed"] = n_failed;
  j["auc"] = {{"mean", auc_mean}, {"std", auc_std}};
  j["f1"] = {{"mean", f1_mean}, {"std", f1_std}};
  if (has_ground_truth) {
    j["abs_error"] = {
        {"mean", abs_err_mean},
        {"std", abs_err_std},
    };
  } else {
    j["abs_error"] = nullptr;
  }
  j["check_scores"] = check_scores;
  j["base_seed"] = base_seed;
  return j;
}

std::string reports_to_csv(const std::vector<MetricReport>& reports) {
  std::ostringstream os;
  os << "axis,axis_value,n,d,w_u,classifier,mode,replications,failed,"
        "auc_mean,auc_std,f1_mean,f1_std,"
        "abs_err_0_mean,abs_err_0_std,abs_err_1_mean,abs_err_1_std,"
        "abs_err_2_mean,abs_err_2_std,check_score_mean,base_seed\n";
  char buf[64];
  auto num = [&](double v) -> std::string {
    if (!std::isfinite(v)) return "";
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
  };
  for (const MetricReport& r : reports) {
    os << axis_name(r.axis) << ',' << num(r.axis_value) << ',' << r.n << ','
       << r.d << ',' << num(r.w_u) << ',' << classifiers::kind_name(r.kind)
       << ',' << pipeline::mode_name(r.mode) << ',' << r.n_replications << ','
       << r.n_failed << ',' << num(r.auc_mean) << ',' << num(r.auc_std) << ','
       << num(r.f1_mean) << ',' << num(r.f1_std);
    if (r.has_ground_truth) {
      for (int c = 0; c < 3; ++c) {
        os << ',' << num(r.abs_err_mean[static_cast<std::size_t>(c)]) << ','
           << num(r.abs_err_std[static_cast<std::size_t>(c)]);
      }
    } else {
      os << ",,,,,,";
    }
    if (r.check_scores.empty()) {
      os << ',';
    } else {
      const MeanStd cs = mean_std(r.check_scores);
      os << ',' << num(cs.mean);
    }
    os << ',' << r.base_seed << '\n';
  }
  return os.str();
}

} // namespace mcma::eval
