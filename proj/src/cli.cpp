#include "mcma/cli.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcma/eval.hpp"
#include "mcma/io.hpp"
#include "mcma/pipeline.hpp"
#include "mcma/rng.hpp"
#include "mcma/synthgen.hpp"
#include "src/json_util.hpp"

namespace mcma::cli {

namespace {

using classifiers::ClassifierKind;
using pipeline::Mode;

const std::vector<ClassifierKind> kAllKinds = {
    ClassifierKind::MNLogit, ClassifierKind::KNN, ClassifierKind::GaussianNB,
    ClassifierKind::MLP, ClassifierKind::GBT};

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Flags shared by every command that runs the pipeline.
struct PipelineOpts {
  int k = 1;
  double screen_threshold = 0.95;
  double holdout_fraction = 0.2;
  int check_replications = 100;
  bool force = false;
  bool mean_z = false;
  std::uint64_t seed = 0;
  // factor-model fitting
  int ppca_max_iters = 2000;
  double ppca_tol = 1e-6;
  double ppca_learning_rate = 0.01;
  // classifier hyperparameters
  int knn_k = 5;
  int mlp_hidden = 16;
  double mlp_learning_rate = 0.05;
  double l2_penalty = 1e-4;
  int gbt_rounds = 100;
  double gbt_learning_rate = 0.1;
  int max_iters = 2000;

  pipeline::PipelineConfig to_config() const {
    pipeline::PipelineConfig cfg;
    cfg.k = k;
    cfg.screen_threshold = screen_threshold;
    cfg.holdout_fraction = holdout_fraction;
    cfg.check_replications = check_replications;
    cfg.force_check = force;
    cfg.intervention = mean_z ? pipeline::InterventionAverage::MeanZ
                              : pipeline::InterventionAverage::PerRct;
    cfg.seed = seed;
    cfg.ppca.max_iters = ppca_max_iters;
    cfg.ppca.tol = ppca_tol;
    cfg.ppca.learning_rate = ppca_learning_rate;
    cfg.train.knn_k = knn_k;
    cfg.train.mlp_hidden = mlp_hidden;
    cfg.train.mlp_learning_rate = mlp_learning_rate;
    cfg.train.l2_penalty = l2_penalty;
    cfg.train.gbt_rounds = gbt_rounds;
    cfg.train.gbt_learning_rate = gbt_learning_rate;
    cfg.train.max_iters = max_iters;
    return cfg;
  }

  nlohmann::json echo(const std::string& mode, const std::string& classifier) const {
    nlohmann::json j;
    j["mode"] = mode;
    j["classifier"] = classifier;
    j["k"] = k;
    j["screen_threshold"] = screen_threshold;
    j["holdout_fraction"] = holdout_fraction;
    j["check_replications"] = check_replications;
    j["force"] = force;
    j["intervention_average"] = mean_z ? "mean_z" : "per_rct";
    j["seed"] = seed;
    j["ppca"] = {{"max_iters", ppca_max_iters},
                 {"tol", ppca_tol},
                 {"learning_rate", ppca_learning_rate}};
    j["train"] = {{"knn_k", knn_k},
                  {"mlp_hidden", mlp_hidden},
                  {"mlp_learning_rate", mlp_learning_rate},
                  {"l2_penalty", l2_penalty},
                  {"gbt_rounds", gbt_rounds},
                  {"gbt_learning_rate", gbt_learning_rate},
                  {"max_iters", max_iters}};
    return j;
  }
};

void add_pipeline_flags(CLI::App* cmd, PipelineOpts& opts) {
  cmd->add_option("--k", opts.k, "Latent dimension of the substitute confounder");
  cmd->add_option("--screen-threshold", opts.screen_threshold,
                  "Drop bias domains with pairwise |r| at or above this");
  cmd->add_option("--holdout-fraction", opts.holdout_fraction,
                  "Fraction of entries held per RCT for the predictive check");
  cmd->add_option("--check-reps", opts.check_replications,
                  "Predictive-check replications");
  cmd->add_flag("--force", opts.force, "Proceed past a failed predictive check");
  cmd->add_flag("--intervene-mean-z", opts.mean_z,
                "Plug in the mean substitute confounder instead of averaging "
                "predictions over all of them");
  cmd->add_option("--seed", opts.seed, "Root seed")->envname("MCMA_SEED");
  cmd->add_option("--ppca-max-iters", opts.ppca_max_iters, "Factor fit iterations");
  cmd->add_option("--ppca-tol", opts.ppca_tol, "Factor fit convergence tolerance");
  cmd->add_option("--ppca-lr", opts.ppca_learning_rate, "Factor fit learning rate");
  cmd->add_option("--knn-k", opts.knn_k, "Neighbors for kNN");
  cmd->add_option("--mlp-hidden", opts.mlp_hidden, "MLP hidden width");
  cmd->add_option("--mlp-lr", opts.mlp_learning_rate, "MLP learning rate");
  cmd->add_option("--l2", opts.l2_penalty, "MNLogit L2 penalty");
  cmd->add_option("--gbt-rounds", opts.gbt_rounds, "Boosting rounds");
  cmd->add_option("--gbt-lr", opts.gbt_learning_rate, "Boosting learning rate");
  cmd->add_option("--max-iters", opts.max_iters, "Classifier iteration budget");
}

Dataset load_dataset(const std::string& path, const std::string& format_flag,
                     const std::vector<std::string>& expected_domains) {
  const io::Format format = format_flag.empty()
                                ? io::format_from_path(path)
                                : (format_flag == "csv" ? io::Format::Csv
                                                        : io::Format::Jsonl);
  return io::ingest(path, format, expected_domains);
}

void emit(const std::string& content, const std::string& out_path,
          std::ostream& out) {
  if (out_path.empty()) {
    out << content;
    if (content.empty() || content.back() != '\n') out << '\n';
  } else {
    io::write_text_file(out_path, content);
  }
}

std::vector<ClassifierKind> parse_kinds(const std::vector<std::string>& names) {
  if (names.empty()) return kAllKinds;
  std::vector<ClassifierKind> kinds;
  for (const auto& n : names) kinds.push_back(classifiers::kind_from_name(n));
  return kinds;
}

std::vector<Mode> parse_modes(const std::vector<std::string>& names) {
  if (names.empty()) return {Mode::Basic, Mode::MCMA};
  std::vector<Mode> modes;
  for (const auto& n : names) modes.push_back(pipeline::mode_from_name(n));
  return modes;
}

// fig3-shaped plot data: one row per sweep value, basic/mcma columns.
std::string plot_metric_csv(const std::vector<eval::MetricReport>& reports,
                            bool f1) {
  std::ostringstream os;
  os << "w_u,basic_mean,basic_std,mcma_mean,mcma_std\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  std::map<double, std::array<std::array<double, 2>, 2>> by_value;
  for (const auto& r : reports) {
    const int mi = r.mode == Mode::Basic ? 0 : 1;
    by_value[r.axis_value][static_cast<std::size_t>(mi)] = {
        f1 ? r.f1_mean : r.auc_mean, f1 ? r.f1_std : r.auc_std};
  }
  for (const auto& [value, cells] : by_value) {
    os << num(value) << ',' << num(cells[0][0]) << ',' << num(cells[0][1]) << ','
       << num(cells[1][0]) << ',' << num(cells[1][1]) << '\n';
  }
  return os.str();
}

// fig4-6-shaped plot data for one sweep value: per-classifier per-class
// absolute errors of the summary estimate.
std::string plot_abs_error_csv(const std::vector<eval::MetricReport>& reports,
                               double value) {
  std::ostringstream os;
  os << "classifier,class,basic_mean,basic_std,mcma_mean,mcma_std\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  for (ClassifierKind kind : kAllKinds) {
    const eval::MetricReport* basic = nullptr;
    const eval::MetricReport* mcma = nullptr;
    for (const auto& r : reports) {
      if (r.axis_value == value && r.kind == kind) {
        (r.mode == Mode::Basic ? basic : mcma) = &r;
      }
    }
    if (basic == nullptr || mcma == nullptr) continue;
    for (int c = 0; c < 3; ++c) {
      os << classifiers::kind_name(kind) << ',' << c << ','
         << num(basic->abs_err_mean[static_cast<std::size_t>(c)]) << ','
         << num(basic->abs_err_std[static_cast<std::size_t>(c)]) << ','
         << num(mcma->abs_err_mean[static_cast<std::size_t>(c)]) << ','
         << num(mcma->abs_err_std[static_cast<std::size_t>(c)]) << '\n';
    }
  }
  return os.str();
}

std::string path_join(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int run_generate_synthetic(const SyntheticParams& params, const std::string& out_path,
                           const std::string& truth_path, const std::string& fmt) {
  auto [dataset, truth] = synthgen::generate_synthetic(params);
  const io::Format format =
      fmt.empty() ? io::format_from_path(out_path)
                  : (fmt == "csv" ? io::Format::Csv : io::Format::Jsonl);
  io::write_dataset(dataset, out_path, format);
  std::string sidecar = truth_path;
  if (sidecar.empty()) {
    const auto dot = out_path.find_last_of('.');
    sidecar = (dot == std::string::npos ? out_path : out_path.substr(0, dot)) +
              ".truth.json";
  }
  io::write_text_file(sidecar,
                      io::ground_truth_to_json(truth, params).dump(2) + "\n");
  return 0;
}

int run_analyze(const Dataset& dataset, const std::string& mode_name,
                const std::string& classifier_name, const PipelineOpts& opts,
                const std::string& data_path, const std::string& out_path,
                std::ostream& out) {
  const Mode mode = pipeline::mode_from_name(mode_name);
  const ClassifierKind kind = classifiers::kind_from_name(classifier_name);
  const pipeline::PipelineConfig config = opts.to_config();

  const pipeline::PipelineResult result =
      mode == Mode::Basic ? pipeline::run_basic(dataset, kind, config)
                          : pipeline::run_mcma(dataset, kind, config);

  nlohmann::json report = result.to_json();
  report["schema_version"] = 1;
  report["generated_at"] = iso_timestamp();
  report["config"] = opts.echo(mode_name, classifier_name);
  report["data"] = {{"path", data_path},
                    {"n", dataset.n()},
                    {"d", dataset.d()},
                    {"domains", dataset.bias().domain_names()}};
  emit(report.dump(2), out_path, out);
  return 0;
}

int run_check(const Dataset& dataset, const PipelineOpts& opts,
              const std::string& data_path, const std::string& out_path,
              std::ostream& out) {
  const pipeline::PipelineConfig config = opts.to_config();
  auto [screened, screen] =
      pipeline::screen_correlated(dataset.bias(), config.screen_threshold);
  const factor::HoldoutMask mask = factor::make_holdout(
      screened.rows(), screened.cols(), config.holdout_fraction,
      rng::derive(config.seed, rng::Stream::Holdout));
  factor::FitConfig fit_cfg = config.ppca;
  fit_cfg.seed = rng::derive(config.seed, rng::Stream::PpcaInit, 1);
  const factor::FactorModel model =
      factor::fit_ppca_masked(screened.values(), mask, config.k, fit_cfg);
  const factor::CheckResult check = factor::predictive_check(
      model, screened.values(), mask, config.check_replications,
      rng::derive(config.seed, rng::Stream::Check));

  nlohmann::json report;
  report["schema_version"] = 1;
  report["generated_at"] = iso_timestamp();
  report["data"] = {{"path", data_path}, {"n", dataset.n()}, {"d", dataset.d()}};
  report["config"] = opts.echo("check", "");
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [i, j, r] : screen.dropped_pairs) pairs.push_back({i, j, r});
  report["screen"] = {{"kept", screen.kept}, {"dropped_pairs", std::move(pairs)}};
  report["check"] = {{"score", check.score},
                     {"n_replications", check.n_replications},
                     {"passed", check.passed}};
  report["factor_model"] = io::factor_model_to_json(model);
  emit(report.dump(2), out_path, out);
  return 0;
}

struct SweepOutputs {
  std::string csv_path;
  std::string json_path;
  std::string plot_dir;
};

int run_sweep(const eval::SweepSpec& spec, int reps, std::uint64_t base_seed,
              const SweepOutputs& outputs, std::ostream& out) {
  const std::vector<eval::MetricReport> reports =
      eval::run_replicated(spec, reps, base_seed);
  const std::string csv = eval::reports_to_csv(reports);
  emit(csv, outputs.csv_path, out);
  if (!outputs.json_path.empty()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) j.push_back(r.to_json());
    io::write_text_file(outputs.json_path, j.dump(2) + "\n");
  }
  if (!outputs.plot_dir.empty()) {
    if (spec.axis == eval::Axis::WU) {
      io::write_text_file(path_join(outputs.plot_dir, "fig3_auc.csv"),
                          plot_metric_csv(reports, false));
      io::write_text_file(path_join(outputs.plot_dir, "fig3_f1.csv"),
                          plot_metric_csv(reports, true));
    } else {
      for (double value : spec.values) {
        std::ostringstream name;
        name << "fig_abs_error_n" << static_cast<long long>(std::llround(value))
             << ".csv";
        io::write_text_file(path_join(outputs.plot_dir, name.str()),
                            plot_abs_error_csv(reports, value));
      }
    }
  }
  return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{
      "mcma: summary therapeutic association estimation across RCTs by "
      "multiple causal inference.\n"
      "Exit codes: 0 success, 1 usage error, 2 data error, 3 failed "
      "predictive check."};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file");

  // generate ----------------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "Generate a dataset file");
  generate->require_subcommand(1);

  auto* gen_syn = generate->add_subcommand("synthetic",
                                           "Confounded synthetic generator");
  SyntheticParams syn_params;
  std::string gen_out, gen_truth_out, gen_format;
  gen_syn->add_option("--n", syn_params.n, "Number of RCTs");
  gen_syn->add_option("--d", syn_params.d, "Number of bias domains");
  gen_syn->add_option("--wu", syn_params.w_u, "Confounding strength w_u");
  gen_syn->add_option("--seed", syn_params.seed, "Seed")->envname("MCMA_SEED");
  gen_syn->add_option("--out", gen_out, "Output dataset path")->required();
  gen_syn->add_option("--truth-out", gen_truth_out,
                      "Ground-truth sidecar path (default <out>.truth.json)");
  gen_syn->add_option("--format", gen_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  auto* gen_semi = generate->add_subcommand(
      "semisynthetic", "Bernoulli/multinomial generator parameterized from a "
                       "real dataset");
  std::string semi_from, semi_out, semi_format, semi_from_format;
  Eigen::Index semi_n = 100;
  std::uint64_t semi_seed = 0;
  gen_semi->add_option("--from", semi_from, "Source dataset to estimate from")
      ->required();
  gen_semi->add_option("--from-format", semi_from_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  gen_semi->add_option("--n", semi_n, "Number of RCTs to generate");
  gen_semi->add_option("--seed", semi_seed, "Seed")->envname("MCMA_SEED");
  gen_semi->add_option("--out", semi_out, "Output dataset path")->required();
  gen_semi->add_option("--format", semi_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  // analyze -------------------------------------------------------------
  auto* analyze = app.add_subcommand(
      "analyze", "Run the Basic or MCMA pipeline on a dataset, emit a JSON report");
  std::string an_mode = "mcma", an_classifier = "mnlogit";
  std::string an_data, an_format, an_out;
  std::vector<std::string> an_domains;
  PipelineOpts an_opts;
  analyze->add_option("--mode", an_mode, "basic or mcma")
      ->check(CLI::IsMember({"basic", "mcma"}));
  analyze->add_option("--classifier", an_classifier, "Outcome model kind")
      ->check(CLI::IsMember({"mnlogit", "knn", "gnb", "mlp", "gbt"}));
  analyze->add_option("data", an_data, "Dataset file")->required();
  analyze->add_option("--format", an_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  analyze->add_option("--domains", an_domains,
                      "Expected domain names, in order")
      ->delimiter(',');
  analyze->add_option("--out", an_out, "Write the report here instead of stdout");
  add_pipeline_flags(analyze, an_opts);

  // check ---------------------------------------------------------------
  auto* check = app.add_subcommand(
      "check", "Factor fit plus predictive check only, emit a JSON report");
  std::string ck_data, ck_format, ck_out;
  PipelineOpts ck_opts;
  check->add_option("data", ck_data, "Dataset file")->required();
  check->add_option("--format", ck_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  check->add_option("--out", ck_out, "Write the report here instead of stdout");
  add_pipeline_flags(check, ck_opts);

  // sweep -----------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "Replicated experiments over a w_u or N grid, emit CSV/JSON");
  std::string sw_axis = "wu";
  std::vector<double> sw_values;
  std::vector<std::string> sw_classifiers, sw_modes;
  std::string sw_from, sw_from_format;
  SyntheticParams sw_params;
  int sw_reps = 10;
  std::uint64_t sw_seed = 42;
  int sw_threads = 0;
  double sw_test_fraction = 0.2;
  bool sw_no_force = false;
  SweepOutputs sw_outputs;
  PipelineOpts sw_opts;
  sweep->add_option("--axis", sw_axis, "wu or n")
      ->check(CLI::IsMember({"wu", "n"}));
  sweep->add_option("--values", sw_values, "Grid values, ascending")
      ->delimiter(',')
      ->required();
  sweep->add_option("--n", sw_params.n, "RCTs per dataset (wu axis)");
  sweep->add_option("--d", sw_params.d, "Bias domains");
  sweep->add_option("--wu", sw_params.w_u, "Confounding strength (n axis)");
  sweep->add_option("--from", sw_from,
                    "Semi-synthetic source dataset (n axis only)");
  sweep->add_option("--from-format", sw_from_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  sweep->add_option("--classifiers", sw_classifiers,
                    "Subset of mnlogit,knn,gnb,mlp,gbt (default all)")
      ->delimiter(',');
  sweep->add_option("--modes", sw_modes, "Subset of basic,mcma (default both)")
      ->delimiter(',');
  sweep->add_option("--reps", sw_reps, "Replications per grid point");
  sweep->add_option("--base-seed", sw_seed, "Base seed; replication r uses base+r")
      ->envname("MCMA_SEED");
  sweep->add_option("--threads", sw_threads, "Worker threads (0 = all cores)");
  sweep->add_option("--test-fraction", sw_test_fraction,
                    "Held-out fraction for AUC/F1");
  sweep->add_flag("--no-force-check", sw_no_force,
                  "Record CheckFailed replications as failures instead of "
                  "proceeding");
  sweep->add_option("--out", sw_outputs.csv_path, "CSV output path");
  sweep->add_option("--json", sw_outputs.json_path, "JSON output path");
  sweep->add_option("--plot-data", sw_outputs.plot_dir,
                    "Directory for per-figure plot CSVs");
  add_pipeline_flags(sweep, sw_opts);

  // reproduce ---------------------------------------------------------------
  auto* reproduce = app.add_subcommand(
      "reproduce", "Canned experiment configurations (table1, table2, fig3, fig456)");
  std::string rp_target;
  std::string rp_out_dir = ".";
  std::string rp_data = "data/pde5_18rct.csv";
  std::uint64_t rp_seed = 42;
  int rp_threads = 0;
  reproduce->add_option("target", rp_target, "table1|table2|fig3|fig456")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "fig3", "fig456"}));
  reproduce->add_option("--seed", rp_seed, "Base seed")->envname("MCMA_SEED");
  reproduce->add_option("--out-dir", rp_out_dir, "Output directory");
  reproduce->add_option("--data", rp_data,
                        "18-RCT source dataset for table2");
  reproduce->add_option("--threads", rp_threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (gen_syn->parsed()) {
      return run_generate_synthetic(syn_params, gen_out, gen_truth_out, gen_format);
    }
    if (gen_semi->parsed()) {
      const Dataset source = load_dataset(semi_from, semi_from_format, {});
      SemiSynthParams params = synthgen::estimate_semisynth_params(source);
      params.n = semi_n;
      params.seed = semi_seed;
      const Dataset generated = synthgen::generate_semisynthetic(params);
      const io::Format format =
          semi_format.empty() ? io::format_from_path(semi_out)
                              : (semi_format == "csv" ? io::Format::Csv
                                                      : io::Format::Jsonl);
      io::write_dataset(generated, semi_out, format);
      return 0;
    }
    if (analyze->parsed()) {
      const Dataset dataset = load_dataset(an_data, an_format, an_domains);
      return run_analyze(dataset, an_mode, an_classifier, an_opts, an_data,
                         an_out, out);
    }
    if (check->parsed()) {
      const Dataset dataset = load_dataset(ck_data, ck_format, {});
      return run_check(dataset, ck_opts, ck_data, ck_out, out);
    }
    if (sweep->parsed()) {
      eval::SweepSpec spec;
      spec.axis = sw_axis == "wu" ? eval::Axis::WU : eval::Axis::N;
      spec.values = sw_values;
      if (sw_from.empty()) {
        spec.source = sw_params;
      } else {
        const Dataset source = load_dataset(sw_from, sw_from_format, {});
        spec.source = synthgen::estimate_semisynth_params(source);
      }
      spec.kinds = parse_kinds(sw_classifiers);
      spec.modes = parse_modes(sw_modes);
      spec.pipeline_config = sw_opts.to_config();
      spec.pipeline_config.force_check = !sw_no_force;
      spec.test_fraction = sw_test_fraction;
      spec.threads = sw_threads;
      return run_sweep(spec, sw_reps, sw_seed, sw_outputs, out);
    }
    if (reproduce->parsed()) {
      eval::SweepSpec spec;
      spec.pipeline_config.force_check = true;
      spec.threads = rp_threads;
      SweepOutputs outputs;
      if (rp_target == "table1") {
        spec.axis = eval::Axis::WU;
        spec.values = {2.0};
        spec.source = SyntheticParams{1000, 10, 2.0, 0};
        spec.kinds = kAllKinds;
        outputs.csv_path = path_join(rp_out_dir, "table1.csv");
        return run_sweep(spec, 10, rp_seed, outputs, out);
      }
      if (rp_target == "table2") {
        const Dataset source =
            io::ingest(rp_data, io::format_from_path(rp_data), {});
        spec.axis = eval::Axis::N;
        spec.values = {100.0};
        spec.source = synthgen::estimate_semisynth_params(source);
        spec.kinds = kAllKinds;
        outputs.csv_path = path_join(rp_out_dir, "table2.csv");
        return run_sweep(spec, 10, rp_seed, outputs, out);
      }
      if (rp_target == "fig3") {
        spec.axis = eval::Axis::WU;
        spec.values = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
        spec.source = SyntheticParams{1000, 10, 2.0, 0};
        spec.kinds = {ClassifierKind::MNLogit};
        outputs.csv_path = path_join(rp_out_dir, "fig3.csv");
        outputs.plot_dir = rp_out_dir;
        return run_sweep(spec, 10, rp_seed, outputs, out);
      }
      // fig456
      spec.axis = eval::Axis::N;
      spec.values = {100.0, 500.0, 1000.0};
      spec.source = SyntheticParams{1000, 10, 2.0, 0};
      spec.kinds = kAllKinds;
      outputs.csv_path = path_join(rp_out_dir, "fig456.csv");
      outputs.plot_dir = rp_out_dir;
      return run_sweep(spec, 10, rp_seed, outputs, out);
    }
  } catch (const pipeline::CheckFailedError& e) {
    err << "error: " << e.what()
        << " (rerun with --force to proceed past the check)\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

} // namespace mcma::cli
