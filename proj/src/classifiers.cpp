#include "mcma/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mcma/rng.hpp"
#include "src/classifiers_internal.hpp"
#include "src/json_util.hpp"

namespace mcma::classifiers {

namespace internal {

Eigen::Vector3d softmax3(const Eigen::Vector3d& logits) {
  const double m = logits.maxCoeff();
  Eigen::Vector3d e = (logits.array() - m).exp();
  return e / e.sum();
}

} // namespace internal

namespace {

using internal::Degenerate;
using internal::Gbt;
using internal::Gnb;
using internal::Knn;
using internal::Mlp;
using internal::MnLogit;
using internal::softmax3;
using internal::Standardizer;

constexpr double kKnnPseudoCount = 1e-9;
constexpr double kGnbVarFloor = 1e-9;

Eigen::MatrixXd one_hot(const std::vector<int>& y) {
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(y.size()), kNumClasses);
  for (std::size_t i = 0; i < y.size(); ++i) {
    out(static_cast<Eigen::Index>(i), y[i]) = 1.0;
  }
  return out;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    p.row(i) = (logits.row(i).array() - m).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

double cross_entropy(const Eigen::MatrixXd& probs, const std::vector<int>& y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    loss -= std::log(std::max(probs(static_cast<Eigen::Index>(i), y[i]),
                              std::numeric_limits<double>::min()));
  }
  return loss / static_cast<double>(y.size());
}

// ---------------------------------------------------------------------------
// MNLogit: penalized cross-entropy, gradient descent with Armijo backtracking
// (monotone by construction).
// ---------------------------------------------------------------------------

MnLogit fit_mnlogit(const Eigen::MatrixXd& x, const std::vector<int>& y,
                    const TrainConfig& config, bool& converged,
                    std::vector<double>& trace) {
  const Eigen::Index f = x.cols();
  Eigen::VectorXd packed = Eigen::VectorXd::Zero(f * 3 + 3);

  auto eval = [&](const Eigen::VectorXd& p) {
    return detail::mnlogit_loss_grad(x, y, p, config.l2_penalty,
                                     config.l2_penalize_bias);
  };

  auto cur = eval(packed);
  trace.push_back(cur.loss);
  converged = false;
  double step = 1.0;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    const double g2 = cur.grad.squaredNorm();
    if (g2 == 0.0) {
      converged = true;
      break;
    }
    step = std::min(step * 2.0, 1e4);
    detail::LossGrad next;
    Eigen::VectorXd candidate;
    while (true) {
      candidate = packed - step * cur.grad;
      next = eval(candidate);
      if (next.loss <= cur.loss - 1e-4 * step * g2) break;
      step *= 0.5;
      if (step < 1e-14) { // gradient no longer yields descent: converged
        next = cur;
        candidate = packed;
        break;
      }
    }
    const double rel =
        std::abs(cur.loss - next.loss) / std::max(1.0, std::abs(cur.loss));
    packed = candidate;
    cur = next;
    trace.push_back(cur.loss);
    if (rel < config.tol) {
      converged = true;
      break;
    }
  }

  MnLogit model;
  model.weights = Eigen::Map<const Eigen::MatrixXd>(packed.data(), f, 3);
  model.bias = packed.segment(f * 3, 3);
  return model;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes
// ---------------------------------------------------------------------------

Gnb fit_gnb(const Eigen::MatrixXd& x, const std::vector<int>& y) {
  const Eigen::Index n = x.rows();
  const Eigen::Index f = x.cols();
  Gnb model;
  model.mean = Eigen::MatrixXd::Zero(3, f);
  model.var = Eigen::MatrixXd::Constant(3, f, kGnbVarFloor);
  std::array<double, 3> count{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < y.size(); ++i) {
    count[static_cast<std::size_t>(y[i])] += 1.0;
    model.mean.row(y[i]) += x.row(static_cast<Eigen::Index>(i));
  }
  for (int c = 0; c < 3; ++c) {
    model.prior[static_cast<std::size_t>(c)] =
        count[static_cast<std::size_t>(c)] / static_cast<double>(n);
    if (count[static_cast<std::size_t>(c)] > 0.0) {
      model.mean.row(c) /= count[static_cast<std::size_t>(c)];
    }
  }
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(3, f);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto diff =
        x.row(static_cast<Eigen::Index>(i)) - model.mean.row(y[i]);
    sq.row(y[i]) += diff.cwiseProduct(diff);
  }
  for (int c = 0; c < 3; ++c) {
    if (count[static_cast<std::size_t>(c)] > 0.0) {
      model.var.row(c) =
          (sq.row(c) / count[static_cast<std::size_t>(c)]).cwiseMax(kGnbVarFloor);
    }
  }
  return model;
}

Eigen::Vector3d predict_gnb(const Gnb& model, const Eigen::VectorXd& x) {
  Eigen::Vector3d log_post;
  for (int c = 0; c < 3; ++c) {
    if (model.prior[static_cast<std::size_t>(c)] <= 0.0) {
      log_post(c) = -std::numeric_limits<double>::infinity();
      continue;
    }
    double ll = std::log(model.prior[static_cast<std::size_t>(c)]);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double v = model.var(c, j);
      const double diff = x(j) - model.mean(c, j);
      ll += -0.5 * std::log(2.0 * M_PI * v) - diff * diff / (2.0 * v);
    }
    log_post(c) = ll;
  }
  const double m = log_post.maxCoeff();
  Eigen::Vector3d p;
  for (int c = 0; c < 3; ++c) {
    p(c) = std::isinf(log_post(c)) ? 0.0 : std::exp(log_post(c) - m);
  }
  return p / p.sum();
}

// ---------------------------------------------------------------------------
// kNN
// ---------------------------------------------------------------------------

Eigen::Vector3d predict_knn(const Knn& model, const Eigen::VectorXd& x) {
  const Eigen::Index n = model.train_x.rows();
  const int k = std::min<int>(model.k, static_cast<int>(n));
  // (squared distance, label, row) — label then row index break distance ties
  std::vector<std::tuple<double, int, Eigen::Index>> order;
  order.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d2 = (model.train_x.row(i).transpose() - x).squaredNorm();
    order.emplace_back(d2, model.train_y[static_cast<std::size_t>(i)], i);
  }
  std::partial_sort(order.begin(), order.begin() + k, order.end());
  Eigen::Vector3d counts = Eigen::Vector3d::Zero();
  for (int t = 0; t < k; ++t) counts(std::get<1>(order[static_cast<std::size_t>(t)])) += 1.0;
  counts.array() += kKnnPseudoCount;
  return counts / counts.sum();
}

// ---------------------------------------------------------------------------
// MLP: one hidden tanh layer, full-batch gradient descent with a fixed step.
// ---------------------------------------------------------------------------

Mlp fit_mlp(const Eigen::MatrixXd& x, const std::vector<int>& y,
            const TrainConfig& config, bool& converged,
            std::vector<double>& trace) {
  const Eigen::Index f = x.cols();
  const int h = config.mlp_hidden;
  const Eigen::Index n_params = f * h + h + h * 3 + 3;

  auto eng = rng::engine(config.seed, rng::Stream::Train);
  Eigen::VectorXd packed(n_params);
  const double a1 = std::sqrt(6.0 / static_cast<double>(f + h));
  const double a2 = std::sqrt(6.0 / static_cast<double>(h + 3));
  std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < f * h; ++i) packed(idx++) = u1(eng);
  for (int i = 0; i < h; ++i) packed(idx++) = 0.0;
  for (int i = 0; i < h * 3; ++i) packed(idx++) = u2(eng);
  for (int i = 0; i < 3; ++i) packed(idx++) = 0.0;

  double prev = std::numeric_limits<double>::infinity();
  converged = false;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    auto lg = detail::mlp_loss_grad(x, y, packed, h);
    trace.push_back(lg.loss);
    const double rel = std::abs(prev - lg.loss) / std::max(1.0, std::abs(prev));
    if (iter > 0 && rel < config.tol) {
      converged = true;
      break;
    }
    prev = lg.loss;
    packed -= config.mlp_learning_rate * lg.grad;
  }

  Mlp model;
  Eigen::Index off = 0;
  model.w1 = Eigen::Map<const Eigen::MatrixXd>(packed.data() + off, f, h);
  off += f * h;
  model.b1 = packed.segment(off, h);
  off += h;
  model.w2 = Eigen::Map<const Eigen::MatrixXd>(packed.data() + off, h, 3);
  off += h * 3;
  model.b2 = packed.segment(off, 3);
  return model;
}

Eigen::Vector3d predict_mlp(const Mlp& model, const Eigen::VectorXd& x) {
  const Eigen::VectorXd hidden = (model.w1.transpose() * x + model.b1).array().tanh();
  return softmax3(model.w2.transpose() * hidden + model.b2);
}

Eigen::Vector3d predict_variant(const internal::ModelVariant& model,
                                const Eigen::VectorXd& x) {
  return std::visit(
      [&](const auto& m) -> Eigen::Vector3d {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Degenerate>) {
          Eigen::Vector3d p = Eigen::Vector3d::Zero();
          p(m.cls) = 1.0;
          return p;
        } else if constexpr (std::is_same_v<T, MnLogit>) {
          return softmax3(m.weights.transpose() * x + m.bias);
        } else if constexpr (std::is_same_v<T, Knn>) {
          return predict_knn(m, x);
        } else if constexpr (std::is_same_v<T, Gnb>) {
          return predict_gnb(m, x);
        } else if constexpr (std::is_same_v<T, Mlp>) {
          return predict_mlp(m, x);
        } else {
          return softmax3(internal::gbt_scores(m, x));
        }
      },
      model);
}

Standardizer make_standardizer(const Eigen::MatrixXd& x,
                               const std::vector<int>& cols) {
  Standardizer s;
  if (cols.empty()) return s;
  s.active = true;
  s.shift = Eigen::VectorXd::Zero(x.cols());
  s.scale = Eigen::VectorXd::Ones(x.cols());
  for (int j : cols) {
    if (j < 0 || j >= x.cols()) {
      throw DomainError("standardize_cols: column index out of range");
    }
    const double mean = x.col(j).mean();
    const double var = (x.col(j).array() - mean).square().mean();
    s.shift(j) = mean;
    s.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

} // namespace

void TrainConfig::validate() const {
  if (max_iters < 1 || knn_k < 1 || mlp_hidden < 1 || gbt_rounds < 1 ||
      gbt_depth < 1) {
    throw DomainError("TrainConfig: counts must be >= 1");
  }
  if (tol <= 0.0 || mlp_learning_rate <= 0.0 || gbt_learning_rate <= 0.0 ||
      l2_penalty < 0.0 || gbt_lambda < 0.0) {
    throw DomainError("TrainConfig: rates must be positive");
  }
}

const char* kind_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::MNLogit: return "mnlogit";
    case ClassifierKind::KNN: return "knn";
    case ClassifierKind::GaussianNB: return "gnb";
    case ClassifierKind::MLP: return "mlp";
    case ClassifierKind::GBT: return "gbt";
  }
  throw DomainError("unknown classifier kind");
}

ClassifierKind kind_from_name(const std::string& name) {
  if (name == "mnlogit") return ClassifierKind::MNLogit;
  if (name == "knn") return ClassifierKind::KNN;
  if (name == "gnb" || name == "gaussian_nb") return ClassifierKind::GaussianNB;
  if (name == "mlp") return ClassifierKind::MLP;
  if (name == "gbt" || name == "xgboost") return ClassifierKind::GBT;
  throw DomainError("unknown classifier kind: " + name);
}

ClassifierKind OutcomeModel::kind() const { return impl_->kind; }
int OutcomeModel::input_dim() const { return impl_->input_dim; }
bool OutcomeModel::single_class() const { return impl_->single_class; }
bool OutcomeModel::converged() const { return impl_->converged; }
const std::vector<double>& OutcomeModel::loss_trace() const {
  return impl_->loss_trace;
}

Simplex3 OutcomeModel::predict_proba(const Eigen::VectorXd& features) const {
  if (!impl_) throw DomainError("predict_proba on an unfitted model");
  if (features.size() != impl_->input_dim) {
    throw DimensionMismatch("predict_proba: feature length does not match input_dim");
  }
  if (!features.allFinite()) throw DomainError("predict_proba: non-finite features");
  const Eigen::Vector3d p =
      predict_variant(impl_->model, impl_->standardizer.apply(features));
  return Simplex3(p(0), p(1), p(2));
}

Eigen::MatrixXd OutcomeModel::predict_proba_rows(const Eigen::MatrixXd& features) const {
  Eigen::MatrixXd out(features.rows(), 3);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const Simplex3 p = predict_proba(features.row(i).transpose());
    out(i, 0) = p[0];
    out(i, 1) = p[1];
    out(i, 2) = p[2];
  }
  return out;
}

OutcomeModel fit(ClassifierKind kind, const Eigen::MatrixXd& features,
                 const AssociationLabels& labels, const TrainConfig& config) {
  config.validate();
  const Eigen::Index n = features.rows();
  if (n != static_cast<Eigen::Index>(labels.size())) {
    throw DimensionMismatch("fit: features/labels row mismatch");
  }
  if (n < 3) throw DomainError("fit: N >= 3 required");
  if (!features.allFinite()) throw DomainError("fit: non-finite features");

  auto impl = std::make_shared<OutcomeModel::Impl>();
  impl->kind = kind;
  impl->input_dim = static_cast<int>(features.cols());

  const std::vector<int>& y = labels.values();
  const int first = y.front();
  if (std::all_of(y.begin(), y.end(), [&](int v) { return v == first; })) {
    impl->single_class = true;
    impl->model = Degenerate{first};
    return OutcomeModel(std::move(impl));
  }

  const bool scale_sensitive =
      kind == ClassifierKind::KNN || kind == ClassifierKind::MLP;
  if (scale_sensitive) {
    impl->standardizer = make_standardizer(features, config.standardize_cols);
  }
  const Eigen::MatrixXd x = impl->standardizer.apply_rows(features);

  switch (kind) {
    case ClassifierKind::MNLogit: {
      bool conv = true;
      impl->model = fit_mnlogit(x, y, config, conv, impl->loss_trace);
      impl->converged = conv;
      break;
    }
    case ClassifierKind::KNN: {
      Knn m;
      m.train_x = x;
      m.train_y = y;
      m.k = config.knn_k;
      impl->model = std::move(m);
      break;
    }
    case ClassifierKind::GaussianNB:
      impl->model = fit_gnb(x, y);
      break;
    case ClassifierKind::MLP: {
      bool conv = true;
      impl->model = fit_mlp(x, y, config, conv, impl->loss_trace);
      impl->converged = conv;
      break;
    }
    case ClassifierKind::GBT:
      impl->model = internal::fit_gbt(x, y, config, impl->loss_trace);
      break;
  }
  return OutcomeModel(std::move(impl));
}

int predicted_class(const Simplex3& probs) {
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Exposed loss/gradient evaluations (also the training objectives)
// ---------------------------------------------------------------------------

namespace detail {

LossGrad mnlogit_loss_grad(const Eigen::MatrixXd& x, const std::vector<int>& y,
                           const Eigen::VectorXd& packed, double l2,
                           bool penalize_bias) {
  const Eigen::Index n = x.rows();
  const Eigen::Index f = x.cols();
  Eigen::Map<const Eigen::MatrixXd> w(packed.data(), f, 3);
  Eigen::Map<const Eigen::Vector3d> b(packed.data() + f * 3);

  Eigen::MatrixXd logits = x * w;
  logits.rowwise() += b.transpose();
  const Eigen::MatrixXd p = softmax_rows(logits);

  LossGrad out;
  out.loss = cross_entropy(p, y) + 0.5 * l2 * w.squaredNorm();
  if (penalize_bias) out.loss += 0.5 * l2 * b.squaredNorm();

  const Eigen::MatrixXd r = (p - one_hot(y)) / static_cast<double>(n);
  out.grad.resize(packed.size());
  Eigen::Map<Eigen::MatrixXd> gw(out.grad.data(), f, 3);
  Eigen::Map<Eigen::Vector3d> gb(out.grad.data() + f * 3);
  gw = x.transpose() * r + l2 * w;
  gb = r.colwise().sum().transpose();
  if (penalize_bias) gb += l2 * b;
  return out;
}

LossGrad mlp_loss_grad(const Eigen::MatrixXd& x, const std::vector<int>& y,
                       const Eigen::VectorXd& packed, int hidden) {
  const Eigen::Index n = x.rows();
  const Eigen::Index f = x.cols();
  const int h = hidden;
  Eigen::Index off = 0;
  Eigen::Map<const Eigen::MatrixXd> w1(packed.data() + off, f, h);
  off += f * h;
  Eigen::Map<const Eigen::VectorXd> b1(packed.data() + off, h);
  off += h;
  Eigen::Map<const Eigen::MatrixXd> w2(packed.data() + off, h, 3);
  off += h * 3;
  Eigen::Map<const Eigen::Vector3d> b2(packed.data() + off);

  Eigen::MatrixXd a1 = x * w1;
  a1.rowwise() += b1.transpose();
  a1 = a1.array().tanh();
  Eigen::MatrixXd logits = a1 * w2;
  logits.rowwise() += b2.transpose();
  const Eigen::MatrixXd p = softmax_rows(logits);

  LossGrad out;
  out.loss = cross_entropy(p, y);

  const Eigen::MatrixXd r = (p - one_hot(y)) / static_cast<double>(n);
  const Eigen::MatrixXd da1 = r * w2.transpose();
  const Eigen::MatrixXd dz1 = da1.cwiseProduct((1.0 - a1.array().square()).matrix());

  out.grad.resize(packed.size());
  off = 0;
  Eigen::Map<Eigen::MatrixXd> gw1(out.grad.data() + off, f, h);
  off += f * h;
  Eigen::Map<Eigen::VectorXd> gb1(out.grad.data() + off, h);
  off += h;
  Eigen::Map<Eigen::MatrixXd> gw2(out.grad.data() + off, h, 3);
  off += h * 3;
  Eigen::Map<Eigen::Vector3d> gb2(out.grad.data() + off);
  gw1 = x.transpose() * dz1;
  gb1 = dz1.colwise().sum().transpose();
  gw2 = a1.transpose() * r;
  gb2 = r.colwise().sum().transpose();
  return out;
}

} // namespace detail

double gradient_check(ClassifierKind kind, int n, int f, std::uint64_t seed,
                      int mlp_hidden) {
  if (kind != ClassifierKind::MNLogit && kind != ClassifierKind::MLP) {
    throw DomainError("gradient_check: differentiable kinds are MNLogit and MLP");
  }
  if (n < 3 || f < 1) throw DomainError("gradient_check: n >= 3, f >= 1 required");

  auto eng = rng::engine(seed, rng::Stream::Train);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> label(0, 2);

  Eigen::MatrixXd x(n, f);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(eng);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (auto& v : y) v = label(eng);

  const Eigen::Index n_params = kind == ClassifierKind::MNLogit
                                    ? static_cast<Eigen::Index>(f) * 3 + 3
                                    : static_cast<Eigen::Index>(f) * mlp_hidden +
                                          mlp_hidden + mlp_hidden * 3 + 3;
  Eigen::VectorXd packed(n_params);
  for (Eigen::Index i = 0; i < n_params; ++i) packed(i) = 0.5 * normal(eng);

  auto eval = [&](const Eigen::VectorXd& p) {
    return kind == ClassifierKind::MNLogit
               ? detail::mnlogit_loss_grad(x, y, p, 1e-4, false)
               : detail::mlp_loss_grad(x, y, p, mlp_hidden);
  };

  const auto analytic = eval(packed);
  const double h = 1e-5;
  double max_rel = 0.0;
  for (Eigen::Index i = 0; i < n_params; ++i) {
    Eigen::VectorXd plus = packed, minus = packed;
    plus(i) += h;
    minus(i) -= h;
    const double numeric = (eval(plus).loss - eval(minus).loss) / (2.0 * h);
    const double a = analytic.grad(i);
    const double rel = std::abs(a - numeric) /
                       std::max({1e-5, std::abs(a), std::abs(numeric)});
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

nlohmann::json OutcomeModel::to_json() const {
  using jsonutil::mat_to_json;
  using jsonutil::vec_to_json;
  if (!impl_) throw DomainError("to_json on an unfitted model");
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = kind_name(impl_->kind);
  j["input_dim"] = impl_->input_dim;
  j["single_class"] = impl_->single_class;
  j["converged"] = impl_->converged;
  if (impl_->standardizer.active) {
    j["standardizer"] = {{"shift", vec_to_json(impl_->standardizer.shift)},
                         {"scale", vec_to_json(impl_->standardizer.scale)}};
  } else {
    j["standardizer"] = nullptr;
  }
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Degenerate>) {
          j["params"] = {{"degenerate_class", m.cls}};
        } else if constexpr (std::is_same_v<T, MnLogit>) {
          j["params"] = {{"weights", mat_to_json(m.weights)},
                         {"bias", vec_to_json(m.bias)}};
        } else if constexpr (std::is_same_v<T, Knn>) {
          j["params"] = {{"k", m.k},
                         {"train_x", mat_to_json(m.train_x)},
                         {"train_y", m.train_y}};
        } else if constexpr (std::is_same_v<T, Gnb>) {
          j["params"] = {{"prior", m.prior},
                         {"mean", mat_to_json(m.mean)},
                         {"var", mat_to_json(m.var)}};
        } else if constexpr (std::is_same_v<T, Mlp>) {
          j["params"] = {{"w1", mat_to_json(m.w1)},
                         {"b1", vec_to_json(m.b1)},
                         {"w2", mat_to_json(m.w2)},
                         {"b2", vec_to_json(m.b2)}};
        } else {
          j["params"] = internal::gbt_to_json(m);
        }
      },
      impl_->model);
  return j;
}

OutcomeModel OutcomeModel::from_json(const nlohmann::json& j) {
  using jsonutil::json_to_mat;
  using jsonutil::json_to_vec;
  auto impl = std::make_shared<Impl>();
  impl->kind = kind_from_name(j.at("kind").get<std::string>());
  impl->input_dim = j.at("input_dim").get<int>();
  impl->single_class = j.at("single_class").get<bool>();
  impl->converged = j.at("converged").get<bool>();
  if (!j.at("standardizer").is_null()) {
    impl->standardizer.active = true;
    impl->standardizer.shift = json_to_vec(j.at("standardizer").at("shift"));
    impl->standardizer.scale = json_to_vec(j.at("standardizer").at("scale"));
  }
  const nlohmann::json& p = j.at("params");
  if (impl->single_class || p.contains("degenerate_class")) {
    impl->single_class = true;
    impl->model = Degenerate{p.at("degenerate_class").get<int>()};
  } else {
    switch (impl->kind) {
      case ClassifierKind::MNLogit: {
        MnLogit m;
        m.weights = json_to_mat(p.at("weights"));
        m.bias = json_to_vec(p.at("bias"));
        impl->model = std::move(m);
        break;
      }
      case ClassifierKind::KNN: {
        Knn m;
        m.k = p.at("k").get<int>();
        m.train_x = json_to_mat(p.at("train_x"));
        m.train_y = p.at("train_y").get<std::vector<int>>();
        impl->model = std::move(m);
        break;
      }
      case ClassifierKind::GaussianNB: {
        Gnb m;
        m.prior = p.at("prior").get<std::array<double, 3>>();
        m.mean = json_to_mat(p.at("mean"));
        m.var = json_to_mat(p.at("var"));
        impl->model = std::move(m);
        break;
      }
      case ClassifierKind::MLP: {
        Mlp m;
        m.w1 = json_to_mat(p.at("w1"));
        m.b1 = json_to_vec(p.at("b1"));
        m.w2 = json_to_mat(p.at("w2"));
        m.b2 = json_to_vec(p.at("b2"));
        impl->model = std::move(m);
        break;
      }
      case ClassifierKind::GBT:
        impl->model = internal::gbt_from_json(p);
        break;
    }
  }
  return OutcomeModel(std::move(impl));
}

} // namespace mcma::classifiers
