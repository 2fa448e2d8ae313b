#include "mcma/factor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Cholesky>

#include "mcma/rng.hpp"

namespace mcma::factor {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Rows sharing an observed-entry pattern contribute through the sufficient
// statistics (n, sum a, sum a a') restricted to the observed columns.
struct PatternGroup {
  std::vector<int> observed;
  double count = 0.0;
  Eigen::VectorXd sum;    // d_o
  Eigen::MatrixXd sum_sq; // d_o x d_o
};

struct ObjectiveContext {
  Eigen::Index d = 0;
  int k = 0;
  std::vector<PatternGroup> groups;
  double n_rows = 0.0;

  static ObjectiveContext build(const Eigen::MatrixXd& data,
                                const BoolMatrix* held, int k) {
    ObjectiveContext ctx;
    ctx.d = data.cols();
    ctx.k = k;
    ctx.n_rows = static_cast<double>(data.rows());

    std::map<std::vector<bool>, std::size_t> index;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      std::vector<bool> pattern(static_cast<std::size_t>(ctx.d), true);
      if (held != nullptr) {
        for (Eigen::Index j = 0; j < ctx.d; ++j) {
          pattern[static_cast<std::size_t>(j)] = !(*held)(i, j);
        }
      }
      if (std::none_of(pattern.begin(), pattern.end(), [](bool b) { return b; })) {
        throw DomainError("fit_ppca: a row has no observed entries");
      }
      auto [it, inserted] = index.try_emplace(pattern, ctx.groups.size());
      if (inserted) {
        PatternGroup g;
        for (Eigen::Index j = 0; j < ctx.d; ++j) {
          if (pattern[static_cast<std::size_t>(j)]) g.observed.push_back(static_cast<int>(j));
        }
        const auto d_o = static_cast<Eigen::Index>(g.observed.size());
        g.sum = Eigen::VectorXd::Zero(d_o);
        g.sum_sq = Eigen::MatrixXd::Zero(d_o, d_o);
        ctx.groups.push_back(std::move(g));
      }
      PatternGroup& g = ctx.groups[it->second];
      Eigen::VectorXd a(static_cast<Eigen::Index>(g.observed.size()));
      for (std::size_t c = 0; c < g.observed.size(); ++c) {
        a(static_cast<Eigen::Index>(c)) = data(i, g.observed[c]);
      }
      g.count += 1.0;
      g.sum += a;
      g.sum_sq += a * a.transpose();
    }
    return ctx;
  }

  // packed = [vec(W) column-major, mu, log sigma^2]
  detail::PackedObjective eval(const Eigen::VectorXd& packed) const {
    const Eigen::Index wd = d * k;
    Eigen::Map<const Eigen::MatrixXd> W(packed.data(), d, k);
    Eigen::Map<const Eigen::VectorXd> mu(packed.data() + wd, d);
    const double log_s2 = packed(wd + d);
    const double s2 = std::exp(log_s2);

    detail::PackedObjective out;
    out.grad = Eigen::VectorXd::Zero(packed.size());
    Eigen::Map<Eigen::MatrixXd> gW(out.grad.data(), d, k);
    Eigen::Map<Eigen::VectorXd> gMu(out.grad.data() + wd, d);
    double g_s2 = 0.0;

    for (const PatternGroup& g : groups) {
      const auto d_o = static_cast<Eigen::Index>(g.observed.size());
      Eigen::MatrixXd Wo(d_o, k);
      Eigen::VectorXd muo(d_o);
      for (Eigen::Index c = 0; c < d_o; ++c) {
        Wo.row(c) = W.row(g.observed[static_cast<std::size_t>(c)]);
        muo(c) = mu(g.observed[static_cast<std::size_t>(c)]);
      }

      Eigen::MatrixXd C = Wo * Wo.transpose();
      C.diagonal().array() += s2;
      Eigen::LLT<Eigen::MatrixXd> llt(C);
      if (llt.info() != Eigen::Success) {
        throw SingularMatrixError("fit_ppca: covariance factorization failed");
      }
      const Eigen::MatrixXd P =
          llt.solve(Eigen::MatrixXd::Identity(d_o, d_o));
      double logdet = 0.0;
      for (Eigen::Index c = 0; c < d_o; ++c) {
        logdet += 2.0 * std::log(llt.matrixLLT()(c, c));
      }

      const Eigen::VectorXd abar = g.sum / g.count;
      Eigen::MatrixXd M = g.sum_sq / g.count;
      M.noalias() -= muo * abar.transpose();
      M.noalias() -= abar * muo.transpose();
      M.noalias() += muo * muo.transpose();

      const double tr_pm = P.cwiseProduct(M).sum();
      out.loglik -= 0.5 * g.count *
                    (static_cast<double>(d_o) * kLog2Pi + logdet + tr_pm);

      // d loglik / d C_oo, symmetric
      Eigen::MatrixXd G = P * M * P;
      G -= P;
      G *= 0.5 * g.count;

      const Eigen::MatrixXd gWo = 2.0 * (G * Wo);
      const Eigen::VectorXd gMuo = g.count * (P * (abar - muo));
      for (Eigen::Index c = 0; c < d_o; ++c) {
        gW.row(g.observed[static_cast<std::size_t>(c)]) += gWo.row(c);
        gMu(g.observed[static_cast<std::size_t>(c)]) += gMuo(c);
      }
      g_s2 += G.trace();
    }
    out.grad(wd + d) = g_s2 * s2; // chain rule through log sigma^2
    return out;
  }
};

FactorModel fit_ppca_impl(const Eigen::MatrixXd& data, const BoolMatrix* held,
                          int k, const FitConfig& config) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (k >= d) throw RankError("fit_ppca: latent dimension k must be < D");
  if (k < 1) throw DomainError("fit_ppca: k >= 1 required");
  if (n < 2) throw DomainError("fit_ppca: N >= 2 required");
  if (!data.allFinite()) throw DomainError("fit_ppca: non-finite data");
  if (held != nullptr && (held->rows() != n || held->cols() != d)) {
    throw DimensionMismatch("fit_ppca: mask shape does not match data");
  }
  if (config.max_iters < 1 || config.tol <= 0.0 || config.learning_rate <= 0.0) {
    throw DomainError("fit_ppca: invalid config");
  }

  const ObjectiveContext ctx = ObjectiveContext::build(data, held, k);

  // Initialization: mu at the observed column means, small random loadings,
  // sigma^2 at half the mean observed column variance.
  Eigen::VectorXd col_sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd col_sumsq = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd col_count = Eigen::VectorXd::Zero(d);
  for (const PatternGroup& g : ctx.groups) {
    for (std::size_t c = 0; c < g.observed.size(); ++c) {
      const int j = g.observed[c];
      col_sum(j) += g.sum(static_cast<Eigen::Index>(c));
      col_sumsq(j) += g.sum_sq(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c));
      col_count(j) += g.count;
    }
  }
  Eigen::VectorXd mu0(d);
  double mean_var = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (col_count(j) <= 0.0) {
      throw DomainError("fit_ppca: a column has no observed entries");
    }
    mu0(j) = col_sum(j) / col_count(j);
    mean_var += std::max(0.0, col_sumsq(j) / col_count(j) - mu0(j) * mu0(j));
  }
  mean_var /= static_cast<double>(d);

  auto eng = rng::engine(config.seed, rng::Stream::PpcaInit);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index n_params = d * static_cast<Eigen::Index>(k) + d + 1;
  Eigen::VectorXd packed(n_params);
  for (Eigen::Index idx = 0; idx < d * k; ++idx) packed(idx) = 0.1 * normal(eng);
  packed.segment(d * k, d) = mu0;
  const double log_floor = std::log(config.noise_floor);
  packed(n_params - 1) =
      std::max(log_floor, std::log(std::max(0.5 * mean_var, 10.0 * config.noise_floor)));

  // Adamax ascent
  const double beta1 = 0.9;
  const double beta2 = 0.999;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n_params);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n_params);

  FactorModel model;
  model.loglik_trace.reserve(static_cast<std::size_t>(config.max_iters) + 1);
  double prev_ll = 0.0;
  bool have_prev = false;
  double beta1_pow = 1.0;
  int iter = 0;
  for (; iter < config.max_iters; ++iter) {
    const auto obj = ctx.eval(packed);
    model.loglik_trace.push_back(obj.loglik);
    if (have_prev) {
      const double rel =
          std::abs(obj.loglik - prev_ll) / std::max(1.0, std::abs(prev_ll));
      if (iter >= config.min_iters && rel < config.tol) {
        model.converged = true;
        break;
      }
    }
    prev_ll = obj.loglik;
    have_prev = true;

    beta1_pow *= beta1;
    m = beta1 * m + (1.0 - beta1) * obj.grad;
    u = (beta2 * u).cwiseMax(obj.grad.cwiseAbs());
    const double step = config.learning_rate / (1.0 - beta1_pow);
    packed += step * (m.array() / (u.array() + 1e-8)).matrix();
    packed(n_params - 1) = std::max(packed(n_params - 1), log_floor);
  }
  model.converged = iter < config.max_iters;
  model.iterations = iter;

  const auto final_obj = ctx.eval(packed);
  model.final_loglik = final_obj.loglik;
  model.loglik_trace.push_back(final_obj.loglik);

  model.loadings = Eigen::Map<const Eigen::MatrixXd>(packed.data(), d, k);
  model.mean = packed.segment(d * k, d);
  model.noise_var = std::exp(packed(n_params - 1));
  model.latent_dim = k;
  return model;
}

void validate_model(const FactorModel& model) {
  if (model.latent_dim < 1 || model.noise_var <= 0.0 ||
      model.loadings.cols() != model.latent_dim ||
      model.loadings.rows() != model.mean.size()) {
    throw DomainError("invalid factor model");
  }
}

} // namespace

FactorModel fit_ppca(const Eigen::MatrixXd& data, int k, const FitConfig& config) {
  return fit_ppca_impl(data, nullptr, k, config);
}

FactorModel fit_ppca(const BiasMatrix& bias, int k, const FitConfig& config) {
  return fit_ppca_impl(bias.values(), nullptr, k, config);
}

FactorModel fit_ppca_masked(const Eigen::MatrixXd& data, const HoldoutMask& mask,
                            int k, const FitConfig& config) {
  return fit_ppca_impl(data, &mask.held, k, config);
}

Eigen::VectorXd posterior_mean(const FactorModel& model, const Eigen::VectorXd& a) {
  validate_model(model);
  if (a.size() != model.mean.size()) {
    throw DimensionMismatch("posterior_mean: input length does not match D");
  }
  Eigen::MatrixXd M = model.loadings.transpose() * model.loadings;
  M.diagonal().array() += model.noise_var;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("posterior_mean: W'W + sigma^2 I is singular");
  }
  return llt.solve(model.loadings.transpose() * (a - model.mean));
}

Eigen::MatrixXd posterior_mean_all(const FactorModel& model,
                                   const Eigen::MatrixXd& data) {
  validate_model(model);
  if (data.cols() != model.mean.size()) {
    throw DimensionMismatch("posterior_mean_all: column count does not match D");
  }
  Eigen::MatrixXd M = model.loadings.transpose() * model.loadings;
  M.diagonal().array() += model.noise_var;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("posterior_mean_all: W'W + sigma^2 I is singular");
  }
  const Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd zt = llt.solve((centered * model.loadings).transpose());
  return zt.transpose();
}

HoldoutMask make_holdout(Eigen::Index n, Eigen::Index d, double fraction,
                         std::uint64_t seed) {
  if (d < 2) throw DomainError("make_holdout: D >= 2 required");
  if (n < 1) throw DomainError("make_holdout: N >= 1 required");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DomainError("make_holdout: fraction must be in (0,1)");
  }
  const auto n_held = static_cast<Eigen::Index>(std::clamp<long>(
      std::lround(fraction * static_cast<double>(d)), 1L, static_cast<long>(d - 1)));

  HoldoutMask mask;
  mask.fraction = fraction;
  mask.held = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, d, false);
  auto eng = rng::engine(seed, rng::Stream::Holdout);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    for (Eigen::Index t = 0; t < n_held; ++t) {
      std::uniform_int_distribution<Eigen::Index> pick(t, d - 1);
      std::swap(idx[static_cast<std::size_t>(t)],
                idx[static_cast<std::size_t>(pick(eng))]);
      mask.held(i, idx[static_cast<std::size_t>(t)]) = true;
    }
  }
  return mask;
}

HoldoutMask make_holdout(const BiasMatrix& bias, double fraction, std::uint64_t seed) {
  return make_holdout(bias.rows(), bias.cols(), fraction, seed);
}

CheckResult predictive_check(const FactorModel& model, const Eigen::MatrixXd& data,
                             const HoldoutMask& mask, int n_replications,
                             std::uint64_t seed) {
  validate_model(model);
  if (n_replications < 1) {
    throw DomainError("predictive_check: n_replications >= 1 required");
  }
  if (data.cols() != model.mean.size()) {
    throw DimensionMismatch("predictive_check: column count does not match D");
  }
  if (mask.held.rows() != data.rows() || mask.held.cols() != data.cols()) {
    throw DimensionMismatch("predictive_check: mask shape does not match data");
  }

  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  const int k = model.latent_dim;
  const double s2 = model.noise_var;

  // Per-row predictive distribution of the held entries given the observed
  // ones: N(mu_h + W_h m_i, W_h S_i W_h' + sigma^2 I) with m_i, S_i the
  // posterior moments of z from the observed entries.
  struct RowPredictive {
    Eigen::VectorXd centered_obs; // actual held values minus predictive mean
    Eigen::MatrixXd chol_lower;
    double logdet = 0.0;
    Eigen::Index dim = 0;
  };
  std::vector<RowPredictive> rows;
  rows.reserve(static_cast<std::size_t>(n));

  double t_obs = 0.0;
  Eigen::Index total_held = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<int> obs, held;
    for (Eigen::Index j = 0; j < d; ++j) {
      (mask.held(i, j) ? held : obs).push_back(static_cast<int>(j));
    }
    if (held.empty()) continue;
    total_held += static_cast<Eigen::Index>(held.size());

    Eigen::VectorXd m_post = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd s_post = Eigen::MatrixXd::Identity(k, k);
    if (!obs.empty()) {
      Eigen::MatrixXd Wo(static_cast<Eigen::Index>(obs.size()), k);
      Eigen::VectorXd resid(static_cast<Eigen::Index>(obs.size()));
      for (std::size_t c = 0; c < obs.size(); ++c) {
        Wo.row(static_cast<Eigen::Index>(c)) = model.loadings.row(obs[c]);
        resid(static_cast<Eigen::Index>(c)) =
            data(i, obs[c]) - model.mean(obs[c]);
      }
      Eigen::MatrixXd M = Wo.transpose() * Wo;
      M.diagonal().array() += s2;
      Eigen::LLT<Eigen::MatrixXd> llt(M);
      if (llt.info() != Eigen::Success) {
        throw SingularMatrixError("predictive_check: singular posterior");
      }
      m_post = llt.solve(Wo.transpose() * resid);
      s_post = s2 * llt.solve(Eigen::MatrixXd::Identity(k, k));
    }

    const auto d_h = static_cast<Eigen::Index>(held.size());
    Eigen::MatrixXd Wh(d_h, k);
    Eigen::VectorXd actual(d_h), mu_h(d_h);
    for (Eigen::Index c = 0; c < d_h; ++c) {
      Wh.row(c) = model.loadings.row(held[static_cast<std::size_t>(c)]);
      actual(c) = data(i, held[static_cast<std::size_t>(c)]);
      mu_h(c) = model.mean(held[static_cast<std::size_t>(c)]);
    }
    Eigen::MatrixXd V = Wh * s_post * Wh.transpose();
    V.diagonal().array() += s2;
    Eigen::LLT<Eigen::MatrixXd> lltV(V);
    if (lltV.info() != Eigen::Success) {
      throw SingularMatrixError("predictive_check: singular predictive covariance");
    }

    RowPredictive rp;
    rp.dim = d_h;
    rp.chol_lower = lltV.matrixL();
    for (Eigen::Index c = 0; c < d_h; ++c) {
      rp.logdet += 2.0 * std::log(rp.chol_lower(c, c));
    }
    rp.centered_obs = actual - (mu_h + Wh * m_post);

    const Eigen::VectorXd w = rp.chol_lower.triangularView<Eigen::Lower>().solve(
        rp.centered_obs);
    t_obs += -0.5 * (static_cast<double>(d_h) * kLog2Pi + rp.logdet + w.squaredNorm());
    rows.push_back(std::move(rp));
  }
  if (total_held == 0) {
    throw DomainError("predictive_check: mask holds no entries");
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  double score_sum = 0.0;
  for (int rep = 0; rep < n_replications; ++rep) {
    auto eng = rng::engine(seed, rng::Stream::Check, static_cast<std::uint64_t>(rep));
    double t_rep = 0.0;
    for (const RowPredictive& rp : rows) {
      double quad = 0.0;
      for (Eigen::Index c = 0; c < rp.dim; ++c) {
        const double xi = normal(eng);
        quad += xi * xi;
      }
      t_rep += -0.5 * (static_cast<double>(rp.dim) * kLog2Pi + rp.logdet + quad);
    }
    if (std::abs(t_rep - t_obs) <= 1e-12) {
      score_sum += 0.5;
    } else if (t_rep < t_obs) {
      score_sum += 1.0;
    }
  }

  CheckResult result;
  result.n_replications = n_replications;
  result.score = score_sum / static_cast<double>(n_replications);
  result.passed = result.score > 0.5;
  return result;
}

namespace detail {

PackedObjective eval_packed_objective(
    const Eigen::MatrixXd& data,
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>* held, int k,
    const Eigen::VectorXd& packed) {
  const ObjectiveContext ctx = ObjectiveContext::build(data, held, k);
  return ctx.eval(packed);
}

} // namespace detail

} // namespace mcma::factor
