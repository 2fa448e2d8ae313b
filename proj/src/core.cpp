#include "mcma/core.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace mcma {

namespace {
constexpr double kSimplexSumTol = 1e-9;
}

Simplex3::Simplex3(double p0, double p1, double p2) : p_{p0, p1, p2} {
  for (double v : p_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      std::ostringstream os;
      os << "Simplex3 component out of [0,1]: " << v;
      throw DomainError(os.str());
    }
  }
  const double sum = p_[0] + p_[1] + p_[2];
  if (std::abs(sum - 1.0) > kSimplexSumTol) {
    std::ostringstream os;
    os << "Simplex3 components sum to " << sum << ", expected 1 within 1e-9";
    throw DomainError(os.str());
  }
}

BiasMatrix::BiasMatrix(Eigen::MatrixXd values, std::vector<std::string> domain_names)
    : values_(std::move(values)), domain_names_(std::move(domain_names)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw DomainError("BiasMatrix requires N >= 1 and D >= 1");
  }
  if (static_cast<Eigen::Index>(domain_names_.size()) != values_.cols()) {
    throw DimensionMismatch("domain_names length does not match column count");
  }
  std::set<std::string> unique(domain_names_.begin(), domain_names_.end());
  if (unique.size() != domain_names_.size()) {
    throw DomainError("domain_names must be unique");
  }
  for (const auto& name : domain_names_) {
    if (name.empty()) throw DomainError("domain name must be non-empty");
  }
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      const double v = values_(i, j);
      if (v != 0.0 && v != 1.0) {
        std::ostringstream os;
        os << "bias entry (" << i << "," << j << ") = " << v
           << " is outside {0,1}";
        throw DomainError(os.str());
      }
    }
  }
}

BiasMatrix BiasMatrix::select_columns(const std::vector<int>& keep) const {
  if (keep.empty()) throw DomainError("select_columns: empty column set");
  Eigen::MatrixXd sub(values_.rows(), static_cast<Eigen::Index>(keep.size()));
  std::vector<std::string> names;
  names.reserve(keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const int j = keep[c];
    if (j < 0 || j >= values_.cols()) {
      throw DomainError("select_columns: index out of range");
    }
    sub.col(static_cast<Eigen::Index>(c)) = values_.col(j);
    names.push_back(domain_names_[static_cast<std::size_t>(j)]);
  }
  return BiasMatrix(std::move(sub), std::move(names));
}

AssociationLabels::AssociationLabels(std::vector<int> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("AssociationLabels requires N >= 1");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < 0 || values_[i] >= kNumClasses) {
      std::ostringstream os;
      os << "label[" << i << "] = " << values_[i] << " is outside {0,1,2}";
      throw DomainError(os.str());
    }
  }
}

Dataset::Dataset(BiasMatrix bias, AssociationLabels labels, Provenance provenance)
    : bias_(std::move(bias)),
      labels_(std::move(labels)),
      provenance_(std::move(provenance)) {
  if (bias_.rows() != static_cast<Eigen::Index>(labels_.size())) {
    std::ostringstream os;
    os << "bias has " << bias_.rows() << " rows but labels has "
       << labels_.size() << " entries";
    throw DimensionMismatch(os.str());
  }
}

void SyntheticParams::validate() const {
  if (n < 1) throw DomainError("SyntheticParams: n >= 1 required");
  if (d < 1) throw DomainError("SyntheticParams: d >= 1 required");
  if (!(w_u >= 0.0) || !std::isfinite(w_u)) {
    throw DomainError("SyntheticParams: w_u must be finite and >= 0");
  }
}

void SemiSynthParams::validate() const {
  if (n < 1) throw DomainError("SemiSynthParams: n >= 1 required");
  if (bernoulli_rates.empty()) {
    throw DomainError("SemiSynthParams: at least one domain rate required");
  }
  for (double r : bernoulli_rates) {
    if (!std::isfinite(r) || r < 0.0 || r > 1.0) {
      throw DomainError("SemiSynthParams: rate outside [0,1]");
    }
  }
  if (!domain_names.empty() && domain_names.size() != bernoulli_rates.size()) {
    throw DimensionMismatch("SemiSynthParams: domain_names/rates length mismatch");
  }
}

Dataset validate_dataset(const Eigen::MatrixXd& raw_bias,
                         const std::vector<int>& raw_labels,
                         std::vector<std::string> domain_names,
                         Provenance provenance) {
  if (raw_bias.rows() != static_cast<Eigen::Index>(raw_labels.size())) {
    std::ostringstream os;
    os << "bias has " << raw_bias.rows() << " rows but labels has "
       << raw_labels.size() << " entries";
    throw DimensionMismatch(os.str());
  }
  BiasMatrix bias(raw_bias, std::move(domain_names));
  AssociationLabels labels(raw_labels);
  return Dataset(std::move(bias), std::move(labels), std::move(provenance));
}

Dataset validate_dataset(const Eigen::MatrixXi& raw_bias,
                         const std::vector<int>& raw_labels,
                         std::vector<std::string> domain_names,
                         Provenance provenance) {
  return validate_dataset(raw_bias.cast<double>(), raw_labels,
                          std::move(domain_names), std::move(provenance));
}

std::vector<std::string> default_domain_names(Eigen::Index d) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    names.push_back("d" + std::to_string(j + 1));
  }
  return names;
}

} // namespace mcma
