#pragma once

// Shared domain types for the meta-analysis pipeline.
//
// Conventions used throughout:
//   - a bias matrix row is one RCT; a column is one risk-of-bias domain;
//     entries are exactly 0.0 (low risk) or 1.0 (high risk).
//   - association labels take values 0 (negative), 1 (none), 2 (positive).
// All types here are immutable after construction and safe to share across
// threads.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace mcma {

inline constexpr int kNumClasses = 3;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct RankError : Error {
  using Error::Error;
};
struct SingularMatrixError : Error {
  using Error::Error;
};
struct AllDroppedError : Error {
  using Error::Error;
};
struct DegenerateWeightsError : Error {
  using Error::Error;
};
struct DegenerateLabelsError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Simplex3
// ---------------------------------------------------------------------------

// A point on the 3-class probability simplex. Components must be in [0,1]
// and sum to 1 within 1e-9; inputs are stored as given (no renormalization).
class Simplex3 {
public:
  Simplex3(double p0, double p1, double p2);
  explicit Simplex3(const std::array<double, 3>& p) : Simplex3(p[0], p[1], p[2]) {}

  double operator[](int c) const { return p_[static_cast<std::size_t>(c)]; }
  const std::array<double, 3>& probs() const { return p_; }

private:
  std::array<double, 3> p_;
};

// ---------------------------------------------------------------------------
// Dataset containers
// ---------------------------------------------------------------------------

// N x D matrix of per-RCT risk-of-bias indicators with named domains.
class BiasMatrix {
public:
  BiasMatrix(Eigen::MatrixXd values, std::vector<std::string> domain_names);

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& domain_names() const { return domain_names_; }

  // Sub-matrix restricted to the given columns, names carried along.
  BiasMatrix select_columns(const std::vector<int>& keep) const;

private:
  Eigen::MatrixXd values_;
  std::vector<std::string> domain_names_;
};

// Length-N vector of therapeutic association labels over {0,1,2}.
class AssociationLabels {
public:
  explicit AssociationLabels(std::vector<int> values);

  std::size_t size() const { return values_.size(); }
  int operator[](std::size_t i) const { return values_[i]; }
  const std::vector<int>& values() const { return values_; }

private:
  std::vector<int> values_;
};

struct SyntheticParams {
  Eigen::Index n = 1000;
  Eigen::Index d = 10;
  double w_u = 2.0; // confounding strength
  std::uint64_t seed = 0;

  void validate() const;
};

struct SemiSynthParams {
  std::vector<double> bernoulli_rates; // per-domain P(bias = 1)
  Simplex3 outcome_probs{1.0, 0.0, 0.0};
  std::vector<std::string> domain_names; // carried from the source dataset
  Eigen::Index n = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticProvenance {
  SyntheticParams params;
};
struct SemiSyntheticProvenance {
  SemiSynthParams params;
};
struct IngestedProvenance {
  std::string source_path;
};
using Provenance =
    std::variant<SyntheticProvenance, SemiSyntheticProvenance, IngestedProvenance>;

class Dataset {
public:
  Dataset(BiasMatrix bias, AssociationLabels labels, Provenance provenance);

  const BiasMatrix& bias() const { return bias_; }
  const AssociationLabels& labels() const { return labels_; }
  const Provenance& provenance() const { return provenance_; }
  Eigen::Index n() const { return bias_.rows(); }
  Eigen::Index d() const { return bias_.cols(); }

private:
  BiasMatrix bias_;
  AssociationLabels labels_;
  Provenance provenance_;
};

using SummaryEstimate = Simplex3;

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

// Builds a Dataset from raw integer-valued inputs, enforcing every type
// invariant. Throws DimensionMismatch when row counts differ and DomainError
// when an entry is outside {0,1} or a label is outside {0,1,2}.
Dataset validate_dataset(const Eigen::MatrixXd& raw_bias,
                         const std::vector<int>& raw_labels,
                         std::vector<std::string> domain_names,
                         Provenance provenance);

Dataset validate_dataset(const Eigen::MatrixXi& raw_bias,
                         const std::vector<int>& raw_labels,
                         std::vector<std::string> domain_names,
                         Provenance provenance);

// Default names when a generator does not care: "d1", "d2", ...
std::vector<std::string> default_domain_names(Eigen::Index d);

} // namespace mcma
