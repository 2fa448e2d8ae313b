#pragma once

#include <Eigen/Core>
#include <json.hpp>

#include "mcma/core.hpp"

namespace mcma::jsonutil {

inline nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Eigen::VectorXd json_to_vec(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("expected a JSON array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) v(i++) = e.get<double>();
  return v;
}

// Row-major nested arrays.
inline nlohmann::json mat_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline Eigen::MatrixXd json_to_mat(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a JSON array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index i = 0;
  for (const auto& row : j) {
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError("ragged JSON matrix");
    }
    Eigen::Index c = 0;
    for (const auto& e : row) m(i, c++) = e.get<double>();
    ++i;
  }
  return m;
}

} // namespace mcma::jsonutil
