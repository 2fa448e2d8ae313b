#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mcma/core.hpp"

using namespace mcma;

namespace {

Eigen::MatrixXi small_bias() {
  Eigen::MatrixXi m(3, 2);
  m << 0, 1, 1, 0, 1, 1;
  return m;
}

} // namespace

TEST_CASE("validate_dataset accepts a well-formed matrix") {
  const Dataset ds = validate_dataset(small_bias(), {0, 1, 2},
                                      {"a", "b"}, IngestedProvenance{"x"});
  CHECK(ds.n() == 3);
  CHECK(ds.d() == 2);
  CHECK(ds.bias().values()(0, 1) == 1.0);
  CHECK(ds.labels()[2] == 2);
}

TEST_CASE("validate_dataset rejects row-count mismatch") {
  CHECK_THROWS_AS(validate_dataset(small_bias(), {0, 1}, {"a", "b"},
                                   IngestedProvenance{"x"}),
                  DimensionMismatch);
}

TEST_CASE("validate_dataset rejects out-of-domain entries") {
  Eigen::MatrixXi m = small_bias();
  m(1, 1) = 2;
  CHECK_THROWS_AS(
      validate_dataset(m, {0, 1, 2}, {"a", "b"}, IngestedProvenance{"x"}),
      DomainError);

  Eigen::MatrixXd md = small_bias().cast<double>();
  md(0, 0) = 0.5;
  CHECK_THROWS_AS(
      validate_dataset(md, {0, 1, 2}, {"a", "b"}, IngestedProvenance{"x"}),
      DomainError);
}

TEST_CASE("validate_dataset rejects labels outside {0,1,2}") {
  CHECK_THROWS_AS(validate_dataset(small_bias(), {0, 1, 3}, {"a", "b"},
                                   IngestedProvenance{"x"}),
                  DomainError);
  CHECK_THROWS_AS(validate_dataset(small_bias(), {0, -1, 2}, {"a", "b"},
                                   IngestedProvenance{"x"}),
                  DomainError);
}

TEST_CASE("domain names must be unique, non-empty, and match D") {
  CHECK_THROWS_AS(validate_dataset(small_bias(), {0, 1, 2}, {"a", "a"},
                                   IngestedProvenance{"x"}),
                  DomainError);
  CHECK_THROWS_AS(validate_dataset(small_bias(), {0, 1, 2}, {"a"},
                                   IngestedProvenance{"x"}),
                  DimensionMismatch);
  CHECK_THROWS_AS(validate_dataset(small_bias(), {0, 1, 2}, {"a", ""},
                                   IngestedProvenance{"x"}),
                  DomainError);
}

TEST_CASE("empty matrices are rejected") {
  Eigen::MatrixXd empty(0, 2);
  CHECK_THROWS_AS(
      validate_dataset(empty, {}, {"a", "b"}, IngestedProvenance{"x"}),
      Error);
}

TEST_CASE("Simplex3 validation") {
  CHECK_NOTHROW(Simplex3(1.0, 0.0, 0.0));
  CHECK_NOTHROW(Simplex3(0.25, 0.5, 0.25));
  CHECK_THROWS_AS(Simplex3(0.5, 0.5, 0.1), DomainError);
  CHECK_THROWS_AS(Simplex3(-0.1, 0.6, 0.5), DomainError);
  CHECK_THROWS_AS(Simplex3(1.2, -0.1, -0.1), DomainError);
  const Simplex3 p(0.2, 0.3, 0.5);
  CHECK(p[0] == 0.2);
  CHECK(p[2] == 0.5);
}

TEST_CASE("SyntheticParams validation") {
  SyntheticParams p;
  CHECK_NOTHROW(p.validate());
  p.n = 0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.n = 5;
  p.w_u = -1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

// Property: no matrix containing an entry outside {0,1} is ever accepted.
TEST_CASE("random integer matrices with invalid entries are rejected") {
  std::mt19937_64 eng(7);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_int_distribution<int> bit(0, 1);
  std::uniform_int_distribution<int> bad(-3, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = dim(eng);
    const int d = dim(eng);
    Eigen::MatrixXi m(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = bit(eng);
    }
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& y : labels) y = std::uniform_int_distribution<int>(0, 2)(eng);

    // corrupt one entry with a value outside {0,1}
    int v = bad(eng);
    while (v == 0 || v == 1) v = bad(eng);
    m(std::uniform_int_distribution<int>(0, n - 1)(eng),
      std::uniform_int_distribution<int>(0, d - 1)(eng)) = v;

    CHECK_THROWS_AS(
        validate_dataset(m, labels, default_domain_names(d),
                         IngestedProvenance{"t"}),
        DomainError);
  }
}
