#include <cmath>

#include "doctest.h"
#include "mcopt/rbf.hpp"
#include "mcopt/rng.hpp"
#include "mcopt/space.hpp"

using namespace mcopt;

TEST_CASE("single center is a constant predictor") {
  const std::vector<EncodedPoint> X{{0.3, 0.1, 0.9}};
  const auto rbf = RbfModel::fit(X, std::vector<double>{2.5});
  CHECK(!rbf.linear_tail());
  CHECK(rbf.predict(X[0]) == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(rbf.predict({5.0, -3.0, 1.0}) == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("interpolates at centers") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + rng.index(6);
    const std::size_t n = 1 + rng.index(25);
    std::vector<EncodedPoint> X(n, EncodedPoint(d));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : X[i]) v = rng.uniform();
      y[i] = rng.uniform(-5, 5);
    }
    const auto rbf = RbfModel::fit(X, y);
    CHECK(rbf.linear_tail() == (n >= d + 2));
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(rbf.predict(X[i]) - y[i]) < 1e-6);
  }
}

TEST_CASE("linear tail reproduces linear functions") {
  Rng rng(13);
  const std::size_t d = 4;
  const std::vector<double> coef{1.5, -2.0, 0.25, 3.0};
  const auto f = [&](const EncodedPoint& x) {
    double v = 0.7;
    for (std::size_t j = 0; j < d; ++j) v += coef[j] * x[j];
    return v;
  };
  std::vector<EncodedPoint> X(12, EncodedPoint(d));
  std::vector<double> y;
  for (auto& x : X) {
    for (auto& v : x) v = rng.uniform();
    y.push_back(f(x));
  }
  const auto rbf = RbfModel::fit(X, y);
  REQUIRE(rbf.linear_tail());
  for (int i = 0; i < 200; ++i) {
    EncodedPoint q(d);
    for (auto& v : q) v = rng.uniform(-1, 2);
    CHECK(std::abs(rbf.predict(q) - f(q)) < 1e-6);
  }
}

TEST_CASE("one-hot encodings with collinear columns still fit") {
  const auto space = SearchSpace::reference();
  const auto all = enumerate_all(space);
  std::vector<EncodedPoint> X;
  std::vector<double> y;
  Rng rng(14);
  for (std::size_t i = 0; i < 30; ++i) {
    const auto& p = all[rng.index(all.size())];
    const auto x = encode_flat(space, p);
    if (std::find(X.begin(), X.end(), x) != X.end()) continue;
    X.push_back(x);
    y.push_back(rng.uniform(1, 10));
  }
  const auto rbf = RbfModel::fit(X, y);
  for (std::size_t i = 0; i < X.size(); ++i) CHECK(std::abs(rbf.predict(X[i]) - y[i]) < 1e-6);
}
