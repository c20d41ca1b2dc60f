#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "hising/errors.hpp"
#include "hising/model.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using hising::CovariateMatrix;
using hising::ModelParameters;
using hising::SpinConfiguration;
using hising::WeightedHypergraph;

TEST_CASE("spin configurations") {
  CHECK_THROWS_AS(SpinConfiguration({1, 0, -1}), hising::InvalidInput);
  CHECK_THROWS_AS(SpinConfiguration({}), hising::InvalidInput);

  SpinConfiguration y = SpinConfiguration::from_bits(4, 0b101);
  CHECK(y[0] == 1);
  CHECK(y[1] == -1);
  CHECK(y[2] == 1);
  CHECK(y[3] == -1);
  CHECK(y.to_bits() == 0b101);
  y.flip(3);
  CHECK(y[3] == 1);
  CHECK(y.to_bits() == 0b1101);
  y.set(0, -1);
  CHECK(y[0] == -1);
  CHECK_THROWS_AS(y.set(0, 2), hising::InvalidInput);
}

TEST_CASE("interaction polynomial and partial fields") {
  WeightedHypergraph g(4, 3, {{{0, 1, 2}, 0.5}, {{2, 3}, -0.25}});

  SUBCASE("hand values") {
    const SpinConfiguration y({1, 1, -1, 1});
    CHECK(f_value(g, y) == doctest::Approx(-0.5 + 0.25));
    CHECK(f_value(g, SpinConfiguration({1, 1, 1, 1})) ==
          doctest::Approx(0.25));  // sum of weights
    CHECK(f_partial(g, y, 0) == doctest::Approx(-0.5));
    CHECK(f_partial(g, y, 3) == doctest::Approx(0.25));
  }

  SUBCASE("vertex with no incident edges") {
    WeightedHypergraph lone(3, 2, {{{0, 1}, 1.0}});
    CHECK(f_partial(lone, SpinConfiguration({1, 1, 1}), 2) == 0.0);
  }

  SUBCASE("matches the naive oracle on random instances") {
    hising::Xoshiro256pp rng(3);
    for (int rep = 0; rep < 20; ++rep) {
      const auto inst = testutil::random_instance(rng, 8, 2, 3);
      const SpinConfiguration y = testutil::random_spins(rng, 8);
      CHECK(f_value(inst.g, y) ==
            doctest::Approx(oracles::naive_f(inst.g, y)).epsilon(1e-12));
      for (int i = 0; i < 8; ++i)
        CHECK(f_partial(inst.g, y, i) ==
              doctest::Approx(oracles::naive_f_partial(inst.g, y, i))
                  .epsilon(1e-12));
    }
  }

  SUBCASE("flip-difference identity, exhaustively at n=6") {
    hising::Xoshiro256pp rng(4);
    const auto inst = testutil::random_instance(rng, 6, 2, 3);
    for (std::uint64_t k = 0; k < 64; ++k) {
      const SpinConfiguration y = SpinConfiguration::from_bits(6, k);
      for (int i = 0; i < 6; ++i) {
        SpinConfiguration up = y, down = y;
        up.set(i, 1);
        down.set(i, -1);
        CHECK(f_value(inst.g, up) - f_value(inst.g, down) ==
              doctest::Approx(2.0 * f_partial(inst.g, y, i)).epsilon(1e-12));
        // Independence from y[i], and the degree bound.
        CHECK(f_partial(inst.g, up, i) == f_partial(inst.g, down, i));
        CHECK(std::abs(f_partial(inst.g, y, i)) <=
              inst.g.vertex_degree(i) + 1e-12);
      }
    }
  }

  SUBCASE("interaction_fields returns every partial at once") {
    const SpinConfiguration y({1, -1, -1, 1});
    const Eigen::VectorXd fields = interaction_fields(g, y);
    for (int i = 0; i < 4; ++i)
      CHECK(fields[i] == doctest::Approx(f_partial(g, y, i)).epsilon(1e-14));
  }
}

TEST_CASE("conditional probabilities") {
  SUBCASE("zero local field gives a coin flip") {
    WeightedHypergraph g(2, 2, {{{0, 1}, 1.0}});
    const CovariateMatrix x(Eigen::MatrixXd::Zero(2, 1));
    ModelParameters p = ModelParameters::zeros(1);
    CHECK(conditional_prob(g, x, p, SpinConfiguration(std::vector<std::int8_t>{1, 1}), 0, 1) ==
          doctest::Approx(0.5));
  }

  SUBCASE("logistic value at local field one half") {
    WeightedHypergraph g(2, 2, {});
    Eigen::MatrixXd m(2, 1);
    m << 0.5, 0.0;
    ModelParameters p = ModelParameters::zeros(1);
    p.theta[0] = 1.0;
    const double prob =
        conditional_prob(g, CovariateMatrix(m), p, SpinConfiguration(std::vector<std::int8_t>{1, 1}), 0, 1);
    CHECK(prob == doctest::Approx(0.7310585786300049).epsilon(1e-15));
  }

  SUBCASE("complementary spins sum to one") {
    hising::Xoshiro256pp rng(5);
    const auto inst = testutil::random_instance(rng, 6, 2, 3);
    const SpinConfiguration y = testutil::random_spins(rng, 6);
    for (int i = 0; i < 6; ++i) {
      const double up = conditional_prob(inst.g, inst.x, inst.p, y, i, 1);
      const double down = conditional_prob(inst.g, inst.x, inst.p, y, i, -1);
      CHECK(up + down == doctest::Approx(1.0).epsilon(1e-15));
    }
  }

  SUBCASE("matches conditionals of the enumerated joint at n=4") {
    hising::Xoshiro256pp rng(6);
    const auto inst = testutil::random_instance(rng, 4, 2, 3);
    for (std::uint64_t k = 0; k < 16; ++k) {
      const SpinConfiguration y = SpinConfiguration::from_bits(4, k);
      for (int i = 0; i < 4; ++i)
        for (int s : {-1, 1})
          CHECK(std::abs(conditional_prob(inst.g, inst.x, inst.p, y, i, s) -
                         oracles::naive_conditional(inst.g, inst.x, inst.p, y,
                                                    i, s)) < 1e-12);
    }
  }

  SUBCASE("rejects bad spin arguments") {
    WeightedHypergraph g(2, 2, {});
    const CovariateMatrix x(Eigen::MatrixXd::Zero(2, 1));
    CHECK_THROWS_AS(conditional_prob(g, x, ModelParameters::zeros(1),
                                     SpinConfiguration(std::vector<std::int8_t>{1, 1}), 0, 0),
                    hising::InvalidInput);
  }
}

TEST_CASE("log weights and the partition function") {
  SUBCASE("zero parameters weigh every configuration equally") {
    WeightedHypergraph g(3, 2, {{{0, 1}, 0.4}});
    const CovariateMatrix x(Eigen::MatrixXd::Ones(3, 1));
    const ModelParameters p = ModelParameters::zeros(1);
    CHECK(log_weight(g, x, p, SpinConfiguration({1, -1, 1})) == 0.0);
    CHECK(log_partition(g, x, p) == doctest::Approx(3.0 * std::log(2.0)));
  }

  SUBCASE("two-vertex single-edge closed form") {
    WeightedHypergraph g(2, 2, {{{0, 1}, 1.0}});
    const CovariateMatrix x(Eigen::MatrixXd::Zero(2, 1));
    for (double beta : {0.2, -0.7, 1.5}) {
      ModelParameters p = ModelParameters::zeros(1);
      p.beta = beta;
      CHECK(log_partition(g, x, p) ==
            doctest::Approx(std::log(2.0 * std::exp(beta) +
                                     2.0 * std::exp(-beta)))
                .epsilon(1e-14));
    }
  }

  SUBCASE("linear term only, no edges") {
    WeightedHypergraph g(2, 2, {});
    Eigen::MatrixXd m(2, 1);
    m << 0.3, 0.8;
    ModelParameters p = ModelParameters::zeros(1);
    p.theta[0] = 1.0;
    CHECK(log_weight(g, CovariateMatrix(m), p, SpinConfiguration(std::vector<std::int8_t>{1, -1})) ==
          doctest::Approx(0.3 - 0.8).epsilon(1e-14));
  }

  SUBCASE("enumeration matches the naive oracle and normalizes") {
    hising::Xoshiro256pp rng(7);
    const auto inst = testutil::random_instance(rng, 10, 3, 4);
    const std::vector<double> fast =
        enumerate_log_weights(inst.g, inst.x, inst.p);
    const std::vector<double> naive =
        oracles::naive_enumerate_log_weights(inst.g, inst.x, inst.p);
    REQUIRE(fast.size() == naive.size());
    for (size_t k = 0; k < fast.size(); ++k)
      CHECK(fast[k] == doctest::Approx(naive[k]).epsilon(1e-11));

    const double log_z = log_partition(inst.g, inst.x, inst.p);
    double total = 0.0;
    for (double lw : fast) total += std::exp(lw - log_z);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("enumeration cap") {
    WeightedHypergraph g(23, 2, {{{0, 1}, 0.1}});
    const CovariateMatrix x(Eigen::MatrixXd::Zero(23, 1));
    CHECK_THROWS_AS(log_partition(g, x, ModelParameters::zeros(1)),
                    hising::TooLarge);
  }
}

TEST_CASE("numeric helpers stay finite in the tails") {
  CHECK(hising::lncosh(0.0) == doctest::Approx(0.0));
  CHECK(hising::lncosh(2.0) == doctest::Approx(std::log(std::cosh(2.0))).epsilon(1e-15));
  CHECK(hising::lncosh(800.0) == doctest::Approx(800.0 - std::log(2.0)));
  CHECK(std::isfinite(hising::lncosh(-1e308)));

  CHECK(hising::sech_sq(0.0) == doctest::Approx(1.0));
  const double c = std::cosh(3.0);
  CHECK(hising::sech_sq(-3.0) == doctest::Approx(1.0 / (c * c)).epsilon(1e-14));
  CHECK(hising::sech_sq(800.0) == 0.0);  // underflows instead of overflowing
}
