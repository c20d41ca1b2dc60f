#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "hising/diagnostics.hpp"
#include "hising/errors.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using hising::AssumptionThresholds;
using hising::CovariateMatrix;
using hising::index_selection;
using hising::McOptions;
using hising::ModelParameters;
using hising::ParameterBox;
using hising::SpinConfiguration;
using hising::VertexId;
using hising::WeightedHypergraph;

namespace {

WeightedHypergraph ring_3_uniform(int n, double w) {
  std::vector<hising::Hyperedge> edges;
  for (int i = 0; i < n; ++i)
    edges.push_back({{static_cast<VertexId>(i), static_cast<VertexId>((i + 1) % n),
                      static_cast<VertexId>((i + 2) % n)},
                     w});
  for (auto& e : edges) std::sort(e.vertices.begin(), e.vertices.end());
  return WeightedHypergraph(n, 3, std::move(edges));
}

}  // namespace

TEST_CASE("assumption validation") {
  const ParameterBox box{0.3, 0.5, 1.0};

  SUBCASE("degree cap violations are reported, not thrown") {
    WeightedHypergraph g(3, 2, {{{0, 1}, 0.7}, {{0, 2}, 0.5}});
    const CovariateMatrix x(Eigen::MatrixXd::Ones(3, 1) * 0.5);
    const auto rep = validate_assumptions(g, x, box);
    CHECK(rep.max_degree == doctest::Approx(1.2));
    CHECK_FALSE(rep.degree_ok);
    CHECK_FALSE(rep.hard_ok());
  }

  SUBCASE("top mass of a 3-uniform ring") {
    const WeightedHypergraph g = ring_3_uniform(100, 0.3);
    const CovariateMatrix x(Eigen::MatrixXd::Ones(100, 1) * 0.5);
    const auto rep = validate_assumptions(g, x, box);
    CHECK(rep.top_mass == doctest::Approx(9.0));
    CHECK(rep.mass_ratio == doctest::Approx(0.09));
    CHECK(rep.mass_ok);
    CHECK(rep.degree_ok);  // three edges of 0.3 per vertex
  }

  SUBCASE("all-ones covariates have a unit spectrum") {
    WeightedHypergraph g(5, 2, {{{0, 1}, 0.2}});
    const auto rep =
        validate_assumptions(g, CovariateMatrix(Eigen::MatrixXd::Ones(5, 1)), box);
    CHECK(rep.lambda_min_q == doctest::Approx(1.0));
    CHECK(rep.lambda_max_q == doctest::Approx(1.0));
    CHECK(rep.spectrum_ok);
    CHECK(rep.row_norm_ok);
    REQUIRE(rep.f_inf_norm.has_value());
    CHECK(*rep.f_inf_norm == doctest::Approx(2.0 * 4.0 / 5.0));
  }

  SUBCASE("row norms above M fail the row check") {
    WeightedHypergraph g(2, 2, {{{0, 1}, 0.2}});
    Eigen::MatrixXd m(2, 1);
    m << 1.4, 0.5;
    const auto rep = validate_assumptions(g, CovariateMatrix(m), box);
    CHECK(rep.max_row_norm == doctest::Approx(1.4));
    CHECK_FALSE(rep.row_norm_ok);
    CHECK_FALSE(rep.hard_ok());
  }

  SUBCASE("box membership of the truth is strict") {
    WeightedHypergraph g(4, 2, {{{0, 1}, 0.2}});
    hising::Xoshiro256pp rng(41);
    const auto inst = testutil::random_instance(rng, 4, 2, 2);
    ModelParameters on_edge = ModelParameters::zeros(2);
    on_edge.beta = box.beta_bound;  // |beta| == B is not inside
    auto rep = validate_assumptions(g, inst.x, box, &on_edge);
    REQUIRE(rep.box_ok.has_value());
    CHECK_FALSE(*rep.box_ok);

    ModelParameters inside = ModelParameters::zeros(2);
    inside.beta = 0.9 * box.beta_bound;
    rep = validate_assumptions(g, inst.x, box, &inside);
    CHECK(*rep.box_ok);
  }

  SUBCASE("projection statistics are optional") {
    WeightedHypergraph g(4, 2, {{{0, 1}, 0.2}});
    const CovariateMatrix x(Eigen::MatrixXd::Ones(4, 1) * 0.5);
    const auto rep = validate_assumptions(g, x, box, nullptr, {}, false);
    CHECK_FALSE(rep.f_inf_norm.has_value());
  }
}

TEST_CASE("reduction matrix") {
  SUBCASE("two overlapping 3-edges, by hand") {
    WeightedHypergraph g(4, 3, {{{0, 1, 2}, 0.5}, {{0, 1, 3}, 0.4}});
    const auto red = build_reduction_matrix(g);
    // Column 0: tuple (1) sees weights at j=2 and j=3 (norm sqrt(0.41)),
    // beating tuples (2) and (3) with single entries.
    CHECK(red.a(2, 0) == doctest::Approx(0.5));
    CHECK(red.a(3, 0) == doctest::Approx(0.4));
    CHECK(red.a(1, 0) == 0.0);
    CHECK(red.chosen_tuples[0] == std::vector<VertexId>{1});
    // Column 1 mirrors column 0 through tuple (0).
    CHECK(red.a(2, 1) == doctest::Approx(0.5));
    CHECK(red.a(3, 1) == doctest::Approx(0.4));
    // Columns 2 and 3: single-edge candidates tie, smallest tuple wins.
    CHECK(red.chosen_tuples[2] == std::vector<VertexId>{0});
    CHECK(red.a(1, 2) == doctest::Approx(0.5));
    CHECK(red.chosen_tuples[3] == std::vector<VertexId>{0});
    CHECK(red.a(1, 3) == doctest::Approx(0.4));

    CHECK(red.a.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(red.frobenius_sq == doctest::Approx(2 * 0.41 + 0.25 + 0.16));
    CHECK(red.inf_norm == doctest::Approx(0.9));   // max column sum
    CHECK(red.one_norm == doctest::Approx(1.0));   // row 2: 0.5 + 0.5
  }

  SUBCASE("pairwise graphs reduce to the weight matrix itself") {
    WeightedHypergraph g(3, 2, {{{0, 1}, 0.5}, {{1, 2}, -0.25}});
    const auto red = build_reduction_matrix(g);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 1) = w(1, 0) = 0.5;
    w(1, 2) = w(2, 1) = -0.25;
    CHECK((red.a - w).cwiseAbs().maxCoeff() == 0.0);
    for (const auto& t : red.chosen_tuples) CHECK(t.empty());
  }

  SUBCASE("norm bounds under the unit degree cap") {
    hising::Xoshiro256pp rng(43);
    for (int rep = 0; rep < 10; ++rep) {
      const int m = 2 + static_cast<int>(rng.below(3));
      const auto inst = testutil::random_instance(rng, 30, 2, m);
      try {
        const auto red = build_reduction_matrix(inst.g);
        CHECK(red.inf_norm <= m - 1 + 1e-12);
        CHECK(red.one_norm <= m - 1 + 1e-12);
        CHECK(red.a.diagonal().cwiseAbs().maxCoeff() == 0.0);
      } catch (const hising::NoTopEdges&) {
        // legal for a random mixed-cardinality draw
      }
    }
  }

  SUBCASE("no top-cardinality edge") {
    WeightedHypergraph g(3, 3, {{{0, 1}, 0.5}});
    CHECK_THROWS_AS(build_reduction_matrix(g), hising::NoTopEdges);
  }
}

TEST_CASE("index selection") {
  SUBCASE("diagonal matrix selects itself") {
    Eigen::MatrixXd w = Eigen::Vector3d(3, 2, 1).asDiagonal();
    const auto sel = index_selection(w);
    CHECK(sel.h == std::vector<int>{0, 1, 2});
    CHECK(sel.selected_sq_sum == doctest::Approx(14.0));
  }

  SUBCASE("permutation structure is recovered") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
    w(0, 2) = 1.5;
    w(1, 0) = -2.5;
    w(2, 3) = 0.5;
    w(3, 1) = 1.0;
    const auto sel = index_selection(w);
    CHECK(sel.h == std::vector<int>{2, 0, 3, 1});
    CHECK(sel.selected_sq_sum == doctest::Approx(1.5 * 1.5 + 6.25 + 0.25 + 1.0));
  }

  SUBCASE("matches the independent reimplementation on random matrices") {
    hising::Xoshiro256pp rng(44);
    for (int rep = 0; rep < 20; ++rep) {
      const int n = 3 + static_cast<int>(rng.below(8));
      Eigen::MatrixXd w(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w(i, j) = rng.normal();
      const auto sel = index_selection(w);
      const auto [h, sum] = oracles::independent_index_selection(w);
      CHECK(sel.h == h);
      CHECK(sel.selected_sq_sum == doctest::Approx(sum).epsilon(1e-12));

      // h is a bijection.
      std::vector<char> hit(static_cast<size_t>(n), 0);
      for (int v : sel.h) {
        REQUIRE(v >= 0);
        REQUIRE(v < n);
        hit[static_cast<size_t>(v)] = 1;
      }
      for (char c : hit) CHECK(c == 1);
    }
  }

  SUBCASE("rectangular input is refused") {
    CHECK_THROWS_AS(index_selection(Eigen::MatrixXd::Zero(2, 3)),
                    hising::InvalidInput);
  }
}

TEST_CASE("concavity lower bound") {
  const ParameterBox box{0.3, 0.5, 1.0};

  SUBCASE("single pair with constant covariates, by direct arithmetic") {
    WeightedHypergraph g(4, 2, {{{0, 1}, 1.0}});
    const CovariateMatrix x(Eigen::MatrixXd::Ones(4, 1));
    const double bound = concavity_lower_bound(g, x, box);

    const Eigen::MatrixXd f = build_projection(x).f;
    const auto red = build_reduction_matrix(g);
    const auto [h, sum] = oracles::independent_index_selection(f * red.a);
    const double factor = std::exp(-(0.3 + 1.0 * 0.5)) / 2.0;
    CHECK(bound == doctest::Approx(factor * sum).epsilon(1e-12));
  }

  SUBCASE("scales linearly with n on the 3-uniform ring") {
    const CovariateMatrix x100(Eigen::MatrixXd::Ones(100, 1) * 0.5);
    const CovariateMatrix x200(Eigen::MatrixXd::Ones(200, 1) * 0.5);
    const double b100 =
        concavity_lower_bound(ring_3_uniform(100, 0.3), x100, box);
    const double b200 =
        concavity_lower_bound(ring_3_uniform(200, 0.3), x200, box);
    CHECK(b100 > 0.0);
    CHECK(b200 / b100 == doctest::Approx(2.0).epsilon(0.1));
  }

  SUBCASE("propagates missing top edges") {
    WeightedHypergraph g(3, 3, {{{0, 1}, 0.5}});
    const CovariateMatrix x(Eigen::MatrixXd::Ones(3, 1));
    CHECK_THROWS_AS(concavity_lower_bound(g, x, box), hising::NoTopEdges);
  }
}

TEST_CASE("monte carlo verifiers") {
  hising::Xoshiro256pp rng(45);

  SUBCASE("variance bounds hold on random enumerable instances") {
    for (int rep = 0; rep < 3; ++rep) {
      const auto inst = testutil::random_instance(rng, 10, 2, 3);
      McOptions opts;
      opts.trials = 20000;
      opts.seed = 1000 + static_cast<std::uint64_t>(rep);
      const auto report =
          verify_gradient_variance(inst.g, inst.x, inst.p, inst.box, opts);
      CHECK(report.exact);
      CHECK(report.empirical_beta_var <= report.bound_beta);
      CHECK(report.empirical_theta_var <= report.bound_theta);
      CHECK(report.bound_beta == doctest::Approx((12.0 + 4.0 * 0.3) * 2 * 10));
      CHECK(report.bound_theta == doctest::Approx(1.3 * 4.0 * 2 * 2 * 10));
    }
  }

  SUBCASE("beta variance is exactly zero without edges") {
    WeightedHypergraph g(6, 2, {});
    hising::Xoshiro256pp prng(46);
    const auto inst = testutil::random_instance(prng, 6, 2, 2);
    McOptions opts;
    opts.trials = 200;
    const auto report =
        verify_gradient_variance(g, inst.x, inst.p, inst.box, opts);
    CHECK(report.empirical_beta_var == 0.0);
  }

  SUBCASE("energy bound certificate on the 3-uniform ring") {
    const WeightedHypergraph g = ring_3_uniform(12, 0.3);
    Eigen::MatrixXd m(12, 1);
    hising::Xoshiro256pp prng(47);
    for (int i = 0; i < 12; ++i) m(i, 0) = 0.5 + 0.3 * prng.uniform01();
    const CovariateMatrix x(m);
    ModelParameters truth = ModelParameters::zeros(1);
    truth.beta = 0.1;
    truth.theta[0] = 0.2;
    McOptions opts;
    opts.trials = 2000;
    opts.seed = 9;
    const ParameterBox box{0.3, 0.5, 1.0};
    const auto report = verify_energy_lower_bound(g, x, truth, box, opts);
    CHECK(report.exact);
    CHECK(report.bound > 0.0);
    CHECK(report.empirical_min_ff >= 0.0);
    CHECK(report.fraction_above >= 0.95);
  }

  SUBCASE("empty graphs have zero energy and a vacuous bound") {
    WeightedHypergraph g(6, 3, {});
    hising::Xoshiro256pp prng(48);
    const auto inst = testutil::random_instance(prng, 6, 2, 2);
    McOptions opts;
    opts.trials = 100;
    const auto report =
        verify_energy_lower_bound(g, inst.x, inst.p, inst.box, opts);
    CHECK(report.bound == 0.0);
    CHECK(report.empirical_min_ff == 0.0);
    CHECK(report.fraction_above == 1.0);
  }
}

TEST_CASE("exact conditional-energy checks") {
  const ParameterBox box{0.3, 0.5, 1.0};
  hising::Xoshiro256pp rng(49);

  const auto draw_with_top_edge = [&rng]() {
    for (int attempt = 0; attempt < 50; ++attempt) {
      auto inst = testutil::random_instance(rng, 8, 2, 3);
      for (const auto& e : inst.g.edges())
        if (static_cast<int>(e.vertices.size()) == 3) return inst;
    }
    FAIL("no instance with a cardinality-3 edge after 50 draws");
    return testutil::random_instance(rng, 8, 2, 3);
  };

  SUBCASE("parity inequality has no violations on random instances") {
    for (int rep = 0; rep < 5; ++rep) {
      const auto inst = draw_with_top_edge();
      const auto report =
          verify_parity_lemma(inst.g, inst.x, inst.p, box);
      CHECK(report.combos_checked > 0);
      CHECK(report.violations == 0);
      CHECK(report.min_margin >= -1e-10);
    }
  }

  // With only one spin free, the realized tuple spins can cancel inside
  // the coefficient sum and push the conditional expectation below the
  // claimed bound; the checker exists to measure this, so the test pins
  // its margins against a direct enumeration instead of asserting zero.
  SUBCASE("tower checker agrees with a direct enumeration") {
    const auto inst = draw_with_top_edge();
    const auto report = verify_tower_property(inst.g, inst.x, inst.p, box);
    CHECK(report.combos_checked > 0);

    const int n = inst.g.vertex_count();
    const std::uint64_t total = std::uint64_t{1} << n;
    const Eigen::MatrixXd xm = inst.x.matrix();
    const Eigen::MatrixXd proj =
        Eigen::MatrixXd::Identity(n, n) -
        xm * (xm.transpose() * xm).inverse() * xm.transpose();

    const auto logw =
        oracles::naive_enumerate_log_weights(inst.g, inst.x, inst.p);
    double shift = logw[0];
    for (double lw : logw) shift = std::max(shift, lw);
    std::vector<double> weight(total);
    Eigen::MatrixXd ffsq(static_cast<Eigen::Index>(total), n);
    for (std::uint64_t k = 0; k < total; ++k) {
      weight[k] = std::exp(logw[k] - shift);
      const SpinConfiguration y = SpinConfiguration::from_bits(n, k);
      Eigen::VectorXd fvec(n);
      for (int j = 0; j < n; ++j) fvec[j] = oracles::naive_f_partial(inst.g, y, j);
      ffsq.row(static_cast<Eigen::Index>(k)) =
          (proj * fvec).array().square().transpose();
    }

    const double factor = std::pow(std::exp(-(0.3 + 1.0 * 0.5)) / 2.0, 2);
    std::set<std::pair<VertexId, std::vector<VertexId>>> combos;
    for (const auto& e : inst.g.edges()) {
      if (static_cast<int>(e.vertices.size()) != 3) continue;
      for (size_t drop = 0; drop < e.vertices.size(); ++drop) {
        std::vector<VertexId> t = e.vertices;
        t.erase(t.begin() + static_cast<std::ptrdiff_t>(drop));
        for (VertexId v : t) combos.emplace(v, t);
      }
    }

    long long checked = 0, violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& [v, t] : combos) {
      Eigen::VectorXd wvec = Eigen::VectorXd::Zero(n);
      for (VertexId j = 0; j < n; ++j) {
        if (j == t[0] || j == t[1]) continue;
        std::vector<VertexId> key = t;
        key.push_back(j);
        if (auto e = inst.g.find_edge(key)) wvec[j] = inst.g.edge(*e).weight;
      }
      const Eigen::VectorXd rhs_lin = proj * wvec;
      const std::uint64_t bit = std::uint64_t{1} << v;
      for (std::uint64_t base = 0; base < total; ++base) {
        if (base & bit) continue;
        const double wsum = weight[base] + weight[base | bit];
        for (int i = 0; i < n; ++i) {
          const double lhs = (weight[base] * ffsq(static_cast<Eigen::Index>(base), i) +
                              weight[base | bit] *
                                  ffsq(static_cast<Eigen::Index>(base | bit), i)) /
                             wsum;
          const double margin = lhs - factor * rhs_lin[i] * rhs_lin[i];
          ++checked;
          if (margin < -1e-10) ++violations;
          min_margin = std::min(min_margin, margin);
        }
      }
    }

    CHECK(report.combos_checked == checked);
    CHECK(report.violations == violations);
    CHECK(report.min_margin == doctest::Approx(min_margin).epsilon(1e-9));
  }

  SUBCASE("enumeration cap is enforced") {
    hising::Xoshiro256pp prng(50);
    const auto inst = testutil::random_instance(prng, 12, 2, 3);
    CHECK_THROWS_AS(verify_parity_lemma(inst.g, inst.x, inst.p, box, 10),
                    hising::TooLarge);
  }
}
