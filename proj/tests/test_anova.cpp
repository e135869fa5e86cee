#include <doctest.h>

#include <cmath>
#include <random>

#include "lmkit/anova.hpp"
#include "lmkit/parser.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace lmkit;

namespace {

DataTable table_xy(const std::vector<double>& x, const std::vector<double>& y) {
  DataTable t;
  t.add_column("x", Column::numeric(x));
  t.add_column("y", Column::numeric(y));
  return t;
}

}  // namespace

TEST_CASE("single-variable model: per-term F equals t squared") {
  std::mt19937 rng(11001);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> x(30), y(30);
  for (int i = 0; i < 30; ++i) {
    x[static_cast<std::size_t>(i)] = nd(rng);
    y[static_cast<std::size_t>(i)] = 0.4 * x[static_cast<std::size_t>(i)] + nd(rng);
  }
  FitResult f = fit_model(parse_formula("y ~ 1 + x"), table_xy(x, y));
  AnovaTable at = anova_single(f);
  CoefficientTable ct = coefficient_table(f);
  REQUIRE(at.rows.size() == 3);  // Global, - x, Error
  const double t_stat = ct.rows[1].t_stat;
  CHECK(*at.rows[1].f_stat == doctest::Approx(t_stat * t_stat).epsilon(1e-8));
  // with one term, the global test and the term test coincide
  CHECK(*at.rows[0].f_stat == doctest::Approx(*at.rows[1].f_stat).epsilon(1e-10));
  CHECK(at.rows[2].label == "Error");
  CHECK(at.rows[2].df == f.df_resid);
}

TEST_CASE("anova table structure on a multi-term model") {
  std::mt19937 rng(11002);
  DataTable t = gen::random_table(rng, 60);
  FitResult f = fit_model(parse_formula("resp ~ 1 + x1 + g1 + (x1)(g1)"), t);
  AnovaTable at = anova_single(f);
  REQUIRE(at.rows.size() == 5);
  CHECK(at.rows[0].label == "Global Test");
  // global df equals the non-intercept column count
  CHECK(at.rows[0].df == f.rank - 1);
  CHECK(*at.rows[0].ss_regression == doctest::Approx(f.ss_total - f.sse).epsilon(1e-10));
  for (std::size_t i = 1; i + 1 < at.rows.size(); ++i) {
    CHECK(at.rows[i].label.substr(0, 2) == "- ");
    // reduced models never fit better than the full model
    CHECK(*at.rows[i].ss_error >= f.sse - 1e-9);
    // the reduced fit's sums decompose the total
    CHECK(*at.rows[i].ss_error + *at.rows[i].ss_regression ==
          doctest::Approx(f.ss_total).epsilon(1e-9));
    CHECK(*at.rows[i].p_value >= 0.0);
    CHECK(*at.rows[i].p_value <= 1.0);
    CHECK(*at.rows[i].f_stat >= 0.0);
  }
}

TEST_CASE("dropping a term with zero contribution gives F = 0") {
  // x2 is orthogonal to both the intercept and x1, and orthogonal to y
  const int n = 8;
  std::vector<double> x1{1, -1, 1, -1, 1, -1, 1, -1};
  std::vector<double> x2{1, 1, -1, -1, 1, 1, -1, -1};
  std::vector<double> y{1, -1, 1, -1, 1, -1, 1, -1};  // exactly x1
  DataTable t;
  t.add_column("x1", Column::numeric(x1));
  t.add_column("x2", Column::numeric(x2));
  t.add_column("y", Column::numeric(y));
  // add noise orthogonal to everything so sse > 0
  std::vector<double> y2 = y;
  y2[0] += 0.1;
  y2[1] += 0.1;
  y2[2] -= 0.1;
  y2[3] -= 0.1;
  y2[4] -= 0.1;
  y2[5] -= 0.1;
  y2[6] += 0.1;
  y2[7] += 0.1;
  DataTable t2;
  t2.add_column("x1", Column::numeric(x1));
  t2.add_column("x2", Column::numeric(x2));
  t2.add_column("y", Column::numeric(y2));
  FitResult f = fit_model(parse_formula("y ~ 1 + x1 + x2"), t2);
  AnovaTable at = anova_single(f);
  for (const AnovaRow& row : at.rows) {
    if (row.label == "- x2") {
      CHECK(*row.f_stat == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("null per-term F averages one") {
  // orthonormal predictor with zero true effect, fixed seed
  oracle::NormalSampler normal(11003);
  const int n = 50, reps = 1000;
  double sum_f = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] = normal();
      y[static_cast<std::size_t>(i)] = normal();  // no dependence on x
    }
    FitResult f = fit_model(parse_formula("y ~ 1 + x"), table_xy(x, y));
    AnovaTable at = anova_single(f);
    sum_f += *at.rows[1].f_stat;
  }
  const double mean_f = sum_f / reps;
  CHECK(std::fabs(mean_f - 1.0) < 0.15);
}

TEST_CASE("nested models") {
  std::mt19937 rng(11004);
  DataTable t = gen::random_table(rng, 70);
  FitResult full = fit_model(parse_formula("resp ~ 1 + x1 + g1 + (x1)(g1)"), t);
  FitResult reduced = fit_model(parse_formula("resp ~ 1 + x1 + g1"), t);

  AnovaTable at = anova_nested(full, reduced);
  REQUIRE(at.rows.size() == 3);
  CHECK(at.rows[0].label == "Full Model");
  CHECK(at.rows[0].df == full.rank - 1);
  CHECK(at.rows[1].df == full.rank - reduced.rank);
  CHECK(*at.rows[1].ss_error >= *at.rows[0].ss_error);
  const double expected_f = ((reduced.sse - full.sse) /
                             static_cast<double>(full.rank - reduced.rank)) /
                            full.sigma2();
  CHECK(*at.rows[1].f_stat == doctest::Approx(expected_f).epsilon(1e-12));
  CHECK(at.rows[2].df == full.df_resid);

  // comparing a model against the intercept-only model reproduces the
  // omnibus row
  FitResult intercept_only = fit_model(parse_formula("resp ~ 1"), t);
  AnovaTable vs_null = anova_nested(full, intercept_only);
  AnovaTable single = anova_single(full);
  CHECK(*vs_null.rows[1].f_stat ==
        doctest::Approx(*single.rows[0].f_stat).epsilon(1e-10));
  CHECK(vs_null.rows[1].df == single.rows[0].df);
}

TEST_CASE("nested model errors") {
  std::mt19937 rng(11005);
  DataTable t = gen::random_table(rng, 40);
  FitResult full = fit_model(parse_formula("resp ~ 1 + x1 + x2"), t);
  FitResult reduced = fit_model(parse_formula("resp ~ 1 + x1"), t);
  FitResult other = fit_model(parse_formula("resp ~ 1 + g1"), t);

  CHECK_THROWS_WITH_AS(anova_nested(full, full), "models are identical; nothing to test",
                       Error);
  // swapped arguments: the "reduced" model has terms the full one lacks
  try {
    anova_nested(reduced, full);
    FAIL("expected a non-nested error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("x2") != std::string::npos);
  }
  CHECK_THROWS_AS(anova_nested(full, other), Error);

  DataTable shorter = gen::random_table(rng, 30);
  FitResult small = fit_model(parse_formula("resp ~ 1 + x1"), shorter);
  CHECK_THROWS_AS(anova_nested(full, small), Error);

  FitResult log_resp = fit_model(parse_formula("Log(resp) ~ 1 + x1"), t);
  CHECK_THROWS_AS(anova_nested(full, log_resp), Error);
}

TEST_CASE("anova without an intercept is rejected") {
  std::mt19937 rng(11006);
  DataTable t = gen::random_table(rng, 30);
  FitResult f = fit_model(parse_formula("resp ~ x1"), t);
  CHECK_THROWS_AS(anova_single(f), Error);
}
