#include <doctest.h>

#include <cmath>
#include <random>

#include "lmkit/infer.hpp"
#include "lmkit/parser.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace lmkit;

namespace {

DesignMatrix plain_design(const Eigen::MatrixXd& X, bool intercept) {
  DesignMatrix dm;
  dm.values = X;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    dm.labels.push_back(intercept && c == 0 ? "Intercept" : "x" + std::to_string(c));
  }
  if (intercept) dm.intercept_col = 0;
  for (Eigen::Index c = intercept ? 1 : 0; c < X.cols(); ++c) {
    TermGroup g;
    g.term = Term({Factor::quantitative("x" + std::to_string(c))});
    g.start = static_cast<int>(c);
    g.count = 1;
    dm.groups.push_back(g);
  }
  return dm;
}

DataTable table_xy(const std::vector<double>& x, const std::vector<double>& y) {
  DataTable t;
  t.add_column("x", Column::numeric(x));
  t.add_column("y", Column::numeric(y));
  return t;
}

}  // namespace

TEST_CASE("exact line has zero residual") {
  FitResult f = fit_model(parse_formula("y ~ 1 + x"),
                          table_xy({0, 1, 2}, {1, 3, 5}));
  CHECK(f.coefficients(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.coefficients(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.sse == doctest::Approx(0.0).scale(1.0).epsilon(1e-18));
}

TEST_CASE("intercept-only fit is the mean") {
  FitResult f = fit_model(parse_formula("y ~ 1"),
                          table_xy({1, 2, 3, 4}, {7.5, 7.5, 7.5, 7.5}));
  CHECK(f.coefficients(0) == doctest::Approx(7.5).epsilon(1e-15));
}

TEST_CASE("simple regression matches the closed form") {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 3, 5, 4};
  FitResult f = fit_model(parse_formula("y ~ 1 + x"), table_xy(x, y));
  // closed-form oracle: b1 = Sxy/Sxx, b0 = ybar - b1*xbar
  double xb = 0, yb = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    xb += x[i] / 4;
    yb += y[i] / 4;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    sxy += (x[i] - xb) * (y[i] - yb);
    sxx += (x[i] - xb) * (x[i] - xb);
  }
  const double b1 = sxy / sxx, b0 = yb - b1 * xb;
  CHECK(b1 == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(b0 == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(f.coefficients(0) == doctest::Approx(b0).epsilon(1e-12));
  CHECK(f.coefficients(1) == doctest::Approx(b1).epsilon(1e-12));
}

TEST_CASE("coefficients match the normal-equation oracle on random designs") {
  std::mt19937 rng(10001);
  std::uniform_int_distribution<int> ns(12, 50), ps(2, 8);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = ns(rng), p = ps(rng);
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    X.col(0).setOnes();
    for (int i = 0; i < n; ++i) {
      for (int j = 1; j < p; ++j) X(i, j) = nd(rng);
      y(i) = nd(rng);
    }
    FitResult f = ols_fit(plain_design(X, true), y);
    Eigen::VectorXd expected = oracle::normal_equation_fit(X, y);
    for (int j = 0; j < p; ++j) {
      CHECK(f.coefficients(j) ==
            doctest::Approx(expected(j)).epsilon(1e-8).scale(1.0));
    }
    // residuals are orthogonal to the design
    Eigen::VectorXd xtr = X.transpose() * f.residuals;
    CHECK(xtr.cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, y.norm()));
    // fitted + residual reproduces the response
    CHECK((f.fitted + f.residuals - y).cwiseAbs().maxCoeff() <= 1e-12);
    // cov_unscaled agrees with the oracle inverse
    Eigen::MatrixXd cov = (X.transpose() * X).fullPivLu().inverse();
    CHECK((f.cov_unscaled - cov).cwiseAbs().maxCoeff() <=
          1e-7 * cov.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("rank-deficient designs name the dependent columns") {
  Eigen::MatrixXd X(6, 3);
  for (int i = 0; i < 6; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = i;
    X(i, 2) = 2.0 * i;  // collinear with column 1
  }
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(6, 0.0, 5.0);
  try {
    ols_fit(plain_design(X, true), y);
    FAIL("expected a rank error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("rank deficient") != std::string::npos);
    CHECK(std::string(e.what()).find("x") != std::string::npos);
  }
}

TEST_CASE("more columns than rows is an error") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(3, 4);
  Eigen::VectorXd y = Eigen::VectorXd::Random(3);
  CHECK_THROWS_AS(ols_fit(plain_design(X, false), y), Error);
}

TEST_CASE("coefficient table inference") {
  std::mt19937 rng(10002);
  oracle::NormalSampler normal(42);
  const int n = 40;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = i * 0.25;
    y[static_cast<std::size_t>(i)] = 2.0 + 0.5 * x[static_cast<std::size_t>(i)] + 0.3 * normal();
  }
  FitResult f = fit_model(parse_formula("y ~ 1 + x"), table_xy(x, y));
  CoefficientTable ct = coefficient_table(f, 0.05);
  REQUIRE(ct.rows.size() == 2);
  const CoefficientRow& slope = ct.rows[1];
  CHECK(slope.label == "x");
  // SE_j = sqrt(sigma2 * (X'X)^-1_jj)
  CHECK(slope.std_error ==
        doctest::Approx(std::sqrt(f.sigma2() * f.cov_unscaled(1, 1))).epsilon(1e-12));
  CHECK(slope.t_stat == doctest::Approx(slope.estimate / slope.std_error).epsilon(1e-12));
  CHECK(slope.p_value == doctest::Approx(student_t_two_sided_p(
                              slope.t_stat, static_cast<double>(f.df_resid)))
                             .epsilon(1e-12));
  // CI is symmetric about the estimate
  CHECK(slope.ci_upper - slope.estimate ==
        doctest::Approx(slope.estimate - slope.ci_lower).epsilon(1e-12));
  // a wider alpha gives a narrower interval
  CoefficientTable wide = coefficient_table(f, 0.2);
  CHECK(wide.rows[1].ci_upper < slope.ci_upper);
  CHECK_THROWS_AS(coefficient_table(f, 0.0), Error);
}

TEST_CASE("zero-residual fits report undefined t") {
  FitResult f = fit_model(parse_formula("y ~ 1 + x"), table_xy({0, 1, 2}, {1, 3, 5}));
  CoefficientTable ct = coefficient_table(f);
  CHECK(ct.rows[0].std_error == 0.0);
  CHECK(std::isnan(ct.rows[0].t_stat));
  CHECK(std::isnan(ct.rows[0].p_value));
  CHECK(ct.rows[0].ci_lower == ct.rows[0].estimate);
}

TEST_CASE("predictions reproduce fitted values on the training rows") {
  std::mt19937 rng(10003);
  DataTable t = gen::random_table(rng, 45);
  ModelSpec spec = parse_formula("Log(resp) ~ 1 + x1 + g1 + (x1)(g1)");
  FitResult f = fit_model(spec, t);
  PredictionTable pred = predict(f, t);
  REQUIRE(pred.values.size() == 45);
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    CHECK(pred.values[i] == f.fitted(static_cast<Eigen::Index>(i)));
  }
  CHECK(pred.header == "Predicted Log(resp)");
}

TEST_CASE("prediction intervals contain confidence intervals") {
  std::mt19937 rng(10004);
  DataTable t = gen::random_table(rng, 45);
  ModelSpec spec = parse_formula("resp ~ 1 + x1 + x2");
  FitResult f = fit_model(spec, t);
  PredictionTable ci = predict(f, t, IntervalKind::Confidence, 0.05);
  PredictionTable pi = predict(f, t, IntervalKind::Prediction, 0.05);
  for (std::size_t i = 0; i < ci.values.size(); ++i) {
    CHECK(pi.lower[i] <= ci.lower[i]);
    CHECK(pi.upper[i] >= ci.upper[i]);
    CHECK(ci.lower[i] <= ci.upper[i]);
  }
}

TEST_CASE("prediction on unseen levels or missing columns fails") {
  DataTable train = read_delimited_text("y,g\n1,a\n2,b\n3,a\n4,b\n");
  FitResult f = fit_model(parse_formula("y ~ 1 + g"), train);
  DataTable unseen = read_delimited_text("g\nc\n");
  CHECK_THROWS_AS(predict(f, unseen), Error);
  DataTable missing = read_delimited_text("h\n1\n");
  CHECK_THROWS_AS(predict(f, missing), Error);
}

TEST_CASE("r squared") {
  FitResult perfect = fit_model(parse_formula("y ~ 1 + x"), table_xy({0, 1, 2}, {1, 3, 5}));
  CHECK(r_squared(perfect) == doctest::Approx(1.0).epsilon(1e-12));

  FitResult mean_only =
      fit_model(parse_formula("y ~ 1"), table_xy({1, 2, 3, 4}, {2, 4, 3, 5}));
  CHECK(r_squared(mean_only) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  FitResult flat = fit_model(parse_formula("y ~ 1 + x"), table_xy({1, 2, 3}, {5, 5, 5}));
  CHECK_THROWS_AS(r_squared(flat), Error);

  std::mt19937 rng(10005);
  DataTable t = gen::random_table(rng, 30);
  FitResult f = fit_model(parse_formula("resp ~ 1 + x1 + x2"), t);
  const double r2 = r_squared(f);
  const double expected_adj =
      1.0 - (1.0 - r2) * static_cast<double>(f.n - 1) / static_cast<double>(f.df_resid);
  CHECK(r_squared(f, true) == doctest::Approx(expected_adj).epsilon(1e-12));
}

TEST_CASE("information criteria match the formula oracle") {
  // n = 10, sse = 10: alternating +/-1 about a zero mean
  std::vector<double> y(10), x(10);
  for (int i = 0; i < 10; ++i) {
    y[static_cast<std::size_t>(i)] = (i % 2 == 0) ? 1.0 : -1.0;
    x[static_cast<std::size_t>(i)] = i;
  }
  FitResult f = fit_model(parse_formula("y ~ 1"), table_xy(x, y));
  CHECK(f.sse == doctest::Approx(10.0).epsilon(1e-12));
  auto [aic, bic] = information_criteria(f);
  auto [aic_o, bic_o] = oracle::information_criteria(f.sse, f.n, f.rank);
  CHECK(aic == doctest::Approx(aic_o).epsilon(1e-12));
  CHECK(bic == doctest::Approx(bic_o).epsilon(1e-12));
  // BIC - AIC = k (ln n - 2) exactly
  const double k = static_cast<double>(f.rank + 1);
  CHECK(bic - aic ==
        doctest::Approx(k * (std::log(10.0) - 2.0)).epsilon(1e-12));

  FitResult exact = fit_model(parse_formula("y ~ 1 + x"), table_xy({0, 1, 2}, {1, 3, 5}));
  CHECK_THROWS_AS(information_criteria(exact), Error);
}

TEST_CASE("appending a column never decreases R^2") {
  std::mt19937 rng(10006);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 30;
    std::vector<double> x1(n), x2(n), y(n);
    for (int i = 0; i < n; ++i) {
      x1[static_cast<std::size_t>(i)] = nd(rng);
      x2[static_cast<std::size_t>(i)] = nd(rng);
      y[static_cast<std::size_t>(i)] = nd(rng);
    }
    DataTable t;
    t.add_column("x1", Column::numeric(x1));
    t.add_column("x2", Column::numeric(x2));
    t.add_column("y", Column::numeric(y));
    const double small = r_squared(fit_model(parse_formula("y ~ 1 + x1"), t));
    const double big = r_squared(fit_model(parse_formula("y ~ 1 + x1 + x2"), t));
    CHECK(big >= small - 1e-12);
  }
}

TEST_CASE("residual diagnostics") {
  FitResult exact = fit_model(parse_formula("y ~ 1 + x"), table_xy({0, 1, 2}, {1, 3, 5}));
  DiagnosticPanels d = residual_diagnostics(exact);
  for (const auto& [q, r] : d.qq) CHECK(std::fabs(r) < 1e-12);

  // Sturges: n = 100 gives ceil(log2 100) + 1 = 8 bins
  oracle::NormalSampler normal(7);
  std::vector<double> x(100), y(100);
  for (int i = 0; i < 100; ++i) {
    x[static_cast<std::size_t>(i)] = i;
    y[static_cast<std::size_t>(i)] = normal();
  }
  DiagnosticPanels d100 = residual_diagnostics(fit_model(parse_formula("y ~ 1 + x"), table_xy(x, y)));
  CHECK(d100.histogram.counts.size() == 8);
  long total = 0;
  for (long c : d100.histogram.counts) total += c;
  CHECK(total == 100);
  CHECK(d100.fitted_vs_residual.size() == 100);
  CHECK(d100.order_vs_residual[17].first == 17.0);

  // standard-normal residuals give a Q-Q slope near one
  std::vector<double> xs(1000), ys(1000);
  oracle::NormalSampler seeded(12345);
  for (int i = 0; i < 1000; ++i) {
    xs[static_cast<std::size_t>(i)] = i * 0.01;
    ys[static_cast<std::size_t>(i)] = seeded();
  }
  DiagnosticPanels big = residual_diagnostics(fit_model(parse_formula("y ~ 1"),
                                                        table_xy(xs, ys)));
  double sxx = 0, sxy = 0;
  for (const auto& [q, r] : big.qq) {
    sxx += q * q;
    sxy += q * r;
  }
  CHECK(std::fabs(sxy / sxx - 1.0) < 0.1);
}

TEST_CASE("residual vs predictor pairs") {
  std::mt19937 rng(10007);
  DataTable t = gen::random_table(rng, 40);
  FitResult f = fit_model(parse_formula("resp ~ 1 + x1 + x2"), t);
  auto pairs = residual_vs_predictor(f, "x1");
  REQUIRE(pairs.size() == 40);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(pairs[i].first == t.column("x1").number(i));
    CHECK(pairs[i].second == f.residuals(static_cast<Eigen::Index>(i)));
  }
  CHECK_THROWS_AS(residual_vs_predictor(f, "nope"), Error);
  CHECK_THROWS_AS(residual_vs_predictor(f, "g1"), Error);
}

TEST_CASE("partial regression recovers the coefficient") {
  // orthogonal two-column design: the partial slope is the plain slope
  const int n = 24;
  std::vector<double> x1(n), x2(n), y(n);
  std::mt19937 rng(10008);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    x1[static_cast<std::size_t>(i)] = (i % 2 == 0) ? 1.0 : -1.0;
    x2[static_cast<std::size_t>(i)] = (i % 4 < 2) ? 1.0 : -1.0;
    y[static_cast<std::size_t>(i)] = 0.7 * x1[static_cast<std::size_t>(i)] + nd(rng);
  }
  DataTable t;
  t.add_column("x1", Column::numeric(x1));
  t.add_column("x2", Column::numeric(x2));
  t.add_column("y", Column::numeric(y));
  FitResult f = fit_model(parse_formula("y ~ 1 + x1 + x2"), t);

  auto check_fw = [&](const std::string& var, Eigen::Index col) {
    auto pairs = partial_regression(f, var);
    double sxx = 0, sxy = 0;
    for (const auto& [a, b] : pairs) {
      sxx += a * a;
      sxy += a * b;
    }
    CHECK(sxy / sxx == doctest::Approx(f.coefficients(col)).epsilon(1e-8));
  };
  check_fw("x1", 1);
  check_fw("x2", 2);

  // the Frisch-Waugh identity holds on arbitrary designs
  std::mt19937 rng2(10009);
  DataTable t2 = gen::random_table(rng2, 35);
  FitResult f2 = fit_model(parse_formula("resp ~ 1 + x1 + x2 + g1"), t2);
  auto pairs = partial_regression(f2, "x1");
  double sxx = 0, sxy = 0;
  for (const auto& [a, b] : pairs) {
    sxx += a * a;
    sxy += a * b;
  }
  CHECK(sxy / sxx == doctest::Approx(f2.coefficients(1)).epsilon(1e-8));

  // single-predictor model: the partial plot is the centered scatter
  FitResult f3 = fit_model(parse_formula("y ~ 1 + x1"), t);
  auto centered = partial_regression(f3, "x1");
  double xbar = 0, ybar = 0;
  for (int i = 0; i < n; ++i) {
    xbar += x1[static_cast<std::size_t>(i)] / n;
    ybar += y[static_cast<std::size_t>(i)] / n;
  }
  for (int i = 0; i < n; ++i) {
    CHECK(centered[static_cast<std::size_t>(i)].first ==
          doctest::Approx(x1[static_cast<std::size_t>(i)] - xbar).epsilon(1e-10));
    CHECK(centered[static_cast<std::size_t>(i)].second ==
          doctest::Approx(y[static_cast<std::size_t>(i)] - ybar).epsilon(1e-10));
  }
}

TEST_CASE("baseline changes do not move fitted values") {
  std::mt19937 rng(10010);
  DataTable t = gen::random_table(rng, 50);
  FitResult a = fit_model(parse_formula("resp ~ 1 + x1 + g2 + (x1)(g2)"), t);
  FitResult b = fit_model(
      parse_formula("resp ~ 1 + x1 + C(g2, baseline=\"mid\") + (x1)(C(g2, baseline=\"mid\"))"), t);
  CHECK((a.fitted - b.fitted).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(a.sse == doctest::Approx(b.sse).epsilon(1e-10));
}
