#include <doctest.h>

#include <cstring>
#include <random>

#include "lmkit/design.hpp"
#include "lmkit/parser.hpp"
#include "support/generators.hpp"

using namespace lmkit;

namespace {

const char* kSample =
    "SalePrice,Style,SqFt,Fire\n"
    "162000,2 Story,1400,No\n"
    "195000,2 Story,1660,No\n"
    "164000,Other,1646,Yes\n"
    "417500,1 Story,2464,Yes\n"
    "186800,1 Story,1400,No\n";

DataTable sample() { return read_delimited_text(kSample); }

}  // namespace

TEST_CASE("levels are sorted and the baseline defaults to the smallest") {
  DataTable t = sample();
  ModelSpec m = parse_formula("SalePrice ~ 1 + C(Style)");
  EncodingState s = fit_encoding(m, t);
  const CategoricalEncoding& enc = s.category("Style");
  CHECK(enc.levels == std::vector<std::string>{"1 Story", "2 Story", "Other"});
  CHECK(enc.baseline == "1 Story");
}

TEST_CASE("baseline override") {
  DataTable t = sample();
  EncodingState s =
      fit_encoding(parse_formula("SalePrice ~ C(Style, baseline=\"Other\")"), t);
  CHECK(s.category("Style").baseline == "Other");

  CHECK_THROWS_AS(
      fit_encoding(parse_formula("SalePrice ~ C(Style, baseline=\"3 Story\")"), t),
      Error);
}

TEST_CASE("centering statistics are learned from the data") {
  DataTable t = sample();
  ModelSpec m = parse_formula("SalePrice ~ 1 + Cen(SqFt)");
  EncodingState s = fit_encoding(m, t);
  const SiteStats* st = s.site("(SqFt-E(SqFt))");
  REQUIRE(st != nullptr);
  // arithmetic mean of 1400, 1660, 1646, 2464, 1400
  CHECK(st->mean == doctest::Approx(1714.0).epsilon(1e-14));
}

TEST_CASE("standardize requires a positive standard deviation") {
  DataTable t = read_delimited_text("y,x\n1,5\n2,5\n3,5\n");
  CHECK_THROWS_AS(fit_encoding(parse_formula("y ~ Std(x)"), t), Error);
}

TEST_CASE("unknown columns are named") {
  DataTable t = sample();
  CHECK_THROWS_WITH_AS(fit_encoding(parse_formula("SalePrice ~ Sqft"), t),
                       "unknown column 'Sqft'", Error);
}

TEST_CASE("untyped variables resolve by column content") {
  DataTable t = sample();
  ModelSpec m = parse_formula("SalePrice ~ 1 + SqFt + Style");
  EncodingState s = fit_encoding(m, t);
  CHECK(s.resolved_type("SqFt") == VarType::Quantitative);
  CHECK(s.resolved_type("Style") == VarType::Categorical);
  ModelSpec r = s.resolve(m);
  CHECK(r.terms()[0].factors().front().var_type() == VarType::Quantitative);
  CHECK(r.terms()[1].factors().front().var_type() == VarType::Categorical);
}

TEST_CASE("dummy coding produces one column per non-baseline level") {
  DataTable t = sample();
  ModelSpec m = parse_formula("SalePrice ~ 1 + Style");
  EncodingState s = fit_encoding(m, t);
  DesignMatrix dm = build_matrix(m, t, s);
  REQUIRE(dm.labels.size() == 3);
  CHECK(dm.labels[0] == "Intercept");
  CHECK(dm.labels[1] == "Style{2 Story}");
  CHECK(dm.labels[2] == "Style{Other}");
  // row 0 has Style = "2 Story"
  CHECK(dm.values(0, 1) == 1.0);
  CHECK(dm.values(0, 2) == 0.0);
  // row 3 has Style = "1 Story", the baseline
  CHECK(dm.values(3, 1) == 0.0);
  CHECK(dm.values(3, 2) == 0.0);
}

TEST_CASE("interaction columns are products over the level grid") {
  DataTable t = sample();
  ModelSpec m = parse_formula("SalePrice ~ 1 + (Style)(Fire)");
  EncodingState s = fit_encoding(m, t);
  DesignMatrix dm = build_matrix(m, t, s);
  REQUIRE(dm.labels.size() == 3);
  CHECK(dm.labels[1] == "(Fire{Yes})(Style{2 Story})");
  CHECK(dm.labels[2] == "(Fire{Yes})(Style{Other})");
  REQUIRE(dm.groups.size() == 1);
  CHECK(dm.groups.front().count == 2);
  // row 2: Other + Yes
  CHECK(dm.values(2, 2) == 1.0);
  CHECK(dm.values(2, 1) == 0.0);

  ModelSpec qm = parse_formula("SalePrice ~ 1 + (SqFt)(Fire)");
  DesignMatrix qdm = build_matrix(qm, t, fit_encoding(qm, t));
  CHECK(qdm.labels[1] == "(SqFt)(Fire{Yes})");
  CHECK(qdm.values(3, 1) == 2464.0);
  CHECK(qdm.values(0, 1) == 0.0);
}

TEST_CASE("group size formula: product of (levels - 1)") {
  std::mt19937 rng(9001);
  DataTable t = gen::random_table(rng, 40);
  ModelSpec m = parse_formula("resp ~ 1 + (g1)(g2) + (x1)(g2) + (g1)(g2)(kind)");
  EncodingState s = fit_encoding(m, t);
  DesignMatrix dm = build_matrix(m, t, s);
  for (const TermGroup& g : dm.groups) {
    int expected = 1;
    for (const Factor& f : g.term.factors()) {
      if (f.known_categorical()) {
        expected *= static_cast<int>(s.category(f.name()).levels.size()) - 1;
      }
    }
    CHECK(g.count == expected);
  }
}

TEST_CASE("indicator columns of one variable sum to at most one") {
  std::mt19937 rng(9002);
  DataTable t = gen::random_table(rng, 60);
  ModelSpec m = parse_formula("resp ~ 1 + kind");
  EncodingState s = fit_encoding(m, t);
  DesignMatrix dm = build_matrix(m, t, s);
  const auto& enc = s.category("kind");
  for (std::size_t i = 0; i < t.nrows(); ++i) {
    double sum = 0.0;
    for (int c = 1; c < dm.values.cols(); ++c) sum += dm.values(static_cast<int>(i), c);
    CHECK(sum <= 1.0);
    const bool baseline_row = t.column("kind").text_value(i) == enc.baseline;
    CHECK(sum == (baseline_row ? 0.0 : 1.0));
  }
}

TEST_CASE("rebuilding on the training table is bit identical") {
  std::mt19937 rng(9003);
  DataTable t = gen::random_table(rng, 50);
  ModelSpec m = parse_formula(
      "Log(resp) ~ 1 + Poly(Cen(x1), 2) + g1 + (x2)(g1) + Std(x2)");
  EncodingState s = fit_encoding(m, t);
  DesignMatrix a = build_matrix(m, t, s);
  DesignMatrix b = build_matrix(m, t, s);
  REQUIRE(a.values.size() == b.values.size());
  CHECK(std::memcmp(a.values.data(), b.values.data(),
                    sizeof(double) * static_cast<std::size_t>(a.values.size())) == 0);
  CHECK(a.labels == b.labels);
}

TEST_CASE("center inside a power is computed on the raw variable first") {
  DataTable t = sample();
  ModelSpec m = parse_formula("SalePrice ~ 1 + (SqFt-E(SqFt))^2");
  EncodingState s = fit_encoding(m, t);
  DesignMatrix dm = build_matrix(m, t, s);
  const double mean = 1714.0;
  CHECK(dm.labels[1] == "(SqFt-E(SqFt))^2");
  for (int i = 0; i < 5; ++i) {
    const double x = t.column("SqFt").number(static_cast<std::size_t>(i));
    CHECK(dm.values(i, 1) == doctest::Approx((x - mean) * (x - mean)).epsilon(1e-14));
  }
}

TEST_CASE("unseen levels at transform time are an error") {
  DataTable train = sample();
  ModelSpec m = parse_formula("SalePrice ~ 1 + Style");
  EncodingState s = fit_encoding(m, train);
  DataTable other = read_delimited_text(
      "SalePrice,Style,SqFt,Fire\n100,3 Story,1000,No\n");
  try {
    build_matrix(m, other, s);
    FAIL("expected an unseen-level error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("3 Story") != std::string::npos);
    CHECK(msg.find("Style") != std::string::npos);
  }
}

TEST_CASE("transform domain errors report row and variable") {
  DataTable t = read_delimited_text("y,x\n1,2\n2,-3\n3,4\n");
  ModelSpec m = parse_formula("y ~ 1 + Log(x)");
  try {
    EncodingState s = fit_encoding(m, t);
    build_matrix(m, t, s);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 1") != std::string::npos);
    CHECK(msg.find("Log(x)") != std::string::npos);
  }
}

TEST_CASE("rows with missing cells are dropped with a count") {
  DataTable t = read_delimited_text("y,x,z\n1,2,a\n2,,b\n3,4,\n4,5,c\n");
  ModelSpec m = parse_formula("y ~ 1 + x + z");
  RowFilterResult r = drop_incomplete_rows(m, t);
  CHECK(r.dropped == 2);
  CHECK(r.table.nrows() == 2);
  // columns the model does not reference do not trigger drops
  ModelSpec mx = parse_formula("y ~ 1 + x");
  CHECK(drop_incomplete_rows(mx, t).dropped == 1);
}

TEST_CASE("elementwise transforms") {
  std::vector<double> v{3.0, -1.0};
  CHECK(eval_transform(TransformKind::Identity, v) == v);
  CHECK(eval_transform(TransformKind::Log, std::vector<double>{std::exp(1.0)})[0] ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_transform(TransformKind::Log10, std::vector<double>{100.0})[0] ==
        doctest::Approx(2.0).epsilon(1e-15));
  SiteStats st{2.0, 1.0};
  CHECK(eval_transform(TransformKind::Center, std::vector<double>{1.0, 2.0, 3.0}, &st) ==
        std::vector<double>{-1.0, 0.0, 1.0});
  CHECK_THROWS_AS(eval_transform(TransformKind::Log, std::vector<double>{0.0}), Error);
  CHECK_THROWS_AS(eval_transform(TransformKind::Center, std::vector<double>{1.0}), Error);
}

TEST_CASE("inverse transforms") {
  CHECK(inverse_transform(TransformKind::Log, std::vector<double>{11.82})[0] ==
        doctest::Approx(std::exp(11.82)).epsilon(1e-15));
  CHECK_THROWS_AS(inverse_transform(TransformKind::Sin, std::vector<double>{0.5}), Error);
  CHECK_THROWS_AS(inverse_transform(TransformKind::Cos, std::vector<double>{0.5}), Error);
  CHECK_THROWS_AS(inverse_transform(TransformKind::Exp, std::vector<double>{-1.0}), Error);

  // inverse(forward(x)) == x for every invertible kind
  std::mt19937 rng(9004);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  SiteStats st{1.3, 0.7};
  for (TransformKind k : {TransformKind::Log, TransformKind::Log10,
                          TransformKind::Exp, TransformKind::Center,
                          TransformKind::Standardize, TransformKind::Identity}) {
    std::vector<double> x(32);
    for (double& v : x) v = u(rng);
    std::vector<double> forward = eval_transform(k, x, &st);
    std::vector<double> back = inverse_transform(k, forward, &st);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("response evaluation rejects categorical responses") {
  DataTable t = sample();
  ModelSpec m = parse_formula("Style ~ 1 + SqFt");
  EncodingState s = fit_encoding(m, t);
  CHECK_THROWS_AS(eval_response(m, t, s), Error);
}
