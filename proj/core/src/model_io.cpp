#include "lmkit/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lmkit/parser.hpp"

namespace lmkit {

namespace {

constexpr const char* kFormatTag = "lmkit.model/1";

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  const auto cols = rows ? j.at(0).size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          j.at(i).at(c).get<double>();
    }
  }
  return m;
}

const char* var_type_tag(VarType t) {
  switch (t) {
    case VarType::Quantitative: return "Q";
    case VarType::Categorical: return "C";
    case VarType::Untyped: return "V";
  }
  return "V";
}

VarType var_type_from_tag(const std::string& tag) {
  if (tag == "Q") return VarType::Quantitative;
  if (tag == "C") return VarType::Categorical;
  return VarType::Untyped;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file '" + tmp + "'");
    out << content;
    if (!out) throw Error("failed writing '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

void save_model(const FitResult& f, const std::string& path) {
  const ModelSpec& spec = f.model();
  json doc;
  doc["format"] = kFormatTag;
  doc["formula"] = spec.display_typed();
  doc["display"] = spec.display();
  doc["response_label"] = f.response_label;

  json enc;
  json cats = json::object();
  for (const auto& [name, ce] : f.encoding.categories()) {
    cats[name] = {{"levels", ce.levels}, {"baseline", ce.baseline}};
  }
  enc["categories"] = std::move(cats);
  json sites = json::object();
  for (const auto& [key, st] : f.encoding.sites()) {
    sites[key] = {{"mean", st.mean}, {"stddev", st.stddev}};
  }
  enc["sites"] = std::move(sites);
  json resolved = json::object();
  for (const auto& [name, type] : f.encoding.resolved()) {
    resolved[name] = var_type_tag(type);
  }
  enc["resolved"] = std::move(resolved);
  doc["encoding"] = std::move(enc);

  doc["columns"] = f.column_labels;
  doc["coefficients"] =
      std::vector<double>(f.coefficients.data(), f.coefficients.data() + f.coefficients.size());
  doc["cov_unscaled"] = matrix_to_json(f.cov_unscaled);
  doc["sse"] = f.sse;
  doc["ss_total"] = f.ss_total;
  doc["n"] = f.n;
  doc["rank"] = f.rank;
  doc["df_resid"] = f.df_resid;
  doc["dropped_rows"] = f.dropped_rows;
  doc["intercept_col"] = f.intercept_col ? json(*f.intercept_col) : json(nullptr);

  json groups = json::array();
  for (const TermGroup& g : f.groups) {
    groups.push_back({{"term", g.term.display_typed()},
                      {"start", g.start},
                      {"count", g.count}});
  }
  doc["groups"] = std::move(groups);

  write_file_atomic(path, doc.dump(2) + "\n");
}

FitResult load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw Error("model file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.contains("format") || doc["format"] != kFormatTag) {
    throw Error("model file '" + path + "' has an unsupported format tag");
  }

  FitResult f;
  ModelSpec spec = parse_formula(doc.at("formula").get<std::string>());
  f.response_label = doc.at("response_label").get<std::string>();

  const json& enc = doc.at("encoding");
  for (const auto& [name, ce] : enc.at("categories").items()) {
    CategoricalEncoding c;
    c.levels = ce.at("levels").get<std::vector<std::string>>();
    c.baseline = ce.at("baseline").get<std::string>();
    f.encoding.set_category(name, std::move(c));
  }
  for (const auto& [key, st] : enc.at("sites").items()) {
    f.encoding.set_site(key, {st.at("mean").get<double>(), st.at("stddev").get<double>()});
  }
  for (const auto& [name, tag] : enc.at("resolved").items()) {
    f.encoding.set_resolved(name, var_type_from_tag(tag.get<std::string>()));
  }
  f.spec = f.encoding.resolve(spec);

  f.column_labels = doc.at("columns").get<std::vector<std::string>>();
  auto coefs = doc.at("coefficients").get<std::vector<double>>();
  f.coefficients = Eigen::Map<Eigen::VectorXd>(coefs.data(),
                                               static_cast<Eigen::Index>(coefs.size()));
  f.cov_unscaled = matrix_from_json(doc.at("cov_unscaled"));
  f.sse = doc.at("sse").get<double>();
  f.ss_total = doc.at("ss_total").get<double>();
  f.n = doc.at("n").get<long>();
  f.rank = doc.at("rank").get<long>();
  f.df_resid = doc.at("df_resid").get<long>();
  f.dropped_rows = doc.at("dropped_rows").get<std::size_t>();
  if (!doc.at("intercept_col").is_null()) {
    f.intercept_col = doc.at("intercept_col").get<int>();
  }
  for (const json& g : doc.at("groups")) {
    TermGroup tg;
    ModelSpec tmp = parse_formula("y ~ " + g.at("term").get<std::string>());
    tg.term = f.encoding.resolve(tmp).terms().front();
    tg.start = g.at("start").get<int>();
    tg.count = g.at("count").get<int>();
    f.groups.push_back(std::move(tg));
  }
  return f;
}

}  // namespace lmkit
