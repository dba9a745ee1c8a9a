#include "diffeoflow/jet_json.hpp"

#include <sstream>

namespace diffeoflow {

namespace {

std::string key_of(const std::vector<int>& idx) {
  std::string key;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) key += ',';
    key += std::to_string(idx[i]);
  }
  return key;
}

std::vector<int> parse_key(const std::string& key, int degree, int n) {
  std::vector<int> idx;
  std::stringstream in(key);
  std::string part;
  while (std::getline(in, part, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(part, &used);
    } catch (const std::exception&) {
      throw ParseError("bad jet coefficient key '" + key + "'");
    }
    if (used != part.size() || v < 0 || v >= n) throw ParseError("bad jet coefficient key '" + key + "'");
    idx.push_back(v);
  }
  if (static_cast<int>(idx.size()) != degree) throw ParseError("jet key '" + key + "' has wrong degree");
  return idx;
}

}  // namespace

Json jet_to_json(const Jet<double>& jet) {
  Json out;
  out["order"] = jet.order();
  out["base_point"] = std::vector<double>(jet.base_point().data(), jet.base_point().data() + jet.base_point().size());
  out["domain_dim"] = jet.domain_dim();
  out["codomain_dim"] = jet.codomain_dim();
  Json terms = Json::array();
  for (int j = 0; j <= jet.order(); ++j) {
    const auto& t = jet.term(j);
    Json coeffs = Json::object();
    for (std::size_t r = 0; r < t.size(); ++r) {
      const auto col = t.coefficients().col(static_cast<Eigen::Index>(r));
      coeffs[key_of(t.multi_index(r))] = std::vector<double>(col.data(), col.data() + col.size());
    }
    terms.push_back({{"degree", j}, {"coeffs", coeffs}});
  }
  out["terms"] = terms;
  return out;
}

Jet<double> jet_from_json(const Json& value) {
  try {
    const int order = value.at("order").get<int>();
    const auto base = value.at("base_point").get<std::vector<double>>();
    const int m = value.at("codomain_dim").get<int>();
    const int n = static_cast<int>(base.size());
    if (value.contains("domain_dim") && value.at("domain_dim").get<int>() != n)
      throw ParseError("domain_dim disagrees with base_point");
    Jet<double> jet(order, Eigen::Map<const Eigen::VectorXd>(base.data(), n), m);
    const auto& terms = value.at("terms");
    if (static_cast<int>(terms.size()) != order + 1) throw ParseError("jet must list degrees 0..order");
    for (const auto& term : terms) {
      const int degree = term.at("degree").get<int>();
      if (degree < 0 || degree > order) throw ParseError("jet term degree out of range");
      auto& t = jet.term(degree);
      for (const auto& [key, vals] : term.at("coeffs").items()) {
        const auto v = vals.get<std::vector<double>>();
        if (static_cast<int>(v.size()) != m) throw ParseError("jet coefficient has wrong length");
        auto col = t.coeff(parse_key(key, degree, n));
        for (int c = 0; c < m; ++c) col[c] = v[static_cast<std::size_t>(c)];
      }
    }
    return jet;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed jet JSON: ") + e.what());
  }
}

}  // namespace diffeoflow
