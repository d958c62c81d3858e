#include "kharmonic/serialization.hpp"

namespace kharmonic {

nlohmann::json diffpoly_to_json(const DiffPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : p.terms()) {
    nlohmann::json factors = nlohmann::json::array();
    for (const auto& f : t.powers.factors) {
      factors.push_back({{"index", f.symbol.index}, {"order", f.symbol.order}, {"exp", f.exponent}});
    }
    terms.push_back({{"coeff", t.coefficient.get_str()}, {"k_power", t.powers.k_power}, {"factors", factors}});
  }
  return {{"terms", terms}};
}

DiffPoly diffpoly_from_json(const nlohmann::json& j) {
  std::vector<Monomial> terms;
  for (const auto& t : j.at("terms")) {
    Monomial m;
    try {
      m.coefficient = Rational(t.at("coeff").get<std::string>());
    } catch (const std::invalid_argument&) {
      throw ParseError("invalid rational coefficient: " + t.at("coeff").dump());
    }
    if (m.coefficient.get_den() == 0) throw ParseError("zero denominator in coefficient");
    m.coefficient.canonicalize();
    m.powers.k_power = t.at("k_power").get<int>();
    if (m.powers.k_power < 0) throw ParseError("negative power of K");
    for (const auto& f : t.at("factors")) {
      const int e = f.at("exp").get<int>();
      if (e < 1) throw ParseError("factor exponent must be positive");
      try {
        m.powers.factors.push_back({kappa_symbol(f.at("index").get<int>(), f.at("order").get<int>()), e});
      } catch (const std::invalid_argument& err) {
        throw ParseError(err.what());
      }
    }
    terms.push_back(std::move(m));
  }
  return normalize(std::move(terms));
}

nlohmann::json frame_field_to_json(const FrameField& v) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : v.coeffs()) coeffs.push_back(to_text(c));
  return {{"dim", v.dim()}, {"coeffs", coeffs}};
}

FrameField frame_field_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("coeffs") || !j["dim"].is_number_integer() ||
      !j["coeffs"].is_array()) {
    throw ParseError("frame field JSON needs an integer \"dim\" and a \"coeffs\" array");
  }
  const int dim = j["dim"].get<int>();
  if (dim < 2 || j["coeffs"].size() != static_cast<std::size_t>(dim)) {
    throw ParseError("frame field JSON: dim " + std::to_string(dim) + " with " + std::to_string(j["coeffs"].size()) +
                     " coefficients");
  }
  std::vector<DiffPoly> coeffs;
  for (const auto& c : j["coeffs"]) {
    if (!c.is_string()) throw ParseError("frame field coefficients must be DiffPoly text");
    coeffs.push_back(parse_diffpoly(c.get<std::string>()));
  }
  return FrameField(dim, std::move(coeffs));
}

}  // namespace kharmonic
