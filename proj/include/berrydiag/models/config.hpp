#pragma once

#include "berrydiag/models/model.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <stdexcept>
#include <string>

namespace bd {

// malformed configuration (CLI exit code 1)
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline vec3 read_vec3(const nlohmann::json& j, const char* key, const vec3& dflt = vec3::Zero()) {
  if (!j.contains(key)) return dflt;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw config_error(std::string("'") + key + "' must be a 3-array");
  vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!a[i].is_number()) throw config_error(std::string("'") + key + "' entries must be numbers");
    v[i] = a[i].get<double>();
  }
  return v;
}

inline double read_num(const nlohmann::json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number()) throw config_error(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline std::array<int, 3> read_pow(const nlohmann::json& j, const char* key) {
  std::array<int, 3> p{0, 0, 0};
  if (!j.contains(key)) return p;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw config_error(std::string("'") + key + "' must be a 3-array");
  for (int i = 0; i < 3; ++i) {
    if (!a[i].is_number_integer() || a[i].get<int>() < 0)
      throw config_error(std::string("'") + key + "' entries must be non-negative integers");
    p[i] = a[i].get<int>();
  }
  return p;
}

}  // namespace detail

inline scalar_field parse_field(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("field must be an object");
  const std::string kind = j.value("kind", "");
  scalar_field f;
  f.offset = detail::read_num(j, "offset", 0.0);
  if (kind == "linear") {
    f.kind = field_kind::linear;
    f.slope = detail::read_vec3(j, "gradient");
  } else if (kind == "gaussian") {
    f.kind = field_kind::gaussian;
    f.amp = detail::read_num(j, "amplitude", 1.0);
    f.width = detail::read_num(j, "width", 1.0);
    f.center = detail::read_vec3(j, "center");
    if (f.width <= 0) throw config_error("gaussian width must be > 0");
  } else if (kind == "coulomb") {
    f.kind = field_kind::coulomb;
    f.amp = detail::read_num(j, "charge", 1.0);
    f.soft = detail::read_num(j, "softening", 1.0);
    f.center = detail::read_vec3(j, "center");
    if (f.soft <= 0) throw config_error("coulomb softening must be > 0");
  } else if (kind == "polynomial") {
    f.kind = field_kind::polynomial;
    if (j.contains("terms")) {
      if (!j.at("terms").is_array()) throw config_error("'terms' must be an array");
      for (const auto& t : j.at("terms"))
        f.terms.push_back({detail::read_num(t, "coef", 0.0), detail::read_pow(t, "pow")});
    }
  } else {
    throw config_error("unknown field kind '" + kind + "'");
  }
  return f;
}

inline std::unique_ptr<model> parse_model(const nlohmann::json& cfg) {
  if (!cfg.is_object()) throw config_error("config must be a JSON object");
  if (!cfg.contains("model") || !cfg.at("model").is_string()) throw config_error("missing 'model'");
  const std::string name = cfg.at("model").get<std::string>();
  if (name == "dirac_electric") {
    double m = detail::read_num(cfg, "m", 1.0);
    double e = detail::read_num(cfg, "e", 1.0);
    if (m <= 0) throw config_error("dirac mass must be > 0");
    scalar_field V = cfg.contains("field") ? parse_field(cfg.at("field")) : scalar_field::constant(0);
    return std::make_unique<dirac_model>(m, e, V);
  }
  if (name == "neutrino_metric") {
    scalar_field n = cfg.contains("field") ? parse_field(cfg.at("field")) : scalar_field::constant(1);
    return std::make_unique<neutrino_model>(n);
  }
  if (name == "two_level") {
    if (!cfg.contains("h") || !cfg.at("h").is_array() || cfg.at("h").size() != 3)
      throw config_error("two_level needs 'h': three polynomial components");
    std::array<std::vector<std::pair<double, weyl::monomial>>, 3> hc;
    for (int k = 0; k < 3; ++k) {
      const auto& comp = cfg.at("h")[k];
      if (!comp.is_array()) throw config_error("each 'h' component must be an array of terms");
      for (const auto& t : comp) {
        weyl::monomial m;
        m.r = detail::read_pow(t, "r");
        m.p = detail::read_pow(t, "p");
        hc[k].push_back({detail::read_num(t, "coef", 0.0), m});
      }
    }
    return std::make_unique<two_level_model>(hc);
  }
  throw config_error("unknown model '" + name + "'");
}

}  // namespace bd
