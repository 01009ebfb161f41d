#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gibbsconv/errors.hpp"
#include "gibbsconv/grid_function.hpp"
#include "gibbsconv/transfer_operator.hpp"

namespace gibbsconv {

enum class Family { constant_half, cosine, third_symmetric, bernoulli, samples };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::constant_half: return "constant_half";
    case Family::cosine: return "cosine";
    case Family::third_symmetric: return "third_symmetric";
    case Family::bernoulli: return "bernoulli";
    case Family::samples: return "samples";
  }
  return "?";
}

/// A named family of Jacobians with its parameter.
struct PotentialSpec {
  Family family = Family::constant_half;
  double param = 0.0;          ///< a for cosine / third_symmetric, p for bernoulli
  std::vector<double> values;  ///< for samples

  static PotentialSpec constant_half() { return {}; }
  static PotentialSpec cosine(double a) { return validated({Family::cosine, a, {}}); }
  static PotentialSpec third_symmetric(double a) {
    return validated({Family::third_symmetric, a, {}});
  }
  static PotentialSpec bernoulli(double p) { return validated({Family::bernoulli, p, {}}); }
  static PotentialSpec samples(std::vector<double> v) {
    return validated({Family::samples, 0.0, std::move(v)});
  }

  /// False only for the discontinuous Bernoulli family.
  bool holder() const noexcept { return family != Family::bernoulli; }

  /// Amplitude sup |J - 1/2| of the analytic families.
  double amplitude() const noexcept {
    switch (family) {
      case Family::cosine:
      case Family::third_symmetric: return std::fabs(param);
      case Family::bernoulli: return std::fabs(param - 0.5);
      default: return 0.0;
    }
  }

  /// Grid size used for this spec: step functions are sampled at least as
  /// finely as the atoms so that the cylinder quadrature stays exact.
  int effective_grid(int grid, int level) const noexcept {
    return family == Family::bernoulli ? std::max(grid, level) : grid;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j{{"family", family_name(family)}};
    switch (family) {
      case Family::cosine:
      case Family::third_symmetric: j["a"] = param; break;
      case Family::bernoulli: j["p"] = param; break;
      case Family::samples: j["values"] = values; break;
      default: break;
    }
    return j;
  }

  std::string label() const {
    std::ostringstream os;
    os << family_name(family);
    if (family == Family::cosine || family == Family::third_symmetric ||
        family == Family::bernoulli) {
      os << ':' << param;
    }
    return os.str();
  }

 private:
  static PotentialSpec validated(PotentialSpec s) {
    switch (s.family) {
      case Family::cosine:
      case Family::third_symmetric:
        if (!(std::fabs(s.param) <= 0.49)) throw ValidationError("amplitude must satisfy |a| <= 0.49");
        break;
      case Family::bernoulli:
        if (!(s.param >= 0.01 && s.param <= 0.99)) throw ValidationError("p must lie in [0.01, 0.99]");
        break;
      case Family::samples: {
        const std::size_t n = s.values.size();
        if (n < 2 || !std::has_single_bit(n)) {
          throw ValidationError("samples length must be a power of two >= 2");
        }
        for (double v : s.values) {
          if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("samples must be positive");
        }
        break;
      }
      default: break;
    }
    return s;
  }
};

inline JacobianPotential make_jacobian(const PotentialSpec& spec, int grid) {
  switch (spec.family) {
    case Family::constant_half:
      return JacobianPotential(GridFunction::constant(grid, 0.5));
    case Family::cosine:
      return JacobianPotential(GridFunction::sample(
          grid, [a = spec.param](double x) { return 0.5 + a * std::cos(kTwoPi * x); }));
    case Family::third_symmetric:
      return JacobianPotential(GridFunction::sample(
          grid, [a = spec.param](double x) { return 0.5 + a * std::sin(3.0 * kTwoPi * x); }));
    case Family::bernoulli:
      return JacobianPotential(GridFunction::sample(
          grid, [p = spec.param](double x) { return x < 0.5 ? p : 1.0 - p; }));
    case Family::samples: {
      const int m = std::countr_zero(spec.values.size());
      return JacobianPotential(resample(GridFunction(m, spec.values), grid));
    }
  }
  throw ValidationError("unknown family");
}

inline PotentialSpec potential_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) {
    throw ValidationError("potential spec needs a string field \"family\"");
  }
  const std::string f = j["family"].get<std::string>();
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw ValidationError("family " + f + " needs a numeric field \"" + key + "\"");
    }
    return j[key].get<double>();
  };
  if (f == "constant_half") return PotentialSpec::constant_half();
  if (f == "cosine") return PotentialSpec::cosine(number("a"));
  if (f == "third_symmetric") return PotentialSpec::third_symmetric(number("a"));
  if (f == "bernoulli") return PotentialSpec::bernoulli(number("p"));
  if (f == "samples") {
    if (!j.contains("values") || !j["values"].is_array()) {
      throw ValidationError("family samples needs an array field \"values\"");
    }
    std::vector<double> v;
    for (const auto& x : j["values"]) {
      if (!x.is_number()) throw ValidationError("samples values must be numbers");
      v.push_back(x.get<double>());
    }
    return PotentialSpec::samples(std::move(v));
  }
  throw ValidationError("unknown potential family \"" + f + "\"");
}

/// Accepts inline JSON, the shorthand "family[:param]", or a path to a JSON file.
inline PotentialSpec parse_potential(const std::string& text) {
  if (text.empty()) throw ValidationError("empty potential spec");
  if (text.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("potential spec is not valid JSON: ") + e.what());
    }
    return potential_from_json(j);
  }
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "constant_half" || head == "cosine" || head == "third_symmetric" ||
      head == "bernoulli") {
    if (head == "constant_half") {
      if (colon != std::string::npos) throw ValidationError("constant_half takes no parameter");
      return PotentialSpec::constant_half();
    }
    if (colon == std::string::npos) throw ValidationError(head + " needs a parameter, e.g. " + head + ":0.2");
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError("bad parameter in potential spec \"" + text + "\"");
    }
    nlohmann::json j{{"family", head}};
    j[head == "bernoulli" ? "p" : "a"] = value;
    return potential_from_json(j);
  }
  std::ifstream in(text);
  if (!in) throw ValidationError("potential spec \"" + text + "\" is neither a known family nor a readable file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("potential file " + text + " is not valid JSON: " + e.what());
  }
  return potential_from_json(j);
}

}  // namespace gibbsconv
