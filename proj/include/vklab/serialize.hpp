#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vklab/bdg.hpp"
#include "vklab/kernel.hpp"
#include "vklab/multifactor.hpp"

namespace vklab {

using json = nlohmann::json;

inline json kernel_to_json(const Kernel& k) {
  json j;
  if (k.scale() != 1.0) j["c"] = k.scale();
  switch (k.form()) {
    case Kernel::Form::exponential:
      j["form"] = "exponential";
      j["beta"] = k.beta();
      break;
    case Kernel::Form::power_law:
      j["form"] = "power_law";
      j["H"] = k.hurst();
      break;
    case Kernel::Form::gamma:
      j["form"] = "gamma";
      j["beta"] = k.beta();
      j["H"] = k.hurst();
      break;
    case Kernel::Form::ml_resolvent:
      j["form"] = "ml_resolvent";
      j["lambda"] = k.lambda();
      j["H"] = k.hurst();
      break;
    case Kernel::Form::shifted:
      j["form"] = "shifted";
      j["eps"] = k.shift_eps();
      j["inner"] = kernel_to_json(k.children()[0]);
      break;
    case Kernel::Form::damped:
      j["form"] = "damped";
      j["beta"] = k.beta();
      j["inner"] = kernel_to_json(k.children()[0]);
      break;
    case Kernel::Form::truncated:
      j["form"] = "truncated";
      j["N"] = k.cutoff();
      j["inner"] = kernel_to_json(k.children()[0]);
      break;
    case Kernel::Form::finite_atomic:
      j["form"] = "finite_atomic";
      j["nodes"] = k.nodes();
      j["weights"] = k.weights();
      break;
    case Kernel::Form::sum: {
      j["form"] = "sum";
      json terms = json::array();
      for (const Kernel& c : k.children()) terms.push_back(kernel_to_json(c));
      j["terms"] = std::move(terms);
      break;
    }
  }
  return j;
}

namespace serialize_detail {

inline double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ConfigError(std::string("kernel descriptor: missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace serialize_detail

inline Kernel kernel_from_json(const json& j) {
  using serialize_detail::require_number;
  if (!j.is_object() || !j.contains("form") || !j.at("form").is_string())
    throw ConfigError("kernel descriptor: expected an object with a 'form' string");
  const std::string form = j.at("form").get<std::string>();
  const double scale = j.contains("c") ? require_number(j, "c") : 1.0;
  try {
    if (form == "exponential") return Kernel::exponential(require_number(j, "beta"), scale);
    if (form == "power_law") return Kernel::power_law(require_number(j, "H"), scale);
    if (form == "gamma")
      return Kernel::gamma_kernel(require_number(j, "beta"), require_number(j, "H"), scale);
    if (form == "ml_resolvent")
      return Kernel::ml_resolvent(require_number(j, "lambda"), require_number(j, "H"), scale);
    if (form == "shifted")
      return kernel_from_json(j.at("inner")).shifted(require_number(j, "eps"));
    if (form == "damped")
      return kernel_from_json(j.at("inner")).damped(require_number(j, "beta"));
    if (form == "truncated")
      return kernel_from_json(j.at("inner")).truncated(require_number(j, "N"));
    if (form == "finite_atomic") {
      if (!j.contains("nodes") || !j.contains("weights"))
        throw ConfigError("finite_atomic kernel: 'nodes' and 'weights' are required");
      return Kernel::finite_atomic(j.at("nodes").get<std::vector<double>>(),
                                   j.at("weights").get<std::vector<double>>(), scale);
    }
    if (form == "sum") {
      std::vector<Kernel> terms;
      for (const json& t : j.at("terms")) terms.push_back(kernel_from_json(t));
      return Kernel::sum_of(std::move(terms), scale);
    }
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("kernel descriptor: ") + e.what());
  }
  throw ConfigError("kernel descriptor: unknown form '" + form + "'");
}

inline json scheme_to_json(const MultifactorScheme& s) {
  json j;
  j["N"] = s.truncation;
  j["n"] = s.requested_factors;
  j["nodes"] = s.nodes;
  j["weights"] = s.weights;
  return j;
}

inline MultifactorScheme scheme_from_json(const json& j) {
  MultifactorScheme s;
  s.truncation = serialize_detail::require_number(j, "N");
  if (!j.contains("n")) throw ConfigError("scheme: missing 'n'");
  s.requested_factors = j.at("n").get<std::size_t>();
  s.nodes = j.at("nodes").get<std::vector<double>>();
  s.weights = j.at("weights").get<std::vector<double>>();
  if (s.nodes.size() != s.weights.size())
    throw ConfigError("scheme: nodes/weights size mismatch");
  return s;
}

// Constants named as they appear in the moment bounds.
inline json report_to_json(const BdgBoundReport& r) {
  json j;
  j["kind"] = r.kind;
  j["p"] = r.p;
  j["d"] = r.d;
  j["m"] = r.m;
  j["b_p"] = r.b_p;
  j["alpha"] = r.alpha;
  j["phi_pnorm"] = r.phi_pnorm;
  j["rhs"] = r.rhs;
  j["log_rhs"] = r.log_rhs;
  if (r.kind == "finite_horizon") {
    j["gamma"] = r.gamma;
    j["T"] = r.horizon;
    j["C_alpha_p_gamma"] = r.c_alpha_p_gamma;
    j["Cbar"] = r.cbar;
    j["kernel_norm"] = r.kernel_norm;
  } else {
    j["M_p"] = r.m_p.is_infinite() ? json("infinite") : json(r.m_p.value());
    j["C_pdm"] = r.c_pdm;
  }
  return j;
}

}  // namespace vklab
