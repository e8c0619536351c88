#include "rte_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "rte/error.hpp"

namespace rte::cli {

using nlohmann::json;

const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema = {
      // grid, medium, solver
      {"nx", KeyType::Int, 32, "cells per axis of the transport grid"},
      {"nv", KeyType::Int, 32, "angular ordinates"},
      {"phantom", KeyType::String, "smooth-bump", "constant | smooth-bump | two-inclusion"},
      {"sigma0", KeyType::Double, 1.0, "background absorption"},
      {"kappa", KeyType::Double, 0.2, "total scattering rate int k dv'"},
      {"amplitude", KeyType::Double, 0.5, "first inclusion amplitude"},
      {"width", KeyType::Double, 0.2, "first inclusion width"},
      {"center_x", KeyType::Double, 0.5, "first inclusion centre"},
      {"center_y", KeyType::Double, 0.5, "first inclusion centre"},
      {"amplitude2", KeyType::Double, -0.3, "second inclusion amplitude"},
      {"width2", KeyType::Double, 0.15, "second inclusion width"},
      {"center2_x", KeyType::Double, 0.68, "second inclusion centre"},
      {"center2_y", KeyType::Double, 0.32, "second inclusion centre"},
      {"anisotropy", KeyType::DoubleList, json::array(), "c_p / c_0 for p >= 1"},
      {"tol", KeyType::Double, 1e-10, "source-iteration tolerance"},
      {"max_iter", KeyType::Int, 2000, "source-iteration budget"},
      {"seed", KeyType::Int, 0, "seed for anchor sampling and data noise"},
      {"noise_level", KeyType::Double, 0.0, "relative Gaussian noise added to outflow data"},
      // forward
      {"anchor_x", KeyType::Double, 0.0, "source anchor on the inflow boundary"},
      {"anchor_y", KeyType::Double, 0.5, "source anchor on the inflow boundary"},
      {"anchor_ordinate", KeyType::Int, 0, "ordinate of the source anchor"},
      {"epsilon", KeyType::Double, 0.0, "source width; 0 selects a single-node source (or auto in recover-sigma)"},
      {"epsilon1", KeyType::Double, 0.1, "readout width of the mollified functionals"},
      {"dump_fields", KeyType::Bool, false, "write the full phase-space fields"},
      // recover-sigma
      {"angles", KeyType::Int, 15, "parallel-beam angles over [0, pi)"},
      {"offsets", KeyType::Int, 6, "parallel lines per angle"},
      {"offset_extent", KeyType::Double, 0.6, "lines at cell centres of [-extent, extent] around the centre"},
      {"foot_tolerance", KeyType::Double, -1.0, "max anchor-to-foot distance; negative means eps/2 - dx"},
      {"recon_nx", KeyType::Int, 8, "cells per axis of the reconstruction grid"},
      {"lambda_mode", KeyType::String, "discrepancy", "theorem | discrepancy | fixed"},
      {"lambda", KeyType::Double, 0.0, "regularization for lambda_mode = fixed"},
      {"delta", KeyType::Double, 0.1, "exponent slack in the a-priori lambda rule"},
      {"epsilon1_factor", KeyType::Double, 1.0, "eps1 = factor * eps in recover-sigma"},
      {"discrepancy_tau", KeyType::Double, 1.0, "safety factor of the discrepancy principle"},
      {"refine_nx", KeyType::IntList, json::array(), "grid sizes of a simultaneous (dx, eps) refinement"},
      {"epsilon_per_dx", KeyType::Double, 4.0, "eps = epsilon_per_dx * dx when epsilon is 0"},
      {"recon_ratio", KeyType::Int, 8, "recon_nx = nx / recon_ratio during refinement"},
      {"fbp", KeyType::Bool, false, "also reconstruct by filtered back-projection"},
      {"check_relative_error", KeyType::Double, 0.1, "threshold on the relative L2 error"},
      {"check_slope_min", KeyType::Double, 0.3, "refinement slope window"},
      {"check_slope_max", KeyType::Double, 0.7, "refinement slope window"},
      // recover-k
      {"k_zones", KeyType::Int, 1, "zones per axis of the kernel parametrization"},
      {"k_order", KeyType::Int, 0, "highest cosine order of the kernel"},
      {"k_experiments", KeyType::Int, 8, "experiments in the fit"},
      {"k_sigma", KeyType::String, "oracle", "oracle | recovered"},
      {"k_max_iter", KeyType::Int, 200, "optimizer iterations"},
      {"k_gtol", KeyType::Double, 1e-9, "projected-gradient tolerance"},
      {"k_ftol", KeyType::Double, 0.0, "stop once the objective is below this"},
      {"k_initial", KeyType::Double, 0.1, "initial c_0 in every zone"},
      {"k_tol", KeyType::Double, 1e-12, "solver tolerance inside the fit"},
      {"check_k_relative_error", KeyType::Double, 0.05, "threshold on the kernel coefficient error"},
      {"check_k_objective", KeyType::Double, 1e-6, "threshold on the final objective"},
      // scaling
      {"scaling_epsilons", KeyType::DoubleList, json::array({0.1, 0.2, 0.4, 0.8}), "source widths"},
      {"scaling_epsilon1", KeyType::Double, 0.05, "readout width during the eps sweep"},
      {"scaling_epsilon1s", KeyType::DoubleList, json::array(), "readout widths of an optional eps1 sweep"},
      {"xray_nx", KeyType::IntList, json::array({16, 32, 64}), "grid sizes of the X-ray consistency sweep"},
      {"xray_chords", KeyType::Int, 24, "chords in the X-ray consistency sweep"},
      {"scaling_sigma_refine", KeyType::Bool, false, "also run the recover-sigma refinement"},
      {"check_eps_slope_tolerance", KeyType::Double, 0.5, "|slope - 2| bound for the eps sweep"},
      {"check_xray_slope_tolerance", KeyType::Double, 0.3, "|slope - 2| bound for the X-ray sweep"},
      // diffusive
      {"slab_kn", KeyType::Double, 0.05, "Knudsen number of the slab run"},
      {"slab_nx", KeyType::Int, 400, "slab cells"},
      {"slab_nv", KeyType::Int, 32, "slab Gauss nodes"},
      {"budget_constant", KeyType::Double, 50.0, "iteration budget ceil(C / Kn^2)"},
      {"kn_list", KeyType::DoubleList, json::array({1.0, 0.5, 0.25, 0.125}), "breakdown sweep"},
      {"breakdown_nx", KeyType::Int, 32, "grid of the breakdown sweep"},
      {"breakdown_nv", KeyType::Int, 32, "ordinates of the breakdown sweep"},
      {"breakdown_epsilon", KeyType::Double, -1.0, "source width; negative means 2 dx"},
      {"breakdown_epsilon1", KeyType::Double, -1.0, "readout width; negative means 2 dx"},
      {"check_slab_r2", KeyType::Double, 0.999, "interior linearity threshold"},
      {"check_slab_theta", KeyType::Double, 0.02, "|theta(1)| / eta threshold"},
      {"check_breakdown_r2", KeyType::Double, 0.98, "ln E1 vs 1/Kn linearity threshold"},
      {"check_kinetic_contamination", KeyType::Double, 0.1, "(E2+E3)/E1 bound at the largest Kn"},
  };
  return schema;
}

namespace {

const KeySpec* find_key(const std::string& name) {
  for (const KeySpec& k : config_schema())
    if (k.name == name) return &k;
  return nullptr;
}

bool is_integral(const json& v) {
  if (v.is_number_integer()) return true;
  if (v.is_number_float()) {
    const double d = v.get<double>();
    return std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15;
  }
  return false;
}

bool type_matches(const json& v, KeyType t) {
  switch (t) {
    case KeyType::Int: return is_integral(v);
    case KeyType::Double: return v.is_number();
    case KeyType::Bool: return v.is_boolean();
    case KeyType::String: return v.is_string();
    case KeyType::IntList:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return is_integral(e); });
    case KeyType::DoubleList:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); });
  }
  return false;
}

const char* type_name(KeyType t) {
  switch (t) {
    case KeyType::Int: return "integer";
    case KeyType::Double: return "number";
    case KeyType::Bool: return "boolean";
    case KeyType::String: return "string";
    case KeyType::IntList: return "array of integers";
    case KeyType::DoubleList: return "array of numbers";
  }
  return "?";
}

// Range rules beyond the type; each returns an empty string when fine.
std::string check_value(const std::string& key, const json& v) {
  auto num = [&] { return v.get<double>(); };
  static const std::set<std::string> positive = {"tol", "epsilon1", "delta", "discrepancy_tau",
                                                 "epsilon_per_dx", "epsilon1_factor", "k_tol",
                                                 "scaling_epsilon1", "slab_kn", "budget_constant",
                                                 "offset_extent"};
  static const std::set<std::string> nonnegative = {"kappa", "sigma0", "noise_level", "epsilon",
                                                    "lambda", "k_gtol", "k_ftol", "k_initial",
                                                    "width", "width2"};
  static const std::map<std::string, int> minimum = {
      {"nx", 2}, {"nv", 4}, {"max_iter", 1}, {"angles", 1}, {"offsets", 1}, {"recon_nx", 1},
      {"recon_ratio", 1}, {"k_zones", 1}, {"k_order", 0}, {"k_experiments", 1},
      {"k_max_iter", 0}, {"xray_chords", 1}, {"slab_nx", 2}, {"slab_nv", 2},
      {"breakdown_nx", 2}, {"breakdown_nv", 4}, {"seed", 0}, {"anchor_ordinate", 0}};
  if (positive.count(key) && !(num() > 0.0)) return "must be positive";
  if (nonnegative.count(key) && !(num() >= 0.0)) return "must be nonnegative";
  if (auto it = minimum.find(key); it != minimum.end() && v.get<double>() < it->second)
    return "must be >= " + std::to_string(it->second);
  if (key == "phantom") {
    const auto s = v.get<std::string>();
    if (s != "constant" && s != "smooth-bump" && s != "two-inclusion")
      return "must be constant, smooth-bump or two-inclusion";
  }
  if (key == "lambda_mode") {
    const auto s = v.get<std::string>();
    if (s != "theorem" && s != "discrepancy" && s != "fixed")
      return "must be theorem, discrepancy or fixed";
  }
  if (key == "k_sigma") {
    const auto s = v.get<std::string>();
    if (s != "oracle" && s != "recovered") return "must be oracle or recovered";
  }
  if (key == "scaling_epsilons" || key == "scaling_epsilon1s" || key == "kn_list") {
    for (const json& e : v)
      if (!(e.get<double>() > 0.0)) return "entries must be positive";
  }
  if (key == "refine_nx" || key == "xray_nx") {
    for (const json& e : v)
      if (e.get<double>() < 2) return "entries must be >= 2";
  }
  return {};
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

}  // namespace

Config::Config(json input, const std::vector<std::string>& overrides)
    : input_(std::move(input)), overrides_(overrides) {
  std::vector<std::string> errors;
  if (!input_.is_object()) throw ConfigurationError("configuration must be a JSON object");
  json merged = input_;
  for (const std::string& o : overrides_) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      errors.push_back("override '" + o + "': expected key=value");
      continue;
    }
    merged[o.substr(0, eq)] = parse_override_value(o.substr(eq + 1));
  }
  effective_ = json::object();
  for (const KeySpec& k : config_schema()) effective_[k.name] = k.fallback;
  for (auto it = merged.begin(); it != merged.end(); ++it) {
    const KeySpec* spec = find_key(it.key());
    if (!spec) {
      errors.push_back(it.key() + ": unknown key");
      continue;
    }
    if (!type_matches(it.value(), spec->type)) {
      errors.push_back(it.key() + ": expected " + type_name(spec->type) + ", got " +
                       it.value().dump());
      continue;
    }
    const std::string bad = check_value(it.key(), it.value());
    if (!bad.empty()) {
      errors.push_back(it.key() + ": " + bad);
      continue;
    }
    effective_[it.key()] = it.value();
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigurationError(msg);
  }
}

Config Config::load(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return Config(std::move(doc), overrides);
}

Config Config::with(const std::vector<std::string>& extra) const {
  std::vector<std::string> all = overrides_;
  all.insert(all.end(), extra.begin(), extra.end());
  return Config(input_, all);
}

const json& Config::at(const std::string& key, KeyType type) const {
  const KeySpec* spec = find_key(key);
  if (!spec || spec->type != type)
    throw ArgumentError("configuration key '" + key + "' is not a " + type_name(type));
  return effective_.at(key);
}

int Config::integer(const std::string& key) const {
  return static_cast<int>(at(key, KeyType::Int).get<double>());
}

double Config::real(const std::string& key) const { return at(key, KeyType::Double).get<double>(); }

bool Config::flag(const std::string& key) const { return at(key, KeyType::Bool).get<bool>(); }

std::string Config::text(const std::string& key) const {
  return at(key, KeyType::String).get<std::string>();
}

std::vector<int> Config::integers(const std::string& key) const {
  std::vector<int> out;
  for (const json& e : at(key, KeyType::IntList)) out.push_back(static_cast<int>(e.get<double>()));
  return out;
}

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  for (const json& e : at(key, KeyType::DoubleList)) out.push_back(e.get<double>());
  return out;
}

std::uint64_t Config::seed() const {
  const json& v = effective_.at("seed");
  return v.is_number_unsigned() ? v.get<std::uint64_t>()
                                : static_cast<std::uint64_t>(v.get<double>());
}

}  // namespace rte::cli
