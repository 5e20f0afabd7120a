#pragma once
// Run configuration for the command-line driver: a flat JSON document,
// validated field by field so that every error names the offending path.
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "xxzroots/roots_of_unity.hpp"

namespace xxzroots::cli {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Raised for malformed or semantically invalid configuration; `path()` is the
/// JSON field path, e.g. "sites[0].spin".
class ConfigError : public PreconditionError {
 public:
  ConfigError(std::string path, const std::string& what)
      : PreconditionError(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct RootOfUnity {
  int M = 2;
  int K = 1;
};

struct RunConfig {
  ChainSpec chain;
  std::optional<RootOfUnity> root_of_unity;
  int k = 0;
  std::optional<int> p;
  std::vector<Complex> roots;
  std::vector<Complex> u_list;
  std::vector<Complex> u_samples;
  std::vector<std::vector<Complex>> x_lists;
  std::vector<Complex> kappa_samples;
  int kappa_count = 3;
  Complex x_start{0.0, 0.0};
  std::optional<Complex> u0;
  int trials = 10;
  int max_starts = 400;
  std::uint64_t seed = 20021;
  std::optional<double> tol;
  std::size_t cap = kDefaultDimensionCap;
  std::vector<std::string> notices;
};

namespace detail {

inline Complex parse_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(path, "expected a number or a two-element array [re, im]");
}

inline std::vector<Complex> parse_complex_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of complex numbers");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_complex(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline int parse_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<int>();
}

/// "1/2", "3/2", "1", 0.5, 1, 1.5 ... -> 2l. Anything that is not a positive
/// half-integer is rejected.
inline int parse_two_spin(const json& v, const std::string& path) {
  double value = 0.0;
  if (v.is_number()) {
    value = v.get<double>();
  } else if (v.is_string()) {
    const auto s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        value = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
      } else {
        const double num = std::stod(s.substr(0, slash), &used);
        if (used != slash) throw std::invalid_argument(s);
        const auto den_str = s.substr(slash + 1);
        const double den = std::stod(den_str, &used);
        if (used != den_str.size() || den == 0.0) throw std::invalid_argument(s);
        value = num / den;
      }
    } catch (const std::logic_error&) {
      throw ConfigError(path, "cannot parse spin \"" + s + "\"");
    }
  } else {
    throw ConfigError(path, "expected a spin such as \"1/2\" or 1");
  }
  const double twice = 2.0 * value;
  if (!(twice > 0.5) || std::abs(twice - std::round(twice)) > 1e-12)
    throw ConfigError(path, "spin must be a positive half-integer");
  return static_cast<int>(std::lround(twice));
}

inline void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) throw ConfigError(prefix + it.key(), "unknown key");
}

}  // namespace detail

inline RunConfig parse_config(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw ConfigError("$", "configuration must be a JSON object");
  reject_unknown(doc,
                 {"format_version", "gamma", "kappa", "sites", "root_of_unity", "k", "p", "roots", "u_list",
                  "u_samples", "x_lists", "kappa_samples", "x_start", "u0", "trials", "max_starts", "seed", "tol",
                  "cap"},
                 "");
  RunConfig c;
  if (doc.contains("format_version") && parse_int(doc["format_version"], "format_version") != kFormatVersion)
    throw ConfigError("format_version", "unsupported version, expected 1");

  if (!doc.contains("sites")) throw ConfigError("sites", "missing");
  const auto& sites = doc["sites"];
  if (!sites.is_array() || sites.empty()) throw ConfigError("sites", "expected a nonempty array");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const std::string at = "sites[" + std::to_string(i) + "]";
    if (!sites[i].is_object()) throw ConfigError(at, "expected an object with spin and z");
    reject_unknown(sites[i], {"spin", "z"}, at + ".");
    Site s;
    if (!sites[i].contains("spin")) throw ConfigError(at + ".spin", "missing");
    s.two_spin = parse_two_spin(sites[i]["spin"], at + ".spin");
    if (sites[i].contains("z")) s.z = parse_complex(sites[i]["z"], at + ".z");
    if (s.z == Complex{} || !is_finite(s.z)) throw ConfigError(at + ".z", "must be finite and nonzero");
    c.chain.sites.push_back(s);
  }
  if (doc.contains("gamma")) c.chain.gamma = parse_complex(doc["gamma"], "gamma");
  if (doc.contains("kappa")) c.chain.kappa = parse_complex(doc["kappa"], "kappa");
  if (c.chain.kappa == Complex{}) throw ConfigError("kappa", "must be nonzero");

  if (doc.contains("root_of_unity")) {
    const auto& r = doc["root_of_unity"];
    if (!r.is_object()) throw ConfigError("root_of_unity", "expected an object {M, K}");
    reject_unknown(r, {"M", "K"}, "root_of_unity.");
    RootOfUnity ru;
    if (!r.contains("M")) throw ConfigError("root_of_unity.M", "missing");
    ru.M = parse_int(r["M"], "root_of_unity.M");
    if (r.contains("K")) ru.K = parse_int(r["K"], "root_of_unity.K");
    if (ru.M <= 1) throw ConfigError("root_of_unity.M", "must be > 1");
    if (std::gcd(ru.M, ru.K) != 1) throw ConfigError("root_of_unity.K", "must be coprime with M");
    const RootCtx ctx = make_root_ctx(ru.M, ru.K);
    if (doc.contains("gamma") && std::abs(c.chain.gamma - Complex(ctx.gamma0)) > 1e-12)
      c.notices.push_back("gamma overridden by root_of_unity: pi*K/M");
    c.chain.gamma = ctx.gamma0;
    c.root_of_unity = ru;
  }

  if (doc.contains("k")) {
    c.k = parse_int(doc["k"], "k");
    if (c.k < 0) throw ConfigError("k", "must be nonnegative");
  }
  if (doc.contains("p")) c.p = parse_int(doc["p"], "p");
  if (doc.contains("roots")) c.roots = parse_complex_list(doc["roots"], "roots");
  if (doc.contains("u_list")) c.u_list = parse_complex_list(doc["u_list"], "u_list");
  if (doc.contains("u_samples")) c.u_samples = parse_complex_list(doc["u_samples"], "u_samples");
  if (doc.contains("x_lists")) {
    const auto& xl = doc["x_lists"];
    if (!xl.is_array()) throw ConfigError("x_lists", "expected an array of arrays");
    for (std::size_t i = 0; i < xl.size(); ++i)
      c.x_lists.push_back(parse_complex_list(xl[i], "x_lists[" + std::to_string(i) + "]"));
  }
  if (doc.contains("kappa_samples")) {
    const auto& ks = doc["kappa_samples"];
    if (ks.is_number_integer()) {
      c.kappa_count = ks.get<int>();
      if (c.kappa_count < 1) throw ConfigError("kappa_samples", "count must be positive");
    } else {
      c.kappa_samples = parse_complex_list(ks, "kappa_samples");
      for (std::size_t i = 0; i < c.kappa_samples.size(); ++i)
        if (c.kappa_samples[i] == Complex{})
          throw ConfigError("kappa_samples[" + std::to_string(i) + "]", "must be nonzero");
    }
  }
  if (doc.contains("x_start")) c.x_start = parse_complex(doc["x_start"], "x_start");
  if (doc.contains("u0")) c.u0 = parse_complex(doc["u0"], "u0");
  if (doc.contains("trials")) {
    c.trials = parse_int(doc["trials"], "trials");
    if (c.trials < 1) throw ConfigError("trials", "must be positive");
  }
  if (doc.contains("max_starts")) {
    c.max_starts = parse_int(doc["max_starts"], "max_starts");
    if (c.max_starts < 1) throw ConfigError("max_starts", "must be positive");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("tol")) {
    if (!doc["tol"].is_number() || !(doc["tol"].get<double>() > 0.0)) throw ConfigError("tol", "expected a positive number");
    c.tol = doc["tol"].get<double>();
  }
  if (doc.contains("cap")) {
    if (!doc["cap"].is_number_unsigned() || doc["cap"].get<std::uint64_t>() == 0)
      throw ConfigError("cap", "expected a positive integer");
    c.cap = doc["cap"].get<std::size_t>();
  }
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json to_json(std::span<const Complex> v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(to_json(z));
  return a;
}

inline std::string spin_string(int two_spin) {
  return two_spin % 2 == 0 ? std::to_string(two_spin / 2) : std::to_string(two_spin) + "/2";
}

/// Canonical echo of a parsed configuration; parse_config(echo(c)) reproduces c.
inline json echo(const RunConfig& c) {
  json j;
  j["format_version"] = kFormatVersion;
  j["gamma"] = to_json(c.chain.gamma);
  j["kappa"] = to_json(c.chain.kappa);
  j["sites"] = json::array();
  for (const auto& s : c.chain.sites) j["sites"].push_back({{"spin", spin_string(s.two_spin)}, {"z", to_json(s.z)}});
  if (c.root_of_unity) j["root_of_unity"] = {{"M", c.root_of_unity->M}, {"K", c.root_of_unity->K}};
  j["k"] = c.k;
  if (c.p) j["p"] = *c.p;
  j["roots"] = to_json(c.roots);
  j["u_list"] = to_json(c.u_list);
  j["u_samples"] = to_json(c.u_samples);
  j["x_lists"] = json::array();
  for (const auto& x : c.x_lists) j["x_lists"].push_back(to_json(x));
  if (c.kappa_samples.empty()) j["kappa_samples"] = c.kappa_count;
  else j["kappa_samples"] = to_json(c.kappa_samples);
  j["x_start"] = to_json(c.x_start);
  if (c.u0) j["u0"] = to_json(*c.u0);
  j["trials"] = c.trials;
  j["max_starts"] = c.max_starts;
  j["seed"] = c.seed;
  if (c.tol) j["tol"] = *c.tol;
  j["cap"] = c.cap;
  return j;
}

}  // namespace xxzroots::cli
