#pragma once

#include <Eigen/Dense>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rsmc/errors.hpp"
#include "rsmc/generator.hpp"
#include "rsmc/model.hpp"
#include "rsmc/returns.hpp"

namespace rsmc {

// Flat `key = value` model description. Lists are comma- or
// whitespace-separated on a single line; '#' starts a comment.
//
//   states = 2
//   rates  = 0 1 1 0        # d*d row-major, diagonal zero or -exit rate
//   mu     = 0 0.05
//   sigma  = 0.1 0.3
//   x0     = 100
//   T      = 1
//   N      = 1024
//   family = binomial       # or trinomial
struct ModelConfig {
  int states = 0;
  Eigen::MatrixXd rates;
  std::vector<double> mu;
  std::vector<double> sigma;
  double x0 = 0.0;
  double horizon = 0.0;
  int steps = 0;
  ReturnKind family = ReturnKind::Binomial;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<double> parse_numbers(const std::string& value,
                                         const std::string& key, int line) {
  std::string cleaned = value;
  for (char& c : cleaned)
    if (c == ',') c = ' ';
  std::istringstream in(cleaned);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      raise(Errc::ConfigParse, "line " + std::to_string(line) + ", key '" +
                                   key + "': not a number: '" + token + "'");
    }
  }
  return out;
}

}  // namespace detail

inline ModelConfig parse_model_config(const std::string& text) {
  std::map<std::string, std::pair<std::string, int>> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    require(eq != std::string::npos, Errc::ConfigParse,
            "line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    require(!key.empty() && !value.empty(), Errc::ConfigParse,
            "line " + std::to_string(line_no) + ": empty key or value");
    require(!entries.count(key), Errc::ConfigParse,
            "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    entries[key] = {value, line_no};
  }

  auto take = [&](const char* key) {
    auto it = entries.find(key);
    require(it != entries.end(), Errc::ConfigParse,
            std::string("missing key '") + key + "'");
    auto kv = it->second;
    entries.erase(it);
    return kv;
  };
  auto take_numbers = [&](const char* key) {
    auto [value, at] = take(key);
    return detail::parse_numbers(value, key, at);
  };
  auto take_scalar = [&](const char* key) {
    auto [value, at] = take(key);
    const std::vector<double> nums = detail::parse_numbers(value, key, at);
    require(nums.size() == 1, Errc::ConfigParse,
            "line " + std::to_string(at) + ", key '" + key +
                "': expected a single number");
    return nums[0];
  };

  ModelConfig cfg;
  const double states = take_scalar("states");
  require(states >= 2 && states == std::floor(states), Errc::ConfigParse,
          "key 'states': expected an integer >= 2");
  cfg.states = static_cast<int>(states);

  const std::vector<double> rates = take_numbers("rates");
  require(rates.size() ==
              static_cast<std::size_t>(cfg.states) * static_cast<std::size_t>(cfg.states),
          Errc::ConfigParse,
          "key 'rates': expected " + std::to_string(cfg.states * cfg.states) +
              " entries (states^2, row-major), got " +
              std::to_string(rates.size()));
  cfg.rates = Eigen::MatrixXd(cfg.states, cfg.states);
  for (int i = 0; i < cfg.states; ++i)
    for (int j = 0; j < cfg.states; ++j)
      cfg.rates(i, j) = rates[static_cast<std::size_t>(i * cfg.states + j)];

  cfg.mu = take_numbers("mu");
  require(cfg.mu.size() == static_cast<std::size_t>(cfg.states),
          Errc::ConfigParse, "key 'mu': expected one entry per state");
  cfg.sigma = take_numbers("sigma");
  require(cfg.sigma.size() == static_cast<std::size_t>(cfg.states),
          Errc::ConfigParse, "key 'sigma': expected one entry per state");

  cfg.x0 = take_scalar("x0");
  cfg.horizon = take_scalar("T");
  const double steps = take_scalar("N");
  require(steps >= 1 && steps == std::floor(steps), Errc::ConfigParse,
          "key 'N': expected a positive integer");
  cfg.steps = static_cast<int>(steps);

  auto [family, family_line] = take("family");
  if (family == "binomial")
    cfg.family = ReturnKind::Binomial;
  else if (family == "trinomial")
    cfg.family = ReturnKind::Trinomial;
  else
    raise(Errc::ConfigParse, "line " + std::to_string(family_line) +
                                 ", key 'family': expected 'binomial' or "
                                 "'trinomial', got '" +
                                 family + "'");

  if (!entries.empty())
    raise(Errc::ConfigParse,
          "unknown key '" + entries.begin()->first + "' at line " +
              std::to_string(entries.begin()->second.second));
  return cfg;
}

inline ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::IoFailure, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_config(buf.str());
}

// The fixture shipped with the repository: a symmetric two-state switch at
// unit rate with mild drift/volatility contrast.
inline ModelConfig default_model_config() {
  ModelConfig cfg;
  cfg.states = 2;
  cfg.rates = Eigen::MatrixXd{{0.0, 1.0}, {1.0, 0.0}};
  cfg.mu = {0.0, 0.05};
  cfg.sigma = {0.1, 0.3};
  cfg.x0 = 100.0;
  cfg.horizon = 1.0;
  cfg.steps = 1024;
  cfg.family = ReturnKind::Binomial;
  return cfg;
}

// Validated model objects built from a parsed config.
struct Model {
  GeneratorMatrix generator;
  RegimeParams params;
  TimeGrid grid;
  ReturnKind family;
};

inline Model build_model(const ModelConfig& cfg, double tolerance = 1e-12,
                         bool allow_zero_rates = false) {
  return Model{GeneratorMatrix::validate(cfg.rates, tolerance, allow_zero_rates),
               RegimeParams::validated(cfg.mu, cfg.sigma, cfg.x0),
               TimeGrid(cfg.horizon, cfg.steps), cfg.family};
}

}  // namespace rsmc
