#include "bih/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bih/types.hpp"

namespace bih {

using nlohmann::json;

Grid RunConfig::grid() const {
  return collar_width > 0 ? make_grid(L1, L2, n1, n2, collar_width) : make_grid(L1, L2, n1, n2);
}

namespace {

template <class T>
void get(const json& j, const char* key, T& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  try {
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      get(g, "L1", c.L1);
      get(g, "L2", c.L2);
      get(g, "n1", c.n1);
      get(g, "n2", c.n2);
      get(g, "collar_width", c.collar_width);
    }
    get(j, "operator1", c.op1);
    get(j, "operator2", c.op2);
    get(j, "K", c.K);
    get(j, "taus", c.taus);
    get(j, "mus", c.mus);
    get(j, "m_max", c.m_max);
    get(j, "amplitudes", c.amplitudes);
    get(j, "out", c.out);
    get(j, "seed", c.seed);
    get(j, "threads", c.threads);
    if (j.contains("stability")) {
      const auto& s = j.at("stability");
      get(s, "perturbation", c.stability.perturbation);
      get(s, "eps", c.stability.eps);
      get(s, "K", c.stability.K);
      get(s, "m_max", c.stability.m_max);
      get(s, "taus", c.stability.taus);
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      get(t, "identity", c.tol.identity);
      get(t, "route", c.tol.route);
      get(t, "series", c.tol.series);
      get(t, "green", c.tol.green);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  return {{"grid", {{"L1", c.L1}, {"L2", c.L2}, {"n1", c.n1}, {"n2", c.n2}, {"collar_width", c.collar_width}}},
          {"operator1", c.op1},
          {"operator2", c.op2},
          {"K", c.K},
          {"taus", c.taus},
          {"mus", c.mus},
          {"m_max", c.m_max},
          {"amplitudes", c.amplitudes},
          {"out", c.out},
          {"seed", c.seed},
          {"threads", c.threads},
          {"stability",
           {{"perturbation", c.stability.perturbation},
            {"eps", c.stability.eps},
            {"K", c.stability.K},
            {"m_max", c.stability.m_max},
            {"taus", c.stability.taus}}},
          {"tolerances",
           {{"identity", c.tol.identity}, {"route", c.tol.route}, {"series", c.tol.series}, {"green", c.tol.green}}}};
}

void validate(const RunConfig& c) {
  const Grid g = c.grid();  // validates the geometry
  CoefficientSet a(c.op1), b(c.op2);
  if (!c.stability.perturbation.empty()) CoefficientSet p(c.stability.perturbation);
  if (c.K < 1 || c.K > g.N()) throw ConfigError("config: K must satisfy 1 <= K <= N");
  if (c.stability.K < 1 || c.stability.K > g.N()) throw ConfigError("config: stability.K must satisfy 1 <= K <= N");
  if (c.taus.empty() || !std::is_sorted(c.taus.begin(), c.taus.end()) || c.taus.front() < 2)
    throw ConfigError("config: taus must be nonempty, ascending and >= 2");
  if (c.mus.empty() || !std::is_sorted(c.mus.rbegin(), c.mus.rend()))
    throw ConfigError("config: mus must be nonempty and descending");
  if (c.stability.taus.empty() || !std::is_sorted(c.stability.taus.begin(), c.stability.taus.end()))
    throw ConfigError("config: stability.taus must be nonempty and ascending");
  if (c.m_max < 0 || c.stability.m_max < 0) throw ConfigError("config: m_max must be >= 0");
  for (const auto& s : c.amplitudes)
    if (s != "one" && s != "quadratic") throw ConfigError("config: unknown amplitude kind '" + s + "'");
  if (c.threads < 1) throw ConfigError("config: threads must be >= 1");
  if (std::hypot(c.L1, c.L2) > 10) throw ConfigError("config: domain diameter above 10");
}

}  // namespace bih
