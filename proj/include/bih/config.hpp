#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bih/coefficients.hpp"
#include "bih/geometry.hpp"

namespace bih {

struct RunConfig {
  double L1 = 1, L2 = 1;
  int n1 = 31, n2 = 31;
  double collar_width = 0;  // 0 selects 0.15 min(L1, L2)
  nlohmann::json op1 = nlohmann::json::array();
  nlohmann::json op2 = nlohmann::json::array();
  int K = 100;
  std::vector<double> taus = {8, 16, 32, 64};
  std::vector<double> mus = {-1e3, -1e4, -1e5, -1e6, -1e7};
  int m_max = 3;
  std::vector<std::string> amplitudes = {"one", "quadratic"};
  std::string out = "out";
  uint64_t seed = 1;
  int threads = 1;

  struct Stability {
    nlohmann::json perturbation = nlohmann::json::array();
    std::vector<double> eps;
    int K = 100;
    int m_max = 1;
    std::vector<double> taus = {8, 16};
  } stability;

  struct Tolerances {
    double identity = 0.05;  // |(S1-S2) - L*| / |S1-S2|
    double route = 0.01;     // boundary vs volume route
    double series = 1e-6;    // full-basis series vs direct
    double green = 1e-8;     // discrete Green identity, relative
  } tol;

  Grid grid() const;
  CoefficientSet coeffs1() const { return CoefficientSet(op1); }
  CoefficientSet coeffs2() const { return CoefficientSet(op2); }
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);
// throws ConfigError on any violated invariant
void validate(const RunConfig& c);

}  // namespace bih
