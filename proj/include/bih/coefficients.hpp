#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace bih {

// Closed-form values of the coefficient fields at a point.
struct CoefPoint {
  double b1 = 0, b2 = 0;
  double divb = 0;
  double curlb = 0;  // d1 b2 - d2 b1
  double q = 0;
  double psi = 0;  // potential of the gradient part, when there is one
};

// exp(1 - 1/(1-s)) * amp, s = |x-c|^2/r^2; value, gradient, hessian (xx, xy, yy)
struct Bump {
  double cx = 0.5, cy = 0.5, r = 0.3, amp = 1.0;
  void eval(double x, double y, double& v, double g[2], double H[3]) const;
};

class CoefTerm {
 public:
  virtual ~CoefTerm() = default;
  virtual void add(double x, double y, CoefPoint& p) const = 0;
  // part of B that counts as the background B0 on the collar
  virtual bool background() const { return false; }
};

// A sum of named preset terms. Everything is real-valued by construction.
class CoefficientSet {
 public:
  CoefficientSet() = default;
  CoefficientSet(const nlohmann::json& spec);

  CoefPoint eval(double x, double y) const;
  CoefPoint eval_background(double x, double y) const;
  const nlohmann::json& spec() const { return spec_; }
  std::string hash() const;
  bool empty() const { return terms_.empty(); }

  // scaled copy of every non-background term (stability families)
  CoefficientSet plus(const CoefficientSet& other, double scale) const;

 private:
  nlohmann::json spec_ = nlohmann::json::array();
  std::vector<std::shared_ptr<const CoefTerm>> terms_;
};

// registry: preset name -> short description of its parameters
const std::map<std::string, std::string>& preset_registry();

}  // namespace bih
