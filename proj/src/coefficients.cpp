#include "bih/coefficients.hpp"

#include <cmath>
#include <numbers>

#include "bih/types.hpp"

namespace bih {

using nlohmann::json;

void Bump::eval(double x, double y, double& v, double g[2], double H[3]) const {
  const double dx = x - cx, dy = y - cy, r2 = r * r;
  const double s = (dx * dx + dy * dy) / r2;
  if (s >= 1.0) {
    v = g[0] = g[1] = H[0] = H[1] = H[2] = 0.0;
    return;
  }
  const double t = 1.0 / (1.0 - s);
  v = amp * std::exp(1.0 - t);
  const double vs = -v * t * t;
  const double vss = v * (t * t * t * t - 2.0 * t * t * t);
  const double sx = 2 * dx / r2, sy = 2 * dy / r2;
  g[0] = vs * sx;
  g[1] = vs * sy;
  H[0] = vss * sx * sx + vs * 2 / r2;
  H[1] = vss * sx * sy;
  H[2] = vss * sy * sy + vs * 2 / r2;
}

namespace {

double num(const json& p, const char* k, double def) { return p.contains(k) ? p.at(k).get<double>() : def; }

Bump bump_of(const json& p) {
  Bump b;
  b.cx = num(p, "cx", 0.5);
  b.cy = num(p, "cy", 0.5);
  b.r = num(p, "r", 0.3);
  b.amp = num(p, "amp", 1.0);
  if (!(b.r > 0)) throw ConfigError("bump radius must be positive");
  return b;
}

struct QConst : CoefTerm {
  double c;
  explicit QConst(const json& p) : c(num(p, "c", 0.0)) {}
  void add(double, double, CoefPoint& p) const override { p.q += c; }
};

struct QBump : CoefTerm {
  Bump b;
  explicit QBump(const json& p) : b(bump_of(p)) {}
  void add(double x, double y, CoefPoint& p) const override {
    double v, g[2], H[3];
    b.eval(x, y, v, g, H);
    p.q += v;
  }
};

struct QTrig : CoefTerm {
  double m1, m2, amp;
  explicit QTrig(const json& p) : m1(num(p, "m1", 1)), m2(num(p, "m2", 1)), amp(num(p, "amp", 1)) {}
  void add(double x, double y, CoefPoint& p) const override {
    using std::numbers::pi;
    p.q += amp * std::sin(pi * m1 * x) * std::sin(pi * m2 * y);
  }
};

struct BConst : CoefTerm {
  double b1, b2;
  explicit BConst(const json& p) : b1(num(p, "b1", 0)), b2(num(p, "b2", 0)) {}
  void add(double, double, CoefPoint& p) const override {
    p.b1 += b1;
    p.b2 += b2;
  }
  bool background() const override { return true; }
};

// B = (a1, a2) * bump
struct BBump : CoefTerm {
  Bump b;
  double a1, a2;
  explicit BBump(const json& p) : b(bump_of(p)), a1(num(p, "a1", 1)), a2(num(p, "a2", 0)) {}
  void add(double x, double y, CoefPoint& p) const override {
    double v, g[2], H[3];
    b.eval(x, y, v, g, H);
    p.b1 += a1 * v;
    p.b2 += a2 * v;
    p.divb += a1 * g[0] + a2 * g[1];
    p.curlb += a2 * g[0] - a1 * g[1];
  }
};

// B = grad psi
struct BGrad : CoefTerm {
  Bump b;
  explicit BGrad(const json& p) : b(bump_of(p)) {}
  void add(double x, double y, CoefPoint& p) const override {
    double v, g[2], H[3];
    b.eval(x, y, v, g, H);
    p.b1 += g[0];
    p.b2 += g[1];
    p.divb += H[0] + H[2];
    p.psi += v;
  }
};

// B = (-d2 psi, d1 psi), divergence free with curl = lap psi
struct BCurl : CoefTerm {
  Bump b;
  explicit BCurl(const json& p) : b(bump_of(p)) {}
  void add(double x, double y, CoefPoint& p) const override {
    double v, g[2], H[3];
    b.eval(x, y, v, g, H);
    p.b1 += -g[1];
    p.b2 += g[0];
    p.curlb += H[0] + H[2];
  }
};

std::shared_ptr<const CoefTerm> make_term(const json& t) {
  if (!t.contains("preset")) throw ConfigError("coefficient term without 'preset'");
  const auto name = t.at("preset").get<std::string>();
  const json p = t.value("params", json::object());
  if (name == "zero") return nullptr;
  if (name == "q_const") return std::make_shared<QConst>(p);
  if (name == "q_bump") return std::make_shared<QBump>(p);
  if (name == "q_trig") return std::make_shared<QTrig>(p);
  if (name == "b_const") return std::make_shared<BConst>(p);
  if (name == "b_bump") return std::make_shared<BBump>(p);
  if (name == "b_grad") return std::make_shared<BGrad>(p);
  if (name == "b_curl") return std::make_shared<BCurl>(p);
  throw ConfigError("unknown coefficient preset '" + name + "'");
}

}  // namespace

const std::map<std::string, std::string>& preset_registry() {
  static const std::map<std::string, std::string> r = {
      {"zero", "no contribution"},
      {"q_const", "q += c"},
      {"q_bump", "q += bump(cx,cy,r,amp)"},
      {"q_trig", "q += amp sin(pi m1 x) sin(pi m2 y)"},
      {"b_const", "B += (b1,b2), counted as collar background"},
      {"b_bump", "B += (a1,a2) bump(cx,cy,r,amp)"},
      {"b_grad", "B += grad bump(cx,cy,r,amp)"},
      {"b_curl", "B += perp grad bump(cx,cy,r,amp), divergence free"},
  };
  return r;
}

CoefficientSet::CoefficientSet(const json& spec) {
  spec_ = spec.is_array() ? spec : json::array({spec});
  for (const auto& t : spec_)
    if (auto term = make_term(t)) terms_.push_back(term);
}

CoefPoint CoefficientSet::eval(double x, double y) const {
  CoefPoint p;
  for (const auto& t : terms_) t->add(x, y, p);
  return p;
}

CoefPoint CoefficientSet::eval_background(double x, double y) const {
  CoefPoint p;
  for (const auto& t : terms_)
    if (t->background()) t->add(x, y, p);
  return p;
}

std::string CoefficientSet::hash() const { return spec_.dump(); }

CoefficientSet CoefficientSet::plus(const CoefficientSet& other, double scale) const {
  json s = spec_;
  for (auto t : other.spec_) {
    auto p = t.value("params", json::object());
    const auto name = t.at("preset").get<std::string>();
    if (name == "q_const")
      p["c"] = num(p, "c", 0.0) * scale;
    else if (name == "b_const")
      throw ConfigError("cannot scale a background term");
    else
      p["amp"] = num(p, "amp", 1.0) * scale;
    t["params"] = p;
    s.push_back(t);
  }
  return CoefficientSet(s);
}

}  // namespace bih
