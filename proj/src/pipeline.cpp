#include "bih/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <fmt/format.h>
#include <fmt/os.h>
#include <spdlog/spdlog.h>

#include "bih/reconstruct.hpp"

namespace bih {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string snap_base(const RunConfig& cfg, const PipelineOptions& opt) {
  return opt.eigsnapshot.empty() ? (fs::path(cfg.out) / "eig").string() : opt.eigsnapshot;
}

std::string snap_path(const RunConfig& cfg, const PipelineOptions& opt, int which) {
  return fmt::format("{}.{}.bin", snap_base(cfg, opt), which);
}

void ensure_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out);
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << j.dump(2) << "\n";
}

json read_json(const fs::path& p) {
  std::ifstream f(p);
  if (!f) return json();
  try {
    json j;
    f >> j;
    return j;
  } catch (const json::exception&) {
    return json();
  }
}

struct Ops {
  DiscreteOperator op1, op2;
};

Ops assemble_both(const RunConfig& cfg) {
  const Grid g = cfg.grid();
  return {assemble(g, cfg.coeffs1()), assemble(g, cfg.coeffs2())};
}

struct Loaded {
  EigenData d1, d2;
  std::string hash1, hash2;
};

Loaded load_pair(const RunConfig& cfg, const PipelineOptions& opt, const Ops& ops) {
  Loaded L;
  for (int w : {1, 2}) {
    const std::string p = snap_path(cfg, opt, w);
    if (!fs::exists(p)) throw ConfigError("missing snapshot " + p + " (run forward first)");
  }
  L.d1 = load_snapshot(snap_path(cfg, opt, 1), &L.hash1);
  L.d2 = load_snapshot(snap_path(cfg, opt, 2), &L.hash2);
  const DiscreteOperator* op[2] = {&ops.op1, &ops.op2};
  const EigenData* d[2] = {&L.d1, &L.d2};
  for (int w = 0; w < 2; ++w) {
    if (d[w]->grid_hash != op[w]->grid.hash() || d[w]->coef_hash != op[w]->coeffs.hash())
      throw ConfigError(fmt::format("snapshot {} does not match the config", snap_path(cfg, opt, w + 1)));
  }
  return L;
}

json snapshot_record(const RunConfig& cfg, const PipelineOptions& opt, const Loaded& L) {
  return {{"snapshot1", {{"path", snap_path(cfg, opt, 1)}, {"sha256", L.hash1}}},
          {"snapshot2", {{"path", snap_path(cfg, opt, 2)}, {"sha256", L.hash2}}}};
}

V2 base_frequency(const Grid& g) { return {2 * M_PI / g.L1, 0.0}; }

std::vector<AmpKind> amp_kinds(const RunConfig& cfg) {
  std::vector<AmpKind> a;
  for (const auto& s : cfg.amplitudes) a.push_back(amp_kind_from(s));
  return a;
}

bool admissible(const V2& xi, double tau) { return tau >= std::max(2.0, std::sqrt(1 + xi.squaredNorm())); }

void write_fourier_csv(const fs::path& p, const FourierGrid& fg) {
  auto out = fmt::output_file(p.string());
  out.print("m1,m2,re,im,residual,confidence\n");
  for (const auto& e : fg.entries) {
    const char* conf = e.skipped ? "skipped" : (e.confident ? "ok" : "low");
    out.print("{},{},{:.17g},{:.17g},{:.17g},{}\n", e.m1, e.m2, e.value.real(), e.value.imag(), e.residual, conf);
  }
}

void write_field_csv(const fs::path& p, const Grid& g, const VecR& ext) {
  auto out = fmt::output_file(p.string());
  for (int i = 0; i <= g.n1 + 1; ++i) {
    for (int j = 0; j <= g.n2 + 1; ++j) out.print("{}{:.17g}", j ? "," : "", ext[g.eidx(i, j)]);
    out.print("\n");
  }
}

VecR interior_to_extended(const Grid& g, const VecR& u) {
  VecR e = VecR::Zero(g.NE());
  for (int i = 1; i <= g.n1; ++i)
    for (int j = 1; j <= g.n2; ++j) e[g.eidx(i, j)] = u[g.iidx(i, j)];
  return e;
}

json fourier_summary(const FourierGrid& fg) {
  int low = 0, skipped = 0;
  for (const auto& e : fg.entries) {
    if (e.skipped) ++skipped;
    else if (!e.confident) ++low;
  }
  return {{"entries", fg.entries.size()}, {"low_confidence", low}, {"skipped", skipped}};
}

struct Check {
  std::string name, detail;
  double value, tolerance;
  std::string status;  // pass, fail, skip
};

}  // namespace

Status run_forward(const RunConfig& cfg, const PipelineOptions& opt) {
  ensure_out(cfg);
  const Ops ops = assemble_both(cfg);
  json rec = {{"config", to_json(cfg)}, {"grid_hash", ops.op1.grid.hash()}};
  std::vector<EigenData> data;
  for (int w : {1, 2}) {
    const DiscreteOperator& op = w == 1 ? ops.op1 : ops.op2;
    EigenDiagnostics diag;
    spdlog::info("operator {}: eigensolve K = {} on N = {}", w, cfg.K, op.N());
    data.push_back(eigensolve(op, cfg.K, {}, &diag));
    const std::string path = snap_path(cfg, opt, w);
    if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    const std::string h = save_snapshot(data.back(), path);
    rec[fmt::format("operator{}", w)] = {{"snapshot", path},
                                         {"sha256", h},
                                         {"coef_hash", op.coeffs.hash()},
                                         {"method", diag.method},
                                         {"iterations", diag.iterations},
                                         {"max_residual", diag.max_residual},
                                         {"orthonormality", diag.orthonormality}};
    spdlog::info("operator {}: {} ({} iterations, residual {:.2e})", w, diag.method, diag.iterations,
                 diag.max_residual);
  }
  write_json(fs::path(cfg.out) / "forward.json", rec);
  auto csv = fmt::output_file((fs::path(cfg.out) / "eigenvalues.csv").string());
  csv.print("k,lambda1,lambda2\n");
  for (int k = 0; k < cfg.K; ++k) csv.print("{},{:.17g},{:.17g}\n", k + 1, data[0].lambda[k], data[1].lambda[k]);
  return Status::ok;
}

Status run_verify(const RunConfig& cfg, const PipelineOptions& opt) {
  ensure_out(cfg);
  const Ops ops = assemble_both(cfg);
  const Loaded L = load_pair(cfg, opt, ops);
  const Grid& g = ops.op1.grid;
  std::vector<Check> checks;
  const bool compatible = collar_compatible(ops.op1, ops.op2);
  const V2 xi = base_frequency(g);
  const auto amps = amp_kinds(cfg);

  if (compatible) {
    for (double tau : cfg.taus) {
      if (!admissible(xi, tau)) continue;
      const ProbeGeometry geo = make_geometry(xi, tau);
      const Resolvent R1(ops.op1, geo.lam * geo.lam * geo.lam * geo.lam), R2(ops.op2, R1.lambda());
      for (AmpKind a : amps) {
        const ProbePair p = make_probe(geo, a, Flavor::lattice, g);
        const IdentityReport r = identity_check_528(R1, R2, L.d1, L.d2, p);
        const bool zero = std::abs(r.S_diff) == 0 && r.abs_gap <= 1e-13;
        checks.push_back({"identity", fmt::format("tau={} amp={}", tau, to_string(a)), r.rel_gap, cfg.tol.identity,
                          (zero || r.rel_gap <= cfg.tol.identity) ? "pass" : "fail"});
        const PairingDifference pd = pairing_difference(R1, R2, p, sample_probe(p, g));
        const bool pz = std::abs(pd.boundary) == 0 && std::abs(pd.volume) <= 1e-13;
        checks.push_back({"route", fmt::format("tau={} amp={}", tau, to_string(a)), pd.rel_gap, cfg.tol.route,
                          (pz || pd.rel_gap <= cfg.tol.route) ? "pass" : "fail"});
      }
    }

    // L(mu) -> L* monotonically, at the first admissible tau
    const auto it = std::find_if(cfg.taus.begin(), cfg.taus.end(), [&](double t) { return admissible(xi, t); });
    if (it != cfg.taus.end()) {
      const double tau = *it;
      const ProbeGeometry geo = make_geometry(xi, tau);
      const ProbePair p = make_probe(geo, AmpKind::one, Flavor::lattice, g);
      const ProbeSamples s = sample_probe(p, g);
      const EigenData d2 = align(L.d1, L.d2, g);
      const cplx Ls = functional_Lstar(L.d1, d2, p, s, g, opt.parallel).total();
      double prev = INFINITY;
      bool mono = true;
      double last = 0;
      const double floor = std::min(L.d1.lambda.minCoeff(), d2.lambda.minCoeff()) - 1;
      for (double mu : cfg.mus) {
        if (mu > floor) continue;
        const double gap = std::abs(functional_L(L.d1, d2, p, s, g, mu, opt.parallel).total() - Ls);
        if (gap > prev * (1 + 1e-12) + 1e-300) mono = false;
        prev = last = gap;
      }
      checks.push_back({"mu_sweep", fmt::format("tau={} |L(mu_last)-L*|", tau), last, 0, mono ? "pass" : "fail"});
    }
  } else {
    checks.push_back({"identity", "B1 != B2 on the collar", 0, cfg.tol.identity, "skip"});
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> nd;
  auto rvec = [&](int n) {
    VecC v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
    return v;
  };
  auto rpair = [&] {
    VecC a = rvec(g.NB()), b = rvec(g.NB());
    return TracePair(a, b);
  };

  for (int w : {1, 2}) {
    const DiscreteOperator& op = w == 1 ? ops.op1 : ops.op2;
    const VecC u = rvec(g.N()), v = rvec(g.N());
    const TracePair f = rpair(), gg = rpair();
    const cplx lhs = volume_inner_product(g, op.A * u + op.C * f.stacked(), v) -
                     volume_inner_product(g, u, op.A * v + op.C * gg.stacked());
    const cplx rhs = boundary_inner_product(neumann_trace(op, u, f), gg, g) -
                     boundary_inner_product(f, neumann_trace(op, v, gg), g);
    const double scale = std::abs(volume_inner_product(g, op.A * u + op.C * f.stacked(), v)) + std::abs(rhs) + 1e-300;
    const double rel = std::abs(lhs - rhs) / scale;
    checks.push_back({"green", fmt::format("operator {}", w), rel, cfg.tol.green, rel <= cfg.tol.green ? "pass" : "fail"});
  }

  for (int w : {1, 2}) {
    const DiscreteOperator& op = w == 1 ? ops.op1 : ops.op2;
    const EigenData& d = w == 1 ? L.d1 : L.d2;
    if (d.K() < g.N()) {
      checks.push_back({"series", fmt::format("operator {} K < N", w), 0, cfg.tol.series, "skip"});
      continue;
    }
    const cplx lam = d.lambda.minCoeff() - 1e3;
    const TracePair f = rpair();
    const Resolvent R(op, lam);
    const BvpSolution direct = solve_direct(R, blend_lifting(op, f), f);
    const BvpSolution series = solve_series(op, d, lam, f, d.K(), opt.parallel);
    const double rel = volume_norm(g, series.u - direct.u) / volume_norm(g, direct.u);
    checks.push_back({"series", fmt::format("operator {} lambda={}", w, lam.real()), rel, cfg.tol.series,
                      rel <= cfg.tol.series ? "pass" : "fail"});
  }

  bool ok = true;
  json rows = json::array();
  auto csv = fmt::output_file((fs::path(cfg.out) / "verify.csv").string());
  csv.print("check,detail,value,tolerance,status\n");
  for (const auto& c : checks) {
    ok = ok && c.status != "fail";
    csv.print("{},{},{:.6e},{:.3e},{}\n", c.name, c.detail, c.value, c.tolerance, c.status);
    fmt::print("{:<10} {:<28} {:>12.4e} {:>10.2e}  {}\n", c.name, c.detail, c.value, c.tolerance, c.status);
    rows.push_back({{"check", c.name}, {"detail", c.detail}, {"value", c.value}, {"tolerance", c.tolerance},
                    {"status", c.status}});
  }
  json rec = snapshot_record(cfg, opt, L);
  rec["checks"] = rows;
  rec["pass"] = ok;
  write_json(fs::path(cfg.out) / "verify.json", rec);
  return ok ? Status::ok : Status::tolerance;
}

Status run_probe(const RunConfig& cfg, const PipelineOptions& opt) {
  ensure_out(cfg);
  const Ops ops = assemble_both(cfg);
  const Loaded L = load_pair(cfg, opt, ops);
  const Grid& g = ops.op1.grid;
  const bool compatible = collar_compatible(ops.op1, ops.op2);
  const EigenData d2 = align(L.d1, L.d2, g);
  const FourierGrid lattice = make_lattice(g, cfg.m_max);
  const auto amps = amp_kinds(cfg);
  const auto raw = probe_sweep(ops.op1, {&ops.op2}, lattice, cfg.taus, amps, opt.parallel);

  auto csv = fmt::output_file((fs::path(cfg.out) / "probe_sweep.csv").string());
  csv.print("xi1,xi2,tau,amplitude_kind,re_S_diff,im_S_diff,re_Lstar,im_Lstar,gap\n");
  for (size_t a = 0; a < amps.size(); ++a) {
    for (const auto& e : raw[0][a].entries) {
      for (const auto& [tau, S] : e.raw) {
        cplx Ls = NAN;
        if (compatible) {
          const ProbePair p = make_probe(make_geometry(e.xi, tau), amps[a], Flavor::lattice, g);
          Ls = functional_Lstar(L.d1, d2, p, sample_probe(p, g), g, opt.parallel).total();
        }
        const double gap = std::abs(S - Ls) / std::max(std::abs(S), 1e-300);
        csv.print("{:.17g},{:.17g},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.6e}\n", e.xi[0], e.xi[1], tau,
                  to_string(amps[a]), S.real(), S.imag(), Ls.real(), Ls.imag(), gap);
      }
    }
  }
  json rec = snapshot_record(cfg, opt, L);
  rec["collar_compatible"] = compatible;
  write_json(fs::path(cfg.out) / "probe.json", rec);
  return Status::ok;
}

Status run_reconstruct(const RunConfig& cfg, const PipelineOptions& opt) {
  ensure_out(cfg);
  const Ops ops = assemble_both(cfg);
  const Loaded L = load_pair(cfg, opt, ops);
  const Grid& g = ops.op1.grid;
  if (!collar_compatible(ops.op1, ops.op2)) throw ConfigError("reconstruct: B1 and B2 differ on the collar");
  const fs::path out(cfg.out);

  bool want_one = false, want_quad = false;
  for (const auto& s : cfg.amplitudes) (s == "one" ? want_one : want_quad) = true;
  // psi needs q for its correction term, so the constant amplitude always runs with it
  std::vector<AmpKind> amps;
  if (want_one || want_quad) amps.push_back(AmpKind::one);
  if (want_quad) amps.push_back(AmpKind::quadratic);

  const FourierGrid lattice = make_lattice(g, cfg.m_max);
  const auto raw = probe_sweep(ops.op1, {&ops.op2}, lattice, cfg.taus, amps, opt.parallel);
  json rec = snapshot_record(cfg, opt, L);
  json fields = json::object();

  auto synth = [&](const FourierGrid& fg, const std::string& name) {
    try {
      const Synthesis s = inverse_fourier(fg, g);
      write_field_csv(out / (name + "_field.csv"), g, s.field);
      fields[name] = {{"file", name + "_field.csv"}, {"imag_ratio", s.imag_ratio}};
    } catch (const Error& e) {
      fields[name] = {{"error", e.what()}};
      spdlog::warn("{} synthesis: {}", name, e.what());
    }
  };

  const FourierGrid qhat = q_from_raw(raw[0][0]);
  if (want_one) {
    const FourierGrid curl = curl_from_raw(raw[0][0]);
    write_fourier_csv(out / "curlb_hat.csv", curl);
    write_fourier_csv(out / "q_hat.csv", qhat);
    rec["curlb_hat"] = fourier_summary(curl);
    rec["q_hat"] = fourier_summary(qhat);
    synth(curl, "curlb");
    synth(qhat, "q");
  }
  if (want_quad) {
    // the correction term needs a synthesizable q; B2 - B1 with nonzero curl breaks that
    try {
      const FourierGrid psi = psi_from_raw(raw[0][1], qhat, g);
      write_fourier_csv(out / "psi_hat.csv", psi);
      rec["psi_hat"] = fourier_summary(psi);
      synth(psi, "psi");
    } catch (const Error& e) {
      rec["psi_hat"] = {{"error", e.what()}};
      spdlog::warn("psi recovery: {}", e.what());
    }
  }

  const HodgeResult h = hodge_decompose(ops.op2.b1 - ops.op1.b1, ops.op2.b2 - ops.op1.b2, g);
  write_field_csv(out / "psi_hodge_field.csv", g, interior_to_extended(g, h.psi));
  rec["hodge"] = {{"file", "psi_hodge_field.csv"}, {"residual", h.residual}};
  rec["fields"] = fields;
  rec["amplitudes"] = cfg.amplitudes;
  write_json(out / "reconstruct.json", rec);
  return Status::ok;
}

Status run_stability(const RunConfig& cfg, const PipelineOptions& opt) {
  ensure_out(cfg);
  if (cfg.stability.eps.empty()) throw ConfigError("stability: eps ladder is empty");
  if (cfg.stability.perturbation.empty()) throw ConfigError("stability: no perturbation preset");
  StabilityConfig sc;
  sc.eps = cfg.stability.eps;
  sc.K = cfg.stability.K;
  sc.m_max = cfg.stability.m_max;
  sc.taus = cfg.stability.taus;
  const StabilityReport r =
      stability_sweep(cfg.grid(), cfg.coeffs1(), CoefficientSet(cfg.stability.perturbation), sc, opt.parallel);

  auto csv = fmt::output_file((fs::path(cfg.out) / "stability.csv").string());
  csv.print("eps,delta_sup,delta_proxy,S_series,q_L2,q_Linf,q_Hm1,B_L2,B_Linf,qhat_max,theta1,theta2\n");
  for (const auto& w : r.rows)
    csv.print("{:.6e},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.6f},{:.6f}\n", w.eps,
              w.delta_sup, w.delta_proxy, w.S_series, w.q_L2, w.q_Linf, w.q_Hm1, w.B_L2, w.B_Linf, w.qhat_max,
              r.theta1, r.theta2);
  write_json(fs::path(cfg.out) / "stability.json",
             {{"theta1", r.theta1}, {"theta2", r.theta2}, {"C", r.C}, {"C_drift", r.C_drift}, {"partial", r.partial}});
  return Status::ok;
}

Status run_report(const RunConfig& cfg, const PipelineOptions&) {
  const fs::path out(cfg.out);
  json rep = json::object();
  Status st = Status::ok;
  for (const char* stage : {"forward", "verify", "probe", "reconstruct", "stability"}) {
    const json j = read_json(out / (std::string(stage) + ".json"));
    if (j.is_null()) {
      fmt::print("{:<12} missing\n", stage);
      continue;
    }
    rep[stage] = j;
    if (std::string(stage) == "verify") {
      const bool ok = j.value("pass", false);
      if (!ok) st = Status::tolerance;
      fmt::print("{:<12} {}\n", stage, ok ? "pass" : "FAIL");
    } else if (std::string(stage) == "stability") {
      fmt::print("{:<12} theta1 {:.3f}  theta2 {:.3f}  C {:.3e}  drift {:.2f}\n", stage, j.value("theta1", 0.0),
                 j.value("theta2", 0.0), j.value("C", 0.0), j.value("C_drift", 0.0));
    } else if (std::string(stage) == "reconstruct") {
      for (const char* k : {"curlb_hat", "q_hat", "psi_hat"})
        if (j.contains(k))
          fmt::print("{:<12} {:<10} low-confidence {} of {}\n", stage, k, j[k].value("low_confidence", 0),
                     j[k].value("entries", 0));
    } else {
      fmt::print("{:<12} done\n", stage);
    }
  }
  write_json(out / "report.json", rep);
  return st;
}

}  // namespace bih
