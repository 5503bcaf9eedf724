#include <algorithm>
#include <cmath>

#include "bih/spectral.hpp"

namespace bih {

TraceGrowthReport trace_growth_report(const EigenData& data, const Grid& grid) {
  TraceGrowthReport r;
  for (int k = 0; k < data.K(); ++k) {
    TraceGrowthRow row;
    row.k = k + 1;
    row.lambda = data.lambda[k];
    row.trace_norm = boundary_norm(data.trace(k), grid);
    row.by_lambda = row.trace_norm / (std::abs(row.lambda) + 1);
    row.by_weyl = row.trace_norm / std::pow(double(row.k), 2.0);
    r.max_by_lambda = std::max(r.max_by_lambda, row.by_lambda);
    r.max_by_weyl = std::max(r.max_by_weyl, row.by_weyl);
    r.rows.push_back(row);
  }
  return r;
}

EigenData align(const EigenData& a, const EigenData& b, const Grid& grid) {
  if (a.K() != b.K() || a.phi.rows() != b.phi.rows()) throw ConfigError("align: mismatched eigendata");
  EigenData out = b;
  const int K = a.K();
  const double h = grid.cell();
  int s = 0;
  while (s < K) {
    int e = s + 1;
    // b may only rotate inside its own degenerate subspaces (to rounding), or its columns
    // stop being eigenvectors
    auto close = [](const VecR& l, int k, double tol) { return std::abs(l[k - 1] - l[k]) < tol * (1 + std::abs(l[k - 1])); };
    while (e < K && close(a.lambda, e, 1e-6) && close(b.lambda, e, 1e-9)) ++e;
    const int m = e - s;
    if (m > 1) {
      // polar factor of P maximizes Re tr (Phi_a, Phi_b U)
      const MatC P = h * b.phi.middleCols(s, m).adjoint() * a.phi.middleCols(s, m);
      Eigen::JacobiSVD<MatC> svd(P, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const MatC U = svd.matrixU() * svd.matrixV().adjoint();
      out.phi.middleCols(s, m) = b.phi.middleCols(s, m) * U;
      out.traces.middleCols(s, m) = b.traces.middleCols(s, m) * U;
    }
    s = e;
  }
  for (int k = 0; k < K; ++k) {
    const cplx c = h * out.phi.col(k).dot(a.phi.col(k));
    if (std::abs(c) == 0) continue;
    const cplx ph = c / std::abs(c);
    out.phi.col(k) *= ph;
    out.traces.col(k) *= ph;
  }
  return out;
}

PairingDefect pairing_defect(const EigenData& a, const EigenData& b, const Grid& grid, double weight_exponent) {
  if (a.K() != b.K()) throw ConfigError("pairing_defect: mismatched K");
  const EigenData bb = align(a, b, grid);
  PairingDefect d;
  const int K = a.K();
  const int q0 = (3 * K) / 4;
  for (int k = 0; k < K; ++k) {
    const double dl = std::abs(a.lambda[k] - b.lambda[k]);
    d.delta_sup = std::max(d.delta_sup, dl);
    if (k >= q0) d.delta_proxy = std::max(d.delta_proxy, dl);
    const TracePair diff = a.trace(k) - bb.trace(k);
    d.S_series += std::pow(double(k + 1), weight_exponent) * boundary_norm(diff, grid);
  }
  return d;
}

double weyl_slope(const VecR& lambda, int k0, int k1) {
  if (k0 < 1 || k1 > lambda.size() || k1 - k0 < 2) throw ConfigError("weyl_slope: bad index range");
  const int m = k1 - k0 + 1;
  Eigen::MatrixXd X(m, 2);
  VecR y(m);
  for (int i = 0; i < m; ++i) {
    const int k = k0 + i;
    if (!(lambda[k - 1] > 0)) throw ConfigError("weyl_slope: nonpositive eigenvalue");
    X(i, 0) = 1;
    X(i, 1) = std::log(double(k));
    y[i] = std::log(lambda[k - 1]);
  }
  const Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
  return c[1];
}

}  // namespace bih
