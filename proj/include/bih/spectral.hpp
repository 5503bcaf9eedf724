#pragma once

#include <string>
#include <vector>

#include "bih/operator.hpp"

namespace bih {

// phi columns are orthonormal under (a,b) = h1 h2 sum a conj b.
// traces holds gamma_N(phi_k) stacked as [c0; c1], one column per k.
struct EigenData {
  VecR lambda;
  MatC phi;
  MatC traces;
  std::string grid_hash;
  std::string coef_hash;

  int K() const { return static_cast<int>(lambda.size()); }
  TracePair trace(int k) const { return TracePair::from_stacked(traces.col(k)); }
};

struct EigenOptions {
  int dense_limit = 4100;
  int block = 8;
  int max_outer = 60;
  double tol = 1e-8;  // residual <= tol (|lambda| + 1)
};

struct EigenDiagnostics {
  std::string method;
  int iterations = 0;
  double max_residual = 0;     // max_k ||A phi - lambda phi|| / (|lambda|+1)
  double orthonormality = 0;   // max |(phi_i, phi_j) - delta_ij|
};

EigenData eigensolve(const DiscreteOperator& op, int K, const EigenOptions& opt = {},
                     EigenDiagnostics* diag = nullptr);

// smallest K eigenpairs of a Hermitian sparse matrix, vectors unit in the plain 2-norm
void hermitian_smallest(const SpC& A, int K, const EigenOptions& opt, VecR& vals, MatC& vecs,
                        EigenDiagnostics& diag);

struct TraceGrowthRow {
  int k;
  double lambda;
  double trace_norm;
  double by_lambda;  // ||gamma_N phi_k|| / (|lambda_k| + 1)
  double by_weyl;    // ||gamma_N phi_k|| / k^{4/n}
};

struct TraceGrowthReport {
  std::vector<TraceGrowthRow> rows;
  double max_by_lambda = 0;
  double max_by_weyl = 0;
};

TraceGrowthReport trace_growth_report(const EigenData& data, const Grid& grid);

// copy of b rotated inside the clusters of a and phase fixed so (phi_a_k, phi_b_k) >= 0
EigenData align(const EigenData& a, const EigenData& b, const Grid& grid);

struct PairingDefect {
  double delta_sup = 0;
  double delta_proxy = 0;  // max over the top quartile of k
  double S_series = 0;
};

PairingDefect pairing_defect(const EigenData& a, const EigenData& b, const Grid& grid,
                             double weight_exponent = 2.0);

// least-squares slope of log lambda_k vs log k over k in [k0, k1] (1-based)
double weyl_slope(const VecR& lambda, int k0, int k1);

// versioned binary snapshot with a SHA-256 content hash
std::string save_snapshot(const EigenData& data, const std::string& path);
EigenData load_snapshot(const std::string& path, std::string* content_hash = nullptr);
std::string sha256_hex(const void* data, size_t n);

}  // namespace bih
