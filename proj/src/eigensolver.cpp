#include <cmath>
#include <random>

#include <spdlog/spdlog.h>

#include "bih/spectral.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace bih {

namespace {

void dense_smallest(const SpC& A, int K, VecR& vals, MatC& vecs) {
  const int n = static_cast<int>(A.rows());
  MatC D = MatC(A);
  VecR w(n);
  vecs.resize(n, K);
  std::vector<lapack_int> isuppz(2 * static_cast<size_t>(std::max(1, K)));
  lapack_int m = 0;
  const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, D.data(), n, 0.0, 0.0, 1, K, 0.0,
                                         &m, w.data(), vecs.data(), n, isuppz.data());
  if (info != 0 || m != K) throw SolverError("zheevr failed, info = " + std::to_string(info));
  vals = w.head(K);
}

MatC orthonormal(const MatC& X) {
  Eigen::HouseholderQR<MatC> qr(X);
  return qr.householderQ() * MatC::Identity(X.rows(), X.cols());
}

}  // namespace

void hermitian_smallest(const SpC& A, int K, const EigenOptions& opt, VecR& vals, MatC& vecs,
                        EigenDiagnostics& diag) {
  const int n = static_cast<int>(A.rows());
  if (K < 1 || K > n) throw ConfigError("eigensolve: need 1 <= K <= N");
  if (n <= opt.dense_limit) {
    dense_smallest(A, K, vals, vecs);
    diag.method = "dense-zheevr";
    diag.iterations = 1;
    return;
  }

  // find a shift below the spectrum: A - sigma must admit a Cholesky factorization
  Eigen::SimplicialLDLT<SpC> ldlt;
  Eigen::SimplicialLLT<SpC> probe;
  SpC Id(n, n);
  Id.setIdentity();
  double sigma = 0;
  for (int tries = 0;; ++tries) {
    probe.compute(A - cplx(sigma) * Id);
    if (probe.info() == Eigen::Success) break;
    if (tries > 40) throw SolverError("eigensolve: no shift below the spectrum found");
    sigma = sigma == 0 ? -1.0 : 4 * sigma;
  }
  ldlt.compute(A - cplx(sigma) * Id);
  if (ldlt.info() != Eigen::Success) throw SolverError("eigensolve: shifted factorization failed");

  int p = K + std::max(K / 2, 2 * opt.block);
  p = ((p + opt.block - 1) / opt.block) * opt.block;
  p = std::min(p, n / 3);
  if (p < K) throw SolverError("eigensolve: K too large for the iterative path");

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  MatC X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = cplx(nd(rng), nd(rng));
  X = orthonormal(X);

  for (int it = 1; it <= opt.max_outer; ++it) {
    const MatC Y1 = ldlt.solve(X);
    const MatC Y2 = ldlt.solve(Y1);
    MatC Z(n, 3 * p);
    Z << X, Y1, Y2;
    const MatC Q = orthonormal(Z);
    const MatC AQ = A * Q;
    MatC H = Q.adjoint() * AQ;
    H = 0.5 * (H + H.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatC> es(H);
    X = Q * es.eigenvectors().leftCols(p);
    vals = es.eigenvalues().head(K);
    const MatC R = AQ * es.eigenvectors().leftCols(K) - X.leftCols(K) * vals.asDiagonal();
    double worst = 0;
    for (int k = 0; k < K; ++k) worst = std::max(worst, R.col(k).norm() / (std::abs(vals[k]) + 1));
    spdlog::debug("shift-invert outer {}: worst residual {:.3e}", it, worst);
    diag.iterations = it;
    if (worst <= opt.tol) {
      vecs = X.leftCols(K);
      diag.method = "block-shift-invert";
      return;
    }
  }
  throw SolverError("eigensolve: shift-invert iteration did not converge in " + std::to_string(opt.max_outer) +
                    " outer steps");
}

EigenData eigensolve(const DiscreteOperator& op, int K, const EigenOptions& opt, EigenDiagnostics* diag) {
  if (K > op.N()) throw ConfigError("eigensolve: K exceeds N");
  EigenDiagnostics local;
  EigenDiagnostics& d = diag ? *diag : local;
  EigenData out;
  MatC V;
  hermitian_smallest(op.A, K, opt, out.lambda, V, d);

  const double s = 1.0 / std::sqrt(op.grid.cell());
  out.phi = s * V;
  out.traces = op.NC * out.phi;
  out.grid_hash = op.grid.hash();
  out.coef_hash = op.coeffs.hash();

  const MatC R = op.A * V - V * out.lambda.asDiagonal();
  d.max_residual = 0;
  for (int k = 0; k < K; ++k) d.max_residual = std::max(d.max_residual, R.col(k).norm() / (std::abs(out.lambda[k]) + 1));
  const MatC G = V.adjoint() * V - MatC::Identity(K, K);
  d.orthonormality = G.cwiseAbs().maxCoeff();
  return out;
}

}  // namespace bih
