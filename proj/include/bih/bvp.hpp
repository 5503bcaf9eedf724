#pragma once

#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "bih/spectral.hpp"

namespace bih {

// Factorization of A - lambda, shareable read-only across right-hand sides.
class Resolvent {
 public:
  Resolvent(const DiscreteOperator& op, cplx lambda);
  VecC solve(const VecC& rhs) const;
  cplx lambda() const { return lambda_; }
  const DiscreteOperator& op() const { return *op_; }

 private:
  const DiscreteOperator* op_;
  cplx lambda_;
  Eigen::SparseLU<SpC, Eigen::COLAMDOrdering<int>> lu_;
};

struct BvpSolution {
  cplx lambda;
  TracePair f;
  VecC u;
  TracePair neumann;
  std::string method;
  double residual = 0;  // ||(A - lambda) u + C f|| / ||(A - lambda) g + C f||
};

// lifting given as an extended-grid field; f = dirichlet_trace(lifting)
BvpSolution solve_direct(const Resolvent& R, const VecC& lifting_ext);
BvpSolution solve_direct(const DiscreteOperator& op, cplx lambda, const VecC& lifting_ext);
// lifting given as interior values plus boundary data
BvpSolution solve_direct(const Resolvent& R, const VecC& g, const TracePair& f);

BvpSolution solve_series(const DiscreteOperator& op, const EigenData& data, cplx lambda, const TracePair& f,
                         int K_trunc, bool parallel = true);

// interior values of the collar blending lifting of f
VecC blend_lifting(const DiscreteOperator& op, const TracePair& f);

TracePair dtn_apply(const DiscreteOperator& op, cplx lambda, const TracePair& f);
TracePair dtn_apply(const Resolvent& R, const TracePair& f);

TracePair trace_difference_series(const DiscreteOperator& op, const EigenData& data, cplx lambda, cplx mu,
                                  const TracePair& f, bool parallel = true);

struct ClosenessRow {
  double mu;
  double u_diff;      // ||u1(mu) - u2(mu)||_{L2}
  double trace_diff;  // ||gamma_N(u1(mu) - u2(mu))||
};

std::vector<ClosenessRow> solution_closeness(const DiscreteOperator& op1, const DiscreteOperator& op2,
                                             const TracePair& f, const std::vector<double>& mus);

// distance from a real lambda to the computed spectrum, relative to 1 + |lambda|
void check_resolvent_set(const EigenData& data, cplx lambda);

}  // namespace bih
