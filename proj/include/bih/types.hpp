#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace bih {

using cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using MatC = Eigen::MatrixXcd;
using SpC = Eigen::SparseMatrix<cplx>;
using V2 = Eigen::Vector2d;
using V2C = Eigen::Vector2cd;

inline constexpr cplx I1{0.0, 1.0};

// exit codes used by the CLI
enum class Status { ok = 0, tolerance = 2, config = 3, solver = 4 };

struct Error : std::runtime_error {
  Status status;
  Error(Status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(Status::config, m) {}
};

struct SolverError : Error {
  explicit SolverError(const std::string& m) : Error(Status::solver, m) {}
};

// boundary pair field: two complex values per boundary node
struct TracePair {
  VecC c0, c1;

  TracePair() = default;
  explicit TracePair(int nb) : c0(VecC::Zero(nb)), c1(VecC::Zero(nb)) {}
  TracePair(VecC a, VecC b) : c0(std::move(a)), c1(std::move(b)) {}

  int size() const { return static_cast<int>(c0.size()); }

  VecC stacked() const {
    VecC s(2 * c0.size());
    s << c0, c1;
    return s;
  }
  static TracePair from_stacked(const VecC& s) {
    const auto nb = s.size() / 2;
    return {s.head(nb), s.tail(nb)};
  }

  TracePair operator+(const TracePair& o) const { return {c0 + o.c0, c1 + o.c1}; }
  TracePair operator-(const TracePair& o) const { return {c0 - o.c0, c1 - o.c1}; }
  TracePair operator*(cplx a) const { return {a * c0, a * c1}; }
};

}  // namespace bih
