#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "halfbvm/bvm.hpp"

namespace halfbvm {

struct SingularBlock : NumericalError {
  using NumericalError::NumericalError;
};

// omega(A): the midpoint stencil (-1/2, 0, 1/2) wrapped omega-circulantly,
// generating column c = (0, -1/2, 0, ..., 0, 1/(2 omega)). With
// Gamma = diag(omega^(j/N)) = Theta^{-1},
//   omega(A) = Gamma^{-1} F^{-1} diag(lambda) F Gamma,  lambda = F (Gamma c),
// where F is the unnormalized forward DFT.
struct OmegaCirculant {
  cd omega = -1.0;
  int N = 0;
  Vec gamma;
  Vec lambda;
};

OmegaCirculant build_omega_circulant(const GmmMatrices& gmm, cd omega);
Mat omega_circulant_matrix(int N, cd omega);
Mat reconstruct(const OmegaCirculant& oc);

enum class BlockSolver { Auto, Tridiagonal, Circulant, Dense };

// Factorization of (lambda I - tau D) through the n-sized Schur complement
//   S = lambda (lambda I - tau Q) - tau^2 P,
//   S y1 = tau r2 + (lambda I - tau Q) r1,  y2 = (lambda y1 - r1) / tau.
class FrequencyBlock {
 public:
  // symP/symQ: circulant symbols of P and Q, required for the circulant kind.
  FrequencyBlock(cd lambda, double tau, const DiscreteSystem& sys, BlockSolver kind,
                 std::shared_ptr<const SpMat> Q = nullptr, const Vec* symP = nullptr,
                 const Vec* symQ = nullptr);
  FrequencyBlock(FrequencyBlock&&) noexcept;
  FrequencyBlock& operator=(FrequencyBlock&&) noexcept;
  ~FrequencyBlock();

  Vec solve(const Vec& r) const;
  cd lambda() const { return lambda_; }
  bool perturbed() const { return perturbed_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  cd lambda_;
  double tau_;
  bool perturbed_ = false;
  std::shared_ptr<const SpMat> Q_;
};

BlockSolver resolve_block_solver(const DiscreteSystem& sys, BlockSolver requested);

Vec solve_frequency_block(cd lambda, double tau, const DiscreteSystem& sys, const Vec& v1,
                          BlockSolver kind = BlockSolver::Auto);

class OmegaPreconditioner {
 public:
  OmegaPreconditioner(const GmmMatrices& gmm, const DiscreteSystem& sys, cd omega = -1.0,
                      BlockSolver kind = BlockSolver::Auto);

  // z = P^{-1} r for P = omega(A) (x) I - tau I (x) D.
  Vec apply(const Vec& r) const;

  const OmegaCirculant& circulant() const { return oc_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  BlockSolver block_solver() const { return kind_; }

 private:
  OmegaCirculant oc_;
  DiscreteSystem sys_;
  double tau_;
  BlockSolver kind_;
  std::vector<FrequencyBlock> blocks_;
  std::vector<std::string> warnings_;
};

// omega(A) (x) I - tau I (x) D, for small instances only.
SpMat materialize_preconditioner(const GmmMatrices& gmm, const DiscreteSystem& sys, cd omega);

struct SolveReport {
  Vec solution;
  int iterations = 0;
  std::vector<double> residual_history;  // preconditioned, relative to the initial residual
  bool converged = false;
  double wall_time = 0.0;               // seconds
  double true_relative_residual = 0.0;  // ||b - M x|| / ||b||
};

struct GmresOptions {
  double tol = 1e-10;
  int max_iter = 500;
  int restart = 0;  // 0: full up to 2e5 unknowns, 50 above
};

using LinearOperator = std::function<Vec(const Vec&)>;

// Left-preconditioned GMRES with modified Gram-Schmidt and Givens rotations.
SolveReport gmres(const LinearOperator& A, const LinearOperator& Minv, const Vec& b, const GmresOptions& opt);

SolveReport gmres_solve(const AllAtOnceSystem& system, const OmegaPreconditioner* precond,
                        const GmresOptions& opt);

// Exact solve when P and Q share a fast eigenbasis: the DFT on periodic grids,
// the DST-I for a symmetric Toeplitz tridiagonal P with scalar Q. Each mode
// leaves a banded system of size 2N in time. Throws ConfigError otherwise.
SolveReport direct_solve(const AllAtOnceSystem& system);

}  // namespace halfbvm
