#include "halfbvm/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "halfbvm/numerics.hpp"

namespace halfbvm {

OmegaCirculant build_omega_circulant(const GmmMatrices& gmm, cd omega) {
  if (std::abs(std::abs(omega) - 1.0) > 1e-12) throw ConfigError("omega must have unit modulus");
  const int N = gmm.N;
  OmegaCirculant oc;
  oc.omega = omega;
  oc.N = N;
  const double theta = std::arg(omega);
  oc.gamma.resize(N);
  for (int j = 0; j < N; ++j) oc.gamma[j] = std::polar(1.0, theta * j / N);
  Vec c = Vec::Zero(N);
  c[1] = -0.5;
  c[N - 1] += 0.5 / omega;
  oc.lambda = oc.gamma.cwiseProduct(c);
  fft_inplace(oc.lambda, -1);
  return oc;
}

Mat omega_circulant_matrix(int N, cd omega) {
  Vec c = Vec::Zero(N);
  c[1] = -0.5;
  c[N - 1] += 0.5 / omega;
  Mat C(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) C(i, j) = i >= j ? c[i - j] : omega * c[N + i - j];
  return C;
}

Mat reconstruct(const OmegaCirculant& oc) {
  const int N = oc.N;
  Mat F(N, N), Finv(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      F(i, j) = std::polar(1.0, -2.0 * kPi * i * j / N);
      Finv(i, j) = std::conj(F(i, j)) / double(N);
    }
  Mat G = oc.gamma.asDiagonal();
  Mat Ginv = oc.gamma.cwiseInverse().asDiagonal();
  return Ginv * Finv * oc.lambda.asDiagonal() * F * G;
}

namespace {

bool diagonal_only(const SpMat& Q) {
  for (int k = 0; k < Q.outerSize(); ++k)
    for (SpMat::InnerIterator it(Q, k); it; ++it)
      if (it.row() != it.col() && it.value() != cd(0.0)) return false;
  return true;
}

bool tridiagonal(const SpMat& P) {
  for (int k = 0; k < P.outerSize(); ++k)
    for (SpMat::InnerIterator it(P, k); it; ++it)
      if (std::abs(it.row() - it.col()) > 1 && it.value() != cd(0.0)) return false;
  return true;
}

Vec circulant_symbols(const SpMat& C) {
  Vec c = Vec::Zero(C.rows());
  for (SpMat::InnerIterator it(C, 0); it; ++it) c[it.row()] = it.value();
  fft_inplace(c, -1);
  return c;
}

}  // namespace

BlockSolver resolve_block_solver(const DiscreteSystem& sys, BlockSolver requested) {
  if (requested != BlockSolver::Auto) return requested;
  if (sys.grid.boundary == Boundary::Periodic) return BlockSolver::Circulant;
  if (diagonal_only(sys.Q) && tridiagonal(sys.P)) return BlockSolver::Tridiagonal;
  return BlockSolver::Dense;
}

struct FrequencyBlock::Impl {
  BlockSolver kind = BlockSolver::Dense;
  int n = 0;
  std::vector<cd> dl, d, du, du2;
  std::vector<lapack_int> ipiv;
  Vec inv_symbol;
  Eigen::FullPivLU<Mat> lu;

  // Returns false when the reduced matrix is singular.
  bool build(cd lam, double tau, const DiscreteSystem& sys, const Vec* symP, const Vec* symQ) {
    n = sys.n();
    const SpMat& P = sys.P;
    const SpMat& Q = sys.Q;
    switch (kind) {
      case BlockSolver::Tridiagonal: {
        d.assign(static_cast<size_t>(n), 0.0);
        dl.assign(static_cast<size_t>(std::max(n - 1, 1)), 0.0);
        du.assign(static_cast<size_t>(std::max(n - 1, 1)), 0.0);
        du2.assign(static_cast<size_t>(std::max(n - 2, 1)), 0.0);
        ipiv.assign(static_cast<size_t>(n), 0);
        for (int i = 0; i < n; ++i) {
          d[static_cast<size_t>(i)] = lam * lam - lam * tau * Q.coeff(i, i) - tau * tau * P.coeff(i, i);
          if (i + 1 < n) {
            du[static_cast<size_t>(i)] = -tau * tau * P.coeff(i, i + 1);
            dl[static_cast<size_t>(i)] = -tau * tau * P.coeff(i + 1, i);
          }
        }
        const lapack_int info =
            LAPACKE_zgttrf(n, dl.data(), d.data(), du.data(), du2.data(), ipiv.data());
        if (info < 0) throw NumericalError("zgttrf rejected its arguments");
        return info == 0;
      }
      case BlockSolver::Circulant: {
        if (symP == nullptr || symQ == nullptr) throw NumericalError("circulant block needs symbols");
        inv_symbol.resize(n);
        // Singularity is judged against the largest symbol, so the constant mode of
        // a periodic operator is not measured against its own round-off.
        double scale = 0.0;
        for (int k = 0; k < n; ++k) {
          const cd a = lam * lam, b = lam * tau * (*symQ)[k], c = tau * tau * (*symP)[k];
          inv_symbol[k] = a - b - c;
          scale = std::max(scale, std::abs(a) + std::abs(b) + std::abs(c));
        }
        for (int k = 0; k < n; ++k) {
          if (inv_symbol[k] == cd(0.0) || std::abs(inv_symbol[k]) <= 1e-14 * scale) return false;
          inv_symbol[k] = 1.0 / inv_symbol[k];
        }
        return true;
      }
      case BlockSolver::Dense:
      case BlockSolver::Auto: {
        Mat S = Mat::Identity(n, n) * (lam * lam) - lam * tau * dense(Q) - tau * tau * dense(P);
        lu.compute(S);
        return lu.isInvertible();
      }
    }
    return false;
  }

  Vec solve_reduced(Vec rhs) const {
    switch (kind) {
      case BlockSolver::Tridiagonal: {
        const lapack_int info = LAPACKE_zgttrs(LAPACK_COL_MAJOR, 'N', n, 1, dl.data(), d.data(), du.data(),
                                               du2.data(), ipiv.data(), rhs.data(), n);
        if (info != 0) throw NumericalError("zgttrs failed");
        return rhs;
      }
      case BlockSolver::Circulant: {
        fft_inplace(rhs, -1);
        rhs = rhs.cwiseProduct(inv_symbol);
        fft_inplace(rhs, +1);
        return rhs / double(n);
      }
      default:
        return lu.solve(rhs);
    }
  }
};

FrequencyBlock::FrequencyBlock(cd lambda, double tau, const DiscreteSystem& sys, BlockSolver kind,
                               std::shared_ptr<const SpMat> Q, const Vec* symP, const Vec* symQ)
    : impl_(std::make_unique<Impl>()), lambda_(lambda), tau_(tau), Q_(std::move(Q)) {
  if (!Q_) Q_ = std::make_shared<const SpMat>(sys.Q);
  impl_->kind = resolve_block_solver(sys, kind);
  Vec sp, sq;
  if (impl_->kind == BlockSolver::Circulant && (symP == nullptr || symQ == nullptr)) {
    sp = circulant_symbols(sys.P);
    sq = circulant_symbols(sys.Q);
    symP = &sp;
    symQ = &sq;
  }
  if (impl_->build(lambda_, tau_, sys, symP, symQ)) return;
  lambda_ += 1e-14 * (1.0 + std::abs(lambda_));
  perturbed_ = true;
  if (!impl_->build(lambda_, tau_, sys, symP, symQ))
    throw SingularBlock("frequency block with lambda = (" + std::to_string(lambda.real()) + ", " +
                        std::to_string(lambda.imag()) + ") is singular");
}

FrequencyBlock::FrequencyBlock(FrequencyBlock&&) noexcept = default;
FrequencyBlock& FrequencyBlock::operator=(FrequencyBlock&&) noexcept = default;
FrequencyBlock::~FrequencyBlock() = default;

Vec FrequencyBlock::solve(const Vec& r) const {
  const int n = impl_->n;
  if (r.size() != 2 * n) throw DimensionMismatch("frequency block right-hand side must have size 2n");
  Vec r1 = r.head(n), r2 = r.tail(n);
  Vec shifted = lambda_ * r1 - tau_ * ((*Q_) * r1);
  Vec y1 = impl_->solve_reduced(tau_ * r2 + shifted);
  Vec y(2 * n);
  y.head(n) = y1;
  y.tail(n) = (lambda_ * y1 - r1) / tau_;
  return y;
}

Vec solve_frequency_block(cd lambda, double tau, const DiscreteSystem& sys, const Vec& v1, BlockSolver kind) {
  return FrequencyBlock(lambda, tau, sys, kind).solve(v1);
}

OmegaPreconditioner::OmegaPreconditioner(const GmmMatrices& gmm, const DiscreteSystem& sys, cd omega,
                                         BlockSolver kind)
    : oc_(build_omega_circulant(gmm, omega)), sys_(sys), tau_(gmm.tau), kind_(resolve_block_solver(sys, kind)) {
  auto Q = std::make_shared<const SpMat>(sys.Q);
  Vec symP, symQ;
  if (kind_ == BlockSolver::Circulant) {
    symP = circulant_symbols(sys.P);
    symQ = circulant_symbols(sys.Q);
  }
  blocks_.reserve(static_cast<size_t>(oc_.N));
  for (int k = 0; k < oc_.N; ++k) {
    blocks_.emplace_back(oc_.lambda[k], tau_, sys_, kind_, Q, &symP, &symQ);
    if (blocks_.back().perturbed())
      warnings_.push_back("frequency block " + std::to_string(k) + " was singular; lambda perturbed by 1e-14(1+|lambda|)");
  }
}

Vec OmegaPreconditioner::apply(const Vec& r) const {
  const int N = oc_.N;
  const int b = 2 * sys_.n();
  if (r.size() != static_cast<Eigen::Index>(N) * b) throw DimensionMismatch("preconditioner operand has wrong size");
  // Row i of buf holds component i across the N time blocks.
  std::vector<cd> buf(static_cast<size_t>(N) * static_cast<size_t>(b));
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < b; ++i)
      buf[static_cast<size_t>(i) * N + j] = oc_.gamma[j] * r[static_cast<Eigen::Index>(j) * b + i];
#pragma omp parallel for schedule(static)
  for (int i = 0; i < b; ++i) fft_inplace(buf.data() + static_cast<size_t>(i) * N, N, -1);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < N; ++k) {
    Vec col(b);
    for (int i = 0; i < b; ++i) col[i] = buf[static_cast<size_t>(i) * N + k];
    Vec y = blocks_[static_cast<size_t>(k)].solve(col);
    for (int i = 0; i < b; ++i) buf[static_cast<size_t>(i) * N + k] = y[i];
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < b; ++i) fft_inplace(buf.data() + static_cast<size_t>(i) * N, N, +1);
  Vec z(r.size());
  for (int j = 0; j < N; ++j) {
    const cd s = 1.0 / (double(N) * oc_.gamma[j]);
    for (int i = 0; i < b; ++i) z[static_cast<Eigen::Index>(j) * b + i] = s * buf[static_cast<size_t>(i) * N + j];
  }
  return z;
}

SpMat materialize_preconditioner(const GmmMatrices& gmm, const DiscreteSystem& sys, cd omega) {
  const int N = gmm.N;
  const int b = 2 * sys.n();
  Mat C = omega_circulant_matrix(N, omega);
  std::vector<Eigen::Triplet<cd>> t;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (C(i, j) != cd(0.0))
        for (int q = 0; q < b; ++q) t.emplace_back(i * b + q, j * b + q, C(i, j));
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < sys.D.outerSize(); ++k)
      for (SpMat::InnerIterator it(sys.D, k); it; ++it)
        t.emplace_back(j * b + it.row(), j * b + it.col(), -gmm.tau * it.value());
  SpMat M(N * b, N * b);
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

SolveReport gmres(const LinearOperator& A, const LinearOperator& Minv, const Vec& b, const GmresOptions& opt) {
  if (!(opt.tol > 0.0)) throw ConfigError("GMRES tolerance must be positive");
  const auto start = std::chrono::steady_clock::now();
  auto precond = [&](const Vec& v) { return Minv ? Minv(v) : v; };
  SolveReport rep;
  const Eigen::Index n = b.size();
  rep.solution = Vec::Zero(n);
  const double bnorm = b.norm();
  auto finish = [&]() {
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.true_relative_residual = bnorm > 0 ? (b - A(rep.solution)).norm() / bnorm : 0.0;
    return rep;
  };
  if (bnorm == 0.0) {
    rep.residual_history.push_back(0.0);
    rep.converged = true;
    return finish();
  }
  int m = opt.restart;
  if (m <= 0) m = n <= 200000 ? opt.max_iter : 50;
  m = std::max(1, std::min(m, opt.max_iter));

  Vec r = precond(b);
  const double r0 = r.norm();
  rep.residual_history.push_back(1.0);
  double beta = r0;
  while (true) {
    std::vector<Vec> V;
    V.reserve(static_cast<size_t>(m + 1));
    V.push_back(r / beta);
    Mat H = Mat::Zero(m + 1, m);
    std::vector<cd> cs(static_cast<size_t>(m)), sn(static_cast<size_t>(m));
    Vec g = Vec::Zero(m + 1);
    g[0] = beta;
    int j = 0;
    bool done = false;
    for (; j < m; ++j) {
      Vec w = precond(A(V[static_cast<size_t>(j)]));
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V[static_cast<size_t>(i)].dot(w);
        w -= H(i, j) * V[static_cast<size_t>(i)];
      }
      const double hn = w.norm();
      H(j + 1, j) = hn;
      for (int i = 0; i < j; ++i) {
        const cd a = H(i, j), c = H(i + 1, j);
        H(i, j) = cs[static_cast<size_t>(i)] * a + sn[static_cast<size_t>(i)] * c;
        H(i + 1, j) = -std::conj(sn[static_cast<size_t>(i)]) * a + cs[static_cast<size_t>(i)] * c;
      }
      const cd a = H(j, j), c = H(j + 1, j);
      const double den = std::sqrt(std::norm(a) + std::norm(c));
      if (std::abs(a) == 0.0) {
        cs[static_cast<size_t>(j)] = 0.0;
        sn[static_cast<size_t>(j)] = 1.0;
      } else {
        cs[static_cast<size_t>(j)] = std::abs(a) / den;
        sn[static_cast<size_t>(j)] = (a / std::abs(a)) * std::conj(c) / den;
      }
      H(j, j) = cs[static_cast<size_t>(j)] * a + sn[static_cast<size_t>(j)] * c;
      H(j + 1, j) = 0.0;
      g[j + 1] = -std::conj(sn[static_cast<size_t>(j)]) * g[j];
      g[j] = cs[static_cast<size_t>(j)] * g[j];
      ++rep.iterations;
      const double rel = std::abs(g[j + 1]) / r0;
      rep.residual_history.push_back(rel);
      if (rel <= opt.tol) {
        rep.converged = true;
        done = true;
      }
      if (rep.iterations >= opt.max_iter) done = true;
      if (done || hn == 0.0) {
        ++j;
        break;
      }
      V.push_back(w / hn);
    }
    Vec y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) rep.solution += y[i] * V[static_cast<size_t>(i)];
    if (done) break;
    r = precond(b - A(rep.solution));
    beta = r.norm();
    if (beta / r0 <= opt.tol) {
      rep.converged = true;
      break;
    }
  }
  return finish();
}

SolveReport gmres_solve(const AllAtOnceSystem& system, const OmegaPreconditioner* precond,
                        const GmresOptions& opt) {
  LinearOperator A = [&system](const Vec& x) { return system.apply(x); };
  LinearOperator M;
  if (precond != nullptr) M = [precond](const Vec& x) { return precond->apply(x); };
  return gmres(A, M, system.rhs, opt);
}

namespace {

// Eigenvalues of P and Q in the order the transform produces its modes.
struct SharedBasis {
  bool periodic = false;
  Vec p, q;
};

SharedBasis shared_basis(const DiscreteSystem& sys) {
  SharedBasis b;
  const int n = sys.n();
  if (sys.grid.boundary == Boundary::Periodic) {
    b.periodic = true;
    b.p = circulant_symbols(sys.P);
    b.q = circulant_symbols(sys.Q);
    return b;
  }
  if (!tridiagonal(sys.P) || !diagonal_only(sys.Q))
    throw ConfigError("solver.method: the direct solve needs tridiagonal P and diagonal Q");
  const cd a = sys.P.coeff(0, 0), off = n > 1 ? sys.P.coeff(1, 0) : cd(0.0), q = sys.Q.coeff(0, 0);
  for (int i = 0; i < n; ++i) {
    bool toeplitz = sys.P.coeff(i, i) == a && sys.Q.coeff(i, i) == q;
    if (i + 1 < n) toeplitz = toeplitz && sys.P.coeff(i + 1, i) == off && sys.P.coeff(i, i + 1) == off;
    if (!toeplitz) throw ConfigError("solver.method: the direct solve needs symmetric Toeplitz P and scalar Q");
  }
  b.p.resize(n);
  b.q = Vec::Constant(n, q);
  for (int k = 0; k < n; ++k) b.p[k] = a + 2.0 * off * std::cos(kPi * (k + 1) / (n + 1));
  return b;
}

void to_modes(cd* x, int n, bool periodic) {
  if (periodic) fft_inplace(x, n, -1);
  else dst1_inplace(x, n);
}

void from_modes(cd* x, int n, bool periodic) {
  if (periodic) {
    fft_inplace(x, n, +1);
    for (int i = 0; i < n; ++i) x[i] /= double(n);
  } else {
    dst1_inplace(x, n);
    for (int i = 0; i < n; ++i) x[i] /= 2.0 * (n + 1);
  }
}

int time_bandwidth(const SpMat& A) {
  int bw = 0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      if (it.value() != cd(0.0)) bw = std::max(bw, static_cast<int>(std::abs(it.row() - it.col())));
  return bw;
}

}  // namespace

SolveReport direct_solve(const AllAtOnceSystem& system) {
  const auto start = std::chrono::steady_clock::now();
  const DiscreteSystem& sys = system.sys;
  const int n = sys.n(), N = system.gmm.N;
  const double tau = system.gmm.tau;
  const SharedBasis basis = shared_basis(sys);
  const SpMat& A = system.gmm.A;
  const SpMat& B = system.gmm.B;
  // Unknowns of one mode interleave (u_t, v_t), so the band widens to 2 bw + 1.
  const int bw = 2 * std::max(time_bandwidth(system.gmm.A), time_bandwidth(system.gmm.B)) + 1;
  const int size = 2 * N, ldab = 3 * bw + 1;

  Vec x = system.rhs;
  for (int t = 0; t < N; ++t) {
    to_modes(x.data() + static_cast<Eigen::Index>(t) * 2 * n, n, basis.periodic);
    to_modes(x.data() + static_cast<Eigen::Index>(t) * 2 * n + n, n, basis.periodic);
  }
  int failed = -1;
#pragma omp parallel
  {
    std::vector<cd> ab(static_cast<size_t>(ldab) * size), r(static_cast<size_t>(size));
    std::vector<lapack_int> ipiv(static_cast<size_t>(size));
#pragma omp for schedule(static)
    for (int k = 0; k < n; ++k) {
      std::fill(ab.begin(), ab.end(), cd(0.0));
      // Band storage: entry (i, j) at ab[(2 bw + i - j) + j * ldab].
      auto put = [&](int i, int j, cd v) { ab[static_cast<size_t>(2 * bw + i - j + j * ldab)] += v; };
      for (int t = 0; t < N; ++t)
        for (int s = std::max(0, t - bw); s <= std::min(N - 1, t + bw); ++s) {
          const cd at = A.coeff(t, s), bt = tau * B.coeff(t, s);
          if (at == cd(0.0) && bt == cd(0.0)) continue;
          // A I2 - tau B D_k with D_k = [[0, 1], [p_k, q_k]].
          put(2 * t, 2 * s, at);
          put(2 * t, 2 * s + 1, -bt);
          put(2 * t + 1, 2 * s, -bt * basis.p[k]);
          put(2 * t + 1, 2 * s + 1, at - bt * basis.q[k]);
        }
      for (int t = 0; t < N; ++t) {
        r[static_cast<size_t>(2 * t)] = x[static_cast<Eigen::Index>(t) * 2 * n + k];
        r[static_cast<size_t>(2 * t + 1)] = x[static_cast<Eigen::Index>(t) * 2 * n + n + k];
      }
      const lapack_int info = LAPACKE_zgbsv(LAPACK_COL_MAJOR, size, bw, bw, 1,
                                            reinterpret_cast<lapack_complex_double*>(ab.data()), ldab, ipiv.data(),
                                            reinterpret_cast<lapack_complex_double*>(r.data()), size);
      if (info != 0) {
#pragma omp critical
        failed = k;
        continue;
      }
      for (int t = 0; t < N; ++t) {
        x[static_cast<Eigen::Index>(t) * 2 * n + k] = r[static_cast<size_t>(2 * t)];
        x[static_cast<Eigen::Index>(t) * 2 * n + n + k] = r[static_cast<size_t>(2 * t + 1)];
      }
    }
  }
  if (failed >= 0) throw SingularBlock("direct solve: mode " + std::to_string(failed) + " is singular");
  for (int t = 0; t < N; ++t) {
    from_modes(x.data() + static_cast<Eigen::Index>(t) * 2 * n, n, basis.periodic);
    from_modes(x.data() + static_cast<Eigen::Index>(t) * 2 * n + n, n, basis.periodic);
  }
  SolveReport rep;
  rep.solution = std::move(x);
  rep.converged = true;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double bnorm = system.rhs.norm();
  rep.true_relative_residual = bnorm > 0 ? (system.rhs - system.apply(rep.solution)).norm() / bnorm : 0.0;
  return rep;
}

}  // namespace halfbvm
