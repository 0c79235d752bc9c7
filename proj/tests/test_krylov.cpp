#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <cmath>
#include <random>

#include <omp.h>

#include "halfbvm/krylov.hpp"
#include "halfbvm/numerics.hpp"

using namespace halfbvm;

namespace {

Vec random_vec(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = cd(nd(rng), nd(rng));
  return x;
}

DiscreteSystem with_blocks(const Mat& P, const Mat& Q) {
  DiscreteSystem s;
  const int n = static_cast<int>(P.rows());
  s.grid.m = n + 1;
  s.grid.L = n + 1.0;
  s.grid.h = 1.0;
  for (int i = 1; i <= n; ++i) s.grid.nodes.push_back(i);
  s.P = P.sparseView();
  s.Q = Q.sparseView();
  Mat D = Mat::Zero(2 * n, 2 * n);
  D.topRightCorner(n, n).setIdentity();
  D.bottomLeftCorner(n, n) = P;
  D.bottomRightCorner(n, n) = Q;
  s.D = D.sparseView();
  return s;
}

AllAtOnceSystem zero_data_system(int N, double T, const DiscreteSystem& sys) {
  return assemble_all_at_once(build_gmm(N, T), sys, SourceSampler{}, {Vec::Zero(sys.n()), Vec::Zero(sys.n())});
}

DiscreteSystem half_diffusion(int m, double eps = 0.1) {
  return assemble_discrete_system(make_grid(20.0, m, Boundary::DirichletHomogeneous, -10.0), eps, {});
}

DiscreteSystem advection(int m) {
  return assemble_discrete_system(make_grid(20.0, m, Boundary::Periodic, -10.0), 0.01,
                                  {OperatorVariant::Advection, 0.2});
}

}  // namespace

TEST_CASE("omega-circulant reconstruction") {
  for (int N : {2, 3, 8, 17, 64}) {
    for (double th : {kPi, kPi / 3, -2.0, 0.0}) {
      const cd w = std::polar(1.0, th);
      OmegaCirculant oc = build_omega_circulant(build_gmm(N, 1.0), w);
      Mat C = omega_circulant_matrix(N, w);
      CHECK((reconstruct(oc) - C).norm() <= 1e-12 * std::max(1.0, C.norm()));
    }
  }
  CHECK_THROWS_AS(build_omega_circulant(build_gmm(4, 1.0), 1.1), ConfigError);
}

TEST_CASE("two-step omega-circulant eigenvalues by hand") {
  // omega = -1: [[0, 1], [-1, 0]] with eigenvalues +-i.
  Mat C = omega_circulant_matrix(2, -1.0);
  Mat expect(2, 2);
  expect << 0, 1, -1, 0;
  CHECK((C - expect).norm() < 1e-15);
  OmegaCirculant oc = build_omega_circulant(build_gmm(2, 1.0), -1.0);
  std::vector<cd> l{oc.lambda[0], oc.lambda[1]};
  CHECK(((std::abs(l[0] - kI) < 1e-14 && std::abs(l[1] + kI) < 1e-14) ||
         (std::abs(l[0] + kI) < 1e-14 && std::abs(l[1] - kI) < 1e-14)));
}

TEST_CASE("omega = 1 gives the plain circulant") {
  const int N = 8;
  OmegaCirculant oc = build_omega_circulant(build_gmm(N, 1.0), 1.0);
  for (int j = 0; j < N; ++j) CHECK(std::abs(oc.gamma[j] - 1.0) < 1e-15);
  Vec c = Vec::Zero(N);
  c[1] = -0.5;
  c[N - 1] = 0.5;
  fft_inplace(c, -1);
  CHECK((oc.lambda - c).norm() < 1e-15);
}

TEST_CASE("omega(A) differs from A in the first and last rows only") {
  const int N = 8;
  Mat A = dense(build_gmm(N, 1.0).A);
  Mat C = omega_circulant_matrix(N, -1.0);
  Mat diff = C - A;
  for (int i = 1; i < N - 1; ++i) CHECK(diff.row(i).norm() == 0.0);
  Eigen::FullPivLU<Mat> lu(diff);
  CHECK(lu.rank() <= 2);
}

TEST_CASE("frequency block with vanishing P and Q divides by lambda") {
  const int n = 3;
  DiscreteSystem sys = with_blocks(Mat::Zero(n, n), Mat::Zero(n, n));
  const cd lam(0.3, -1.2);
  const double tau = 0.25;
  Vec r = random_vec(2 * n, 1);
  Vec y = solve_frequency_block(lam, tau, sys, r, BlockSolver::Dense);
  Vec y2 = r.tail(n) / lam;
  Vec y1 = (r.head(n) + tau * y2) / lam;
  CHECK((y.head(n) - y1).norm() < 1e-14);
  CHECK((y.tail(n) - y2).norm() < 1e-14);
}

TEST_CASE("frequency block solvers satisfy the full block equation") {
  const double tau = 0.05;
  const cd lam(-0.2, 0.9);
  struct Case {
    DiscreteSystem sys;
    std::vector<BlockSolver> kinds;
  };
  std::vector<Case> cases;
  cases.push_back({half_diffusion(12), {BlockSolver::Tridiagonal, BlockSolver::Dense}});
  cases.push_back({assemble_discrete_system(make_grid(5.0, 10, Boundary::DirichletHomogeneous), cd(0.0, -0.1),
                                            {OperatorVariant::Scalar, cd(0.0, -0.5)}),
                   {BlockSolver::Tridiagonal, BlockSolver::Dense}});
  cases.push_back({advection(16), {BlockSolver::Circulant, BlockSolver::Dense}});
  cases.push_back({with_blocks(Mat::Random(2, 2), Mat::Random(2, 2)), {BlockSolver::Dense}});
  for (const Case& c : cases) {
    const int n = c.sys.n();
    Vec r = random_vec(2 * n, 5);
    Mat block = lam * Mat::Identity(2 * n, 2 * n) - tau * dense(c.sys.D);
    Vec ref = block.fullPivLu().solve(r);
    for (BlockSolver k : c.kinds) {
      Vec y = solve_frequency_block(lam, tau, c.sys, r, k);
      CHECK((block * y - r).norm() <= 1e-12 * r.norm());
      CHECK((y - ref).norm() <= 1e-12 * ref.norm());
    }
  }
}

TEST_CASE("block solver selection") {
  CHECK(resolve_block_solver(half_diffusion(8), BlockSolver::Auto) == BlockSolver::Tridiagonal);
  CHECK(resolve_block_solver(advection(8), BlockSolver::Auto) == BlockSolver::Circulant);
  CHECK(resolve_block_solver(with_blocks(Mat::Random(3, 3), Mat::Random(3, 3)), BlockSolver::Auto) ==
        BlockSolver::Dense);
  CHECK(resolve_block_solver(half_diffusion(8), BlockSolver::Dense) == BlockSolver::Dense);
}

TEST_CASE("singular frequency blocks") {
  // 1x1 reduced matrix lambda^2 - tau^2 p vanishes at lambda = 2, p = 4, tau = 1.
  DiscreteSystem sys = with_blocks(Mat::Constant(1, 1, 4.0), Mat::Zero(1, 1));
  FrequencyBlock fb(2.0, 1.0, sys, BlockSolver::Dense);
  CHECK(fb.perturbed());
  CHECK(fb.lambda() != cd(2.0));
  // The periodic constant mode at lambda = 0 stays singular after the perturbation.
  DiscreteSystem per = assemble_discrete_system(make_grid(4.0, 8, Boundary::Periodic), 1.0, {});
  CHECK_THROWS_AS(FrequencyBlock(0.0, 0.5, per, BlockSolver::Circulant), SingularBlock);
  CHECK_THROWS_AS(fb.solve(Vec::Zero(5)), DimensionMismatch);
}

TEST_CASE("preconditioner application equals the inverse of its materialized form") {
  struct Case {
    DiscreteSystem sys;
    int N;
  };
  for (const Case& c : {Case{half_diffusion(3), 4}, Case{half_diffusion(9), 8}, Case{advection(8), 6},
                        Case{with_blocks(Mat::Random(3, 3), Mat::Random(3, 3)), 5}}) {
    GmmMatrices g = build_gmm(c.N, 1.0);
    for (double th : {kPi, 1.0}) {
      const cd w = std::polar(1.0, th);
      OmegaPreconditioner pre(g, c.sys, w);
      CHECK(pre.warnings().empty());
      Mat Pm = dense(materialize_preconditioner(g, c.sys, w));
      Vec x = random_vec(Pm.rows(), 9);
      Vec r = Pm * x;
      CHECK((pre.apply(r) - x).norm() <= 1e-10 * x.norm());
      Vec r2 = random_vec(Pm.rows(), 10);
      Vec ref = Pm.fullPivLu().solve(r2);
      CHECK((pre.apply(r2) - ref).norm() <= 1e-10 * ref.norm());
    }
  }
}

TEST_CASE("preconditioner result does not depend on the thread count") {
  DiscreteSystem sys = half_diffusion(20);
  OmegaPreconditioner pre(build_gmm(16, 2.0), sys);
  Vec r = random_vec(16 * 2 * sys.n(), 4);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  Vec a = pre.apply(r);
  omp_set_num_threads(3);
  Vec b = pre.apply(r);
  omp_set_num_threads(saved);
  CHECK((a - b).norm() == 0.0);
}

TEST_CASE("preconditioned spectrum clusters at one") {
  // At most 2 m k outliers with m = 2n (the doubled dimension) and k = 2.
  struct Case {
    DiscreteSystem sys;
    int N;
    double T;
  };
  for (const Case& c : {Case{half_diffusion(9), 16, 2.0}, Case{half_diffusion(17), 32, 20.0},
                        Case{advection(8), 32, 20.0}}) {
    AllAtOnceSystem s = zero_data_system(c.N, c.T, c.sys);
    Mat M = dense(materialize(s));
    Mat Pm = dense(materialize_preconditioner(s.gmm, c.sys, -1.0));
    Eigen::ComplexEigenSolver<Mat> es(Pm.fullPivLu().solve(M), false);
    int outliers = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()[i] - 1.0) > 1e-8) ++outliers;
    CHECK(outliers <= 2 * (2 * c.sys.n()) * 2);
  }
}

TEST_CASE("GMRES trivial cases") {
  GmresOptions opt;
  LinearOperator I = [](const Vec& x) { return x; };
  SolveReport z = gmres(I, nullptr, Vec::Zero(10), opt);
  CHECK(z.iterations == 0);
  CHECK(z.converged);
  CHECK(z.solution.norm() == 0.0);
  CHECK(!z.residual_history.empty());

  Vec b = random_vec(10, 2);
  SolveReport one = gmres(I, nullptr, b, opt);
  CHECK(one.iterations == 1);
  CHECK(one.converged);
  CHECK((one.solution - b).norm() < 1e-14 * b.norm());

  opt.tol = 0.0;
  CHECK_THROWS_AS(gmres(I, nullptr, b, opt), ConfigError);
}

TEST_CASE("GMRES reports non-convergence without throwing") {
  DiscreteSystem sys = half_diffusion(40);
  AllAtOnceSystem s = assemble_all_at_once(build_gmm(32, 20.0), sys, SourceSampler{},
                                           {random_vec(sys.n(), 1), random_vec(sys.n(), 2)});
  GmresOptions opt;
  opt.max_iter = 3;
  SolveReport rep = gmres_solve(s, nullptr, opt);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 3);
  CHECK(rep.residual_history.size() == 4);
}

TEST_CASE("preconditioned and plain GMRES agree and the preconditioner saves iterations") {
  DiscreteSystem sys = half_diffusion(40);
  AllAtOnceSystem s = assemble_all_at_once(build_gmm(40, 4.0), sys, SourceSampler{},
                                           {random_vec(sys.n(), 1), random_vec(sys.n(), 2)});
  GmresOptions opt;
  opt.tol = 1e-10;
  opt.max_iter = 2000;
  OmegaPreconditioner pre(s.gmm, sys);
  SolveReport a = gmres_solve(s, &pre, opt);
  SolveReport b = gmres_solve(s, nullptr, opt);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(a.residual_history.back() <= opt.tol);
  CHECK(a.iterations < b.iterations);
  CHECK((a.solution - b.solution).norm() <= 10 * opt.tol * a.solution.norm());
  Vec direct = Eigen::SparseLU<SpMat>(materialize(s)).solve(s.rhs);
  CHECK((a.solution - direct).norm() <= 1e-8 * direct.norm());
  CHECK((b.solution - direct).norm() <= 1e-8 * direct.norm());
  // Restarted GMRES converges to the same solution.
  opt.restart = 20;
  SolveReport c = gmres_solve(s, &pre, opt);
  REQUIRE(c.converged);
  CHECK((c.solution - direct).norm() <= 1e-8 * direct.norm());
}

TEST_CASE("direct solve matches GMRES") {
  struct Case {
    DiscreteSystem sys;
    int N;
  };
  Grid dir = make_grid(20.0, 24, Boundary::DirichletHomogeneous, -10.0);
  for (const Case& c : {Case{half_diffusion(24), 16}, Case{advection(16), 20},
                        Case{assemble_discrete_system(dir, 0.1, {OperatorVariant::Scalar, 0.02}), 12},
                        Case{assemble_discrete_system(dir, cd(0.0, -0.1), {OperatorVariant::Scalar, cd(0.0, -0.5)}), 16}}) {
    const int n = c.sys.n();
    AllAtOnceSystem s =
        assemble_all_at_once(build_gmm(c.N, 2.0), c.sys, SourceSampler{}, {random_vec(n, 1), random_vec(n, 2)});
    SolveReport d = direct_solve(s);
    CHECK(d.converged);
    CHECK(d.iterations == 0);
    CHECK(d.true_relative_residual < 1e-12);
    GmresOptions opt;
    opt.tol = 1e-13;
    OmegaPreconditioner pre(s.gmm, c.sys);
    SolveReport g = gmres_solve(s, &pre, opt);
    REQUIRE(g.converged);
    CHECK((d.solution - g.solution).norm() <= 1e-10 * g.solution.norm());
  }
}

TEST_CASE("direct solve needs a shared fast eigenbasis") {
  Mat P = Mat::Random(5, 5), Q = Mat::Zero(5, 5);
  AllAtOnceSystem s = zero_data_system(4, 1.0, with_blocks(P, Q));
  s.rhs = random_vec(s.size(), 3);
  CHECK_THROWS_AS(direct_solve(s), ConfigError);
}
