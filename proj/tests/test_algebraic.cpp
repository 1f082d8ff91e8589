#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "qtbasis/study.hpp"

using namespace qtb;

namespace {

const AcousticParams g_params = preset_params();

GradedPoly2 case1_jet(Point c, int d) {
  return CoeffProvider::case1().taylor(c, d - 2, g_params);
}

Vec random_vec(Eigen::Index n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(u(rng), u(rng));
  return v;
}

}  // namespace

TEST_CASE("operator matrix dimensions at d = 8") {
  const GradedPoly2 jet = case1_jet({0.4, 0.6}, 8);
  const OpMatrix qf = assemble_QF(8, jet, g_params);
  CHECK(qf.rows == 100);
  CHECK(qf.cols == 117);
  const OpMatrix qs = assemble_QS(8, jet, g_params);
  CHECK(qs.rows == 28);
  CHECK(qs.cols == 45);
  const OpMatrix g = assemble_G(8, g_params);
  CHECK(g.rows == 72);
  CHECK(g.cols == 45);
}

TEST_CASE("hand-checked stencil columns") {
  const int d = 4;
  // constant-velocity element maps to -i omega rho times itself only
  GradedPoly2 zero_jet(d - 2);
  const OpMatrix qf = assemble_QF(d, zero_jet, g_params);
  const SystemNumbering dom(d, d - 1), cod(d - 2, d - 1);
  const Mat A = qf.to_dense();
  const Eigen::Index col = dom.index(0, 2, 0);
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    if (r == cod.index(0, 2, 0))
      CHECK(std::abs(A(r, col) + g_params.i_omega_rho()) < 1e-15);
    else
      CHECK(A(r, col) == cplx{});
  }

  // Q^S with kappa = 0 sends Y^2 to its laplacian, the constant 2
  const OpMatrix qs = assemble_QS(d, zero_jet, g_params);
  const Mat S = qs.to_dense();
  const Eigen::Index c2 = scalar_index(2, 0);
  for (Eigen::Index r = 0; r < S.rows(); ++r)
    CHECK(S(r, c2) == (r == scalar_index(0, 0) ? cplx(2.0, 0.0) : cplx{}));
}

TEST_CASE("kernel basis on trivial matrices") {
  OpMatrix eye;
  eye.rows = eye.cols = 3;
  for (int i = 0; i < 3; ++i) eye.push(i, i, 1.0);
  CHECK(kernel_basis(eye).empty());

  OpMatrix row;
  row.rows = 1;
  row.cols = 2;
  row.push(0, 0, 1.0);
  const auto k = kernel_basis(row);
  REQUIRE(k.size() == 1);
  CHECK(std::abs(k[0](0)) < 1e-15);
  CHECK(std::abs(std::abs(k[0](1)) - 1.0) < 1e-15);

  OpMatrix zero;
  zero.rows = 2;
  zero.cols = 4;
  const auto kz = kernel_basis(zero);
  REQUIRE(kz.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(kz[static_cast<std::size_t>(i)](i) == cplx(1.0, 0.0));
}

TEST_CASE("kernel dimensions are 2d+1 on case 1") {
  const Point c{0.55, 0.85};
  for (int d = 2; d <= 10; ++d) {
    const GradedPoly2 jet = case1_jet(c, d);
    CHECK(kernel_basis(assemble_QF(d, jet, g_params)).size() ==
          static_cast<std::size_t>(2 * d + 1));
    CHECK(kernel_basis(assemble_QS(d, jet, g_params)).size() ==
          static_cast<std::size_t>(2 * d + 1));
  }
}

TEST_CASE("matrix apply equals direct operator evaluation", "[property]") {
  std::mt19937 rng(11);
  const Point c{0.25, 0.45};
  for (int d = 2; d <= 6; ++d) {
    const GradedPoly2 jet = case1_jet(c, d);
    const OpMatrix qf = assemble_QF(d, jet, g_params);
    const SystemNumbering cod(d - 2, d - 1);
    const cplx iwr = g_params.i_omega_rho();
    const cplx gscale = cplx(0.0, 1.0) / (g_params.omega * g_params.rho);
    for (int trial = 0; trial < 20; ++trial) {
      const Vec x = random_vec(qf.cols, rng);
      const Vec y = qf.apply(x);
      CHECK((qf.to_dense() * x - y).norm() < 1e-13 * x.norm());

      const QTFunction f = unpack_system_vector(d, x);
      auto [dx, dy] = grad(f.p);
      const GradedPoly2 dv = divergence(f.vx, f.vy);
      const GradedPoly2 kp = mul_truncated(jet, f.p, d - 2);
      double err = 0.0;
      for (int k = 0; k <= d - 1; ++k)
        for (int l = 0; l <= k; ++l) {
          err = std::max(err, std::abs(y(cod.index(k, 2, l)) -
                                       (dx.coeff(k, l) - iwr * f.vx.coeff(k, l))));
          err = std::max(err, std::abs(y(cod.index(k, 3, l)) -
                                       (dy.coeff(k, l) - iwr * f.vy.coeff(k, l))));
        }
      for (int k = 0; k <= d - 2; ++k)
        for (int l = 0; l <= k; ++l)
          err = std::max(err, std::abs(y(cod.index(k, 1, l)) -
                                       (dv.coeff(k, l) - gscale * kp.coeff(k, l))));
      CHECK(err < 1e-13 * std::max(1.0, x.norm()));
    }
  }
}

TEST_CASE("G matrix matches the gradient scaling") {
  std::mt19937 rng(5);
  for (int d : {2, 4, 7}) {
    const OpMatrix g = assemble_G(d, g_params);
    const SystemNumbering cod(-1, d - 1);
    const Vec x = random_vec(g.cols, rng);
    const GradedPoly2 p = unpack_scalar_vector(d, x);
    const Vec y = g.apply(x);
    auto [vx, vy] = velocity_from_pressure(p, g_params);
    for (int k = 0; k <= d - 1; ++k)
      for (int l = 0; l <= k; ++l) {
        CHECK(std::abs(y(cod.index(k, 2, l)) - vx.coeff(k, l)) < 1e-13);
        CHECK(std::abs(y(cod.index(k, 3, l)) - vy.coeff(k, l)) < 1e-13);
      }
  }
}

TEST_CASE("kernel vectors are orthonormal") {
  const GradedPoly2 jet = case1_jet({0.15, 0.65}, 6);
  const auto ker = kernel_basis(assemble_QF(6, jet, g_params));
  REQUIRE(ker.size() == 13);
  for (std::size_t a = 0; a < ker.size(); ++a)
    for (std::size_t b = 0; b < ker.size(); ++b) {
      const cplx dot = ker[a].adjoint() * ker[b];
      CHECK(std::abs(dot - (a == b ? cplx(1.0, 0.0) : cplx{})) < 1e-12);
    }
}

TEST_CASE("algebraic bases satisfy the quasi-Trefftz conditions") {
  const Point c{0.35, 0.75};
  for (int d : {2, 5, 10}) {
    const GradedPoly2 jet = case1_jet(c, d);
    const auto b1 = construct_basis_algebraic(Method::Alge1, d, jet, g_params, c);
    REQUIRE(b1.size() == static_cast<std::size_t>(2 * d + 1));
    CHECK(check_identities(b1, g_params) < (d <= 2 ? 1e-13 : 1e-12));

    const auto b2 = construct_basis_algebraic(Method::Alge2, d, jet, g_params, c);
    REQUIRE(b2.size() == static_cast<std::size_t>(2 * d + 1));
    CHECK(check_identities(b2, g_params) == 0.0);

    const cplx gscale = cplx(0.0, 1.0) / (g_params.omega * g_params.rho);
    for (const auto& basis : {b1, b2})
      for (const auto& f : basis) {
        const GradedPoly2 dv = divergence(f.vx, f.vy);
        const GradedPoly2 kp = mul_truncated(jet, f.p, d - 2);
        for (int k = 0; k <= d - 2; ++k)
          for (int l = 0; l <= k; ++l)
            CHECK(std::abs(dv.coeff(k, l) - gscale * kp.coeff(k, l)) < 1e-11);
      }
  }
}

TEST_CASE("rank-deficiency reporting") {
  const GradedPoly2 jet = case1_jet({0.5, 0.5}, 3);
  CHECK_THROWS_AS(construct_basis_algebraic(Method::Alge1, 3, jet, g_params,
                                            {0.5, 0.5}, 1.0),
                  std::runtime_error);
  CHECK_THROWS_AS(construct_basis_algebraic(Method::Expl1, 3, jet, g_params),
                  std::invalid_argument);
}

TEST_CASE("pack and unpack are inverse") {
  std::mt19937 rng(8);
  const int d = 5;
  const SystemNumbering dom(d, d - 1);
  const Vec x = random_vec(dom.size(), rng);
  CHECK((pack_system_vector(unpack_system_vector(d, x)) - x).norm() == 0.0);
  const Vec s = random_vec(scalar_dim(d), rng);
  CHECK((pack_scalar_vector(d, unpack_scalar_vector(d, s)) - s).norm() == 0.0);
}

TEST_CASE("sparsity and triplet exports") {
  const GradedPoly2 jet = case1_jet({0.5, 0.5}, 4);
  const OpMatrix qs = assemble_QS(4, jet, g_params);
  const std::string pbm = sparsity_pbm(qs);
  CHECK(pbm.rfind("P1\n15 6\n", 0) == 0);
  CHECK(std::count(pbm.begin(), pbm.end(), '\n') == 2 + qs.rows);
  const std::string trip = triplet_dump(qs);
  CHECK(std::count(trip.begin(), trip.end(), '\n') ==
        static_cast<std::ptrdiff_t>(qs.entries.size()));
}
