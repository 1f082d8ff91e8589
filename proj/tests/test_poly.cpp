#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "qtbasis/poly.hpp"

using namespace qtb;

namespace {

GradedPoly2 random_poly(int degree, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GradedPoly2 p(degree);
  for (int k = 0; k <= degree; ++k)
    for (int l = 0; l <= k; ++l) p.at(k, l) = cplx(u(rng), u(rng));
  return p;
}

/// Independent oracle for one homogeneous component of a product: full
/// naive multiply, then read off degree M.
std::vector<cplx> product_component_oracle(const GradedPoly2& a, const GradedPoly2& b,
                                           int M) {
  std::vector<cplx> out(static_cast<std::size_t>(M) + 1, cplx{});
  for (int ka = 0; ka <= a.degree(); ++ka)
    for (int la = 0; la <= ka; ++la)
      for (int kb = 0; kb <= b.degree(); ++kb)
        for (int lb = 0; lb <= kb; ++lb)
          if (ka + kb == M) out[static_cast<std::size_t>(la + lb)] +=
              a.coeff(ka, la) * b.coeff(kb, lb);
  return out;
}

}  // namespace

TEST_CASE("zero polynomial and storage basics") {
  GradedPoly2 z;
  CHECK(z.degree() == -1);
  CHECK(z.is_zero());
  CHECK(z.coeff(0, 0) == cplx{});
  CHECK(z.coeff(3, 1) == cplx{});
  CHECK_THROWS_AS(z.at(0, 0), std::out_of_range);

  GradedPoly2 p(2);
  CHECK(p.degree() == 2);
  p.at(2, 1) = cplx(3.0, -1.0);
  CHECK(p.coeff(2, 1) == cplx(3.0, -1.0));
  CHECK(p.coeff(2, 5) == cplx{});
  CHECK(p.coeff(7, 0) == cplx{});
  CHECK_THROWS_AS(p.at(2, 3), std::out_of_range);
  CHECK(p.component(2).size() == 3);
  CHECK(p.max_abs_coeff() == Catch::Approx(std::sqrt(10.0)));
}

TEST_CASE("evaluation of X^2 + XY at (1,1) equals 2") {
  GradedPoly2 p(2);
  p.at(2, 2) = 1.0;  // X^2
  p.at(2, 1) = 1.0;  // X Y
  CHECK(eval_local(p, 1.0, 1.0) == cplx(2.0, 0.0));
  CHECK(eval(p, {1.5, 2.5}, {0.5, 1.5}) == cplx(2.0, 0.0));
  CHECK(eval_local(p, 2.0, -1.0) == cplx(2.0, 0.0));
}

TEST_CASE("gradient, divergence, laplacian on hand examples") {
  GradedPoly2 p(3);
  p.at(3, 2) = 1.0;  // X^2 Y
  auto [dx, dy] = grad(p);
  CHECK(dx.coeff(2, 1) == cplx(2.0, 0.0));  // 2 X Y
  CHECK(dy.coeff(2, 2) == cplx(1.0, 0.0));  // X^2
  CHECK(dx.max_abs_coeff() == 2.0);
  CHECK(dy.max_abs_coeff() == 1.0);

  GradedPoly2 q(2);
  q.at(2, 2) = 1.0;  // X^2
  q.at(2, 0) = 1.0;  // Y^2
  const GradedPoly2 lap = laplacian(q);
  CHECK(lap.coeff(0, 0) == cplx(4.0, 0.0));

  CHECK(grad(GradedPoly2(0)).first.is_zero());
  CHECK(laplacian(GradedPoly2(1)).is_zero());
  GradedPoly2 mismatched(1);
  CHECK_THROWS_AS(divergence(q, mismatched), std::invalid_argument);
}

TEST_CASE("divergence of gradient equals laplacian", "[property]") {
  std::mt19937 rng(12345);
  for (int deg = 2; deg <= 10; ++deg) {
    const GradedPoly2 p = random_poly(deg, rng);
    auto [dx, dy] = grad(p);
    const GradedPoly2 via_div = divergence(dx, dy);
    const GradedPoly2 lap = laplacian(p);
    for (int k = 0; k <= deg - 2; ++k)
      for (int l = 0; l <= k; ++l)
        CHECK(std::abs(via_div.coeff(k, l) - lap.coeff(k, l)) < 1e-13);
  }
}

TEST_CASE("truncated product matches full-multiply oracle", "[property]") {
  std::mt19937 rng(777);
  const GradedPoly2 kappa = random_poly(5, rng);
  const GradedPoly2 lam = random_poly(6, rng);
  for (int M = 0; M <= 5; ++M) {
    const auto got = truncated_product(kappa, lam, M);
    const auto want = product_component_oracle(kappa, lam, M);
    REQUIRE(got.size() == want.size());
    for (std::size_t l = 0; l < got.size(); ++l)
      CHECK(std::abs(got[l] - want[l]) < 1e-14);
  }
}

TEST_CASE("truncated product flop charges are structural") {
  std::mt19937 rng(3);
  for (int M = 0; M <= 7; ++M) {
    const GradedPoly2 kappa = random_poly(M, rng);
    const GradedPoly2 lam = random_poly(M, rng);
    FlopLedger ledger;
    truncated_product(kappa, lam, M, &ledger);
    CHECK(ledger.muls == conv_mul_count(M));
    CHECK(ledger.adds == conv_add_count(M));
  }
  // charges do not depend on sparsity of the data
  GradedPoly2 sparse(4);
  FlopLedger ledger;
  truncated_product(sparse, sparse, 4, &ledger);
  CHECK(ledger.muls == conv_mul_count(4));
  CHECK(ledger.adds == conv_add_count(4));
}

TEST_CASE("mul_truncated and truncate") {
  GradedPoly2 a(1), b(1);
  a.at(0, 0) = 1.0;
  a.at(1, 1) = 1.0;  // 1 + X
  b.at(0, 0) = 2.0;
  b.at(1, 0) = 1.0;  // 2 + Y
  const GradedPoly2 ab = mul_truncated(a, b, 2);
  CHECK(ab.coeff(0, 0) == cplx(2.0, 0.0));
  CHECK(ab.coeff(1, 1) == cplx(2.0, 0.0));
  CHECK(ab.coeff(1, 0) == cplx(1.0, 0.0));
  CHECK(ab.coeff(2, 1) == cplx(1.0, 0.0));
  const GradedPoly2 cut = mul_truncated(a, b, 1);
  CHECK(cut.degree() == 1);
  CHECK(cut.coeff(1, 1) == cplx(2.0, 0.0));
  CHECK(truncate(ab, 0).degree() == 0);
  CHECK(truncate(GradedPoly2{}, 3).is_zero());
  CHECK(mul_truncated(a, GradedPoly2{}, 4).is_zero());
}

TEST_CASE("JSON round trip is exact") {
  std::mt19937 rng(99);
  QTFunction f;
  f.degree = 4;
  f.center = {0.25, -1.5};
  f.p = random_poly(4, rng);
  f.vx = random_poly(3, rng);
  f.vy = random_poly(3, rng);
  const json j = qtfunction_to_json(f);
  const QTFunction g = qtfunction_from_json(json::parse(j.dump()));
  CHECK(g.degree == f.degree);
  CHECK(g.center == f.center);
  for (int k = 0; k <= 4; ++k)
    for (int l = 0; l <= k; ++l) CHECK(g.p.coeff(k, l) == f.p.coeff(k, l));
  for (int k = 0; k <= 3; ++k)
    for (int l = 0; l <= k; ++l) {
      CHECK(g.vx.coeff(k, l) == f.vx.coeff(k, l));
      CHECK(g.vy.coeff(k, l) == f.vy.coeff(k, l));
    }
}

TEST_CASE("QTFunction validation") {
  QTFunction f;
  f.degree = 1;
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
  f.degree = 2;
  f.p = GradedPoly2(3);
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
  f.p = GradedPoly2(2);
  f.vx = GradedPoly2(1);
  f.vy = GradedPoly2(1);
  CHECK_NOTHROW(f.validate());
}
