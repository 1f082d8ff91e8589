#ifndef QTBASIS_EXPLICIT_BUILDERS_HPP
#define QTBASIS_EXPLICIT_BUILDERS_HPP

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qtbasis/coeff.hpp"
#include "qtbasis/flops.hpp"
#include "qtbasis/poly.hpp"

namespace qtb {

enum class Method { Expl1, Expl2, Alge1, Alge2 };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Expl1: return "expl1";
    case Method::Expl2: return "expl2";
    case Method::Alge1: return "alge1";
    case Method::Alge2: return "alge2";
  }
  return "?";
}

inline Method method_from_name(const std::string& s) {
  if (s == "expl1") return Method::Expl1;
  if (s == "expl2") return Method::Expl2;
  if (s == "alge1") return Method::Alge1;
  if (s == "alge2") return Method::Alge2;
  throw std::invalid_argument("unknown method: " + s);
}

/// The 2d+1 free initialization values of an individual construction,
/// ordered as slots [gamma, alpha_0, beta_0, alpha_1, beta_1, ...].
struct InitVector {
  std::vector<std::pair<cplx, cplx>> alpha_beta;  // d pairs, k = 0..d-1
  cplx gamma{};

  int degree() const { return static_cast<int>(alpha_beta.size()); }

  static InitVector zeros(int d) {
    InitVector v;
    v.alpha_beta.assign(static_cast<std::size_t>(d), {cplx{}, cplx{}});
    return v;
  }

  /// j-th canonical vector of C^(2d+1), 1-based slot index.
  static InitVector unit(int d, int j) {
    if (j < 1 || j > 2 * d + 1) throw std::invalid_argument("InitVector::unit: bad slot");
    InitVector v = zeros(d);
    if (j == 1) {
      v.gamma = 1.0;
    } else {
      const int k = (j - 2) / 2;
      if ((j - 2) % 2 == 0)
        v.alpha_beta[static_cast<std::size_t>(k)].first = 1.0;
      else
        v.alpha_beta[static_cast<std::size_t>(k)].second = 1.0;
    }
    return v;
  }
};

/// Coefficients lambda^{k+1} of the degree-(k+1) pressure component whose
/// gradient equals i*omega*rho times the degree-k velocity pair (mu, eta).
/// Requires the velocity pair to lie in the range of the gradient.
inline std::vector<cplx> solve_gradient(int k, std::span<const cplx> mu,
                                        std::span<const cplx> eta,
                                        const AcousticParams& params,
                                        FlopLedger* ledger = nullptr) {
  if (mu.size() != static_cast<std::size_t>(k) + 1 || eta.size() != mu.size())
    throw std::invalid_argument("solve_gradient: bad input sizes");
  const cplx iwr = params.i_omega_rho();
  std::vector<cplx> lam(static_cast<std::size_t>(k) + 2);
  for (int l = 0; l <= k; ++l) {
    lam[static_cast<std::size_t>(l)] =
        iwr / static_cast<double>(k + 1 - l) * eta[static_cast<std::size_t>(l)];
    if (ledger) ledger->mul();
  }
  lam[static_cast<std::size_t>(k) + 1] =
      iwr / static_cast<double>(k + 1) * mu[static_cast<std::size_t>(k)];
  if (ledger) ledger->mul();
  return lam;
}

/// Coefficients (mu^{k+1}, eta^{k+1}) of a degree-(k+1) velocity pair with
/// divergence equal to the degree-k component G, seeded by (alpha, beta),
/// and lying in the range of the gradient.
inline std::pair<std::vector<cplx>, std::vector<cplx>> solve_divergence(
    int k, std::span<const cplx> G, cplx alpha, cplx beta,
    FlopLedger* ledger = nullptr) {
  if (G.size() != static_cast<std::size_t>(k) + 1)
    throw std::invalid_argument("solve_divergence: bad input size");
  std::vector<cplx> mu(static_cast<std::size_t>(k) + 2);
  std::vector<cplx> eta(static_cast<std::size_t>(k) + 2);
  eta[0] = alpha;
  if (k + 1 >= 1) eta[1] = beta;
  for (int l = 0; l <= k - 1; ++l) {
    eta[static_cast<std::size_t>(l) + 2] =
        static_cast<double>(k - l) / static_cast<double>((l + 1) * (l + 2)) *
        (G[static_cast<std::size_t>(l)] -
         static_cast<double>(k + 1 - l) * eta[static_cast<std::size_t>(l)]);
    if (ledger) {
      ledger->add();
      ledger->mul(2);
    }
  }
  for (int l = 0; l <= k; ++l) {
    mu[static_cast<std::size_t>(l)] = static_cast<double>(l + 1) /
                                      static_cast<double>(k + 1 - l) *
                                      eta[static_cast<std::size_t>(l) + 1];
    if (ledger) ledger->mul();
  }
  mu[static_cast<std::size_t>(k) + 1] =
      (G[static_cast<std::size_t>(k)] - eta[static_cast<std::size_t>(k)]) /
      static_cast<double>(k + 1);
  if (ledger) {
    ledger->add();
    ledger->mul();
  }
  return {std::move(mu), std::move(eta)};
}

/// Coefficients lambda^k of a degree-k component whose Laplacian equals the
/// degree-(k-2) component F, seeded by (alpha, beta).
inline std::vector<cplx> solve_laplacian(int k, std::span<const cplx> F, cplx alpha,
                                         cplx beta, FlopLedger* ledger = nullptr) {
  if (k < 2) throw std::invalid_argument("solve_laplacian: k < 2");
  if (F.size() != static_cast<std::size_t>(k) - 1)
    throw std::invalid_argument("solve_laplacian: bad input size");
  std::vector<cplx> lam(static_cast<std::size_t>(k) + 1);
  lam[0] = alpha;
  lam[1] = beta;
  for (int l = 0; l <= k - 2; ++l) {
    lam[static_cast<std::size_t>(l) + 2] =
        (F[static_cast<std::size_t>(l)] -
         static_cast<double>((k - l) * (k - l - 1)) * lam[static_cast<std::size_t>(l)]) /
        static_cast<double>((l + 2) * (l + 1));
    if (ledger) {
      ledger->add();
      ledger->mul(2);
    }
  }
  return lam;
}

/// Velocity pair (grad p)/(i*omega*rho), degree d-1 from a degree-d
/// pressure. This is the action of the gradient-scaling operator; the
/// decoupled builders and the identity checker share this exact code path
/// so the first two Trefftz identities of decoupled bases are bitwise zero.
inline std::pair<GradedPoly2, GradedPoly2> velocity_from_pressure(
    const GradedPoly2& p, const AcousticParams& params, FlopLedger* ledger = nullptr) {
  const cplx inv = params.inv_i_omega_rho();
  if (p.degree() <= 0) return {GradedPoly2{}, GradedPoly2{}};
  GradedPoly2 vx(p.degree() - 1), vy(p.degree() - 1);
  for (int k = 0; k < p.degree(); ++k)
    for (int l = 0; l <= k; ++l) {
      vx.at(k, l) = (static_cast<double>(l + 1) * p.coeff(k + 1, l + 1)) * inv;
      vy.at(k, l) = (static_cast<double>(k + 1 - l) * p.coeff(k + 1, l)) * inv;
      if (ledger) ledger->mul(2);
    }
  return {std::move(vx), std::move(vy)};
}

/// Coupled construction: builds (p, vx, vy) degree by degree, alternating
/// gradient and divergence solves, with the coefficient convolution feeding
/// the divergence right-hand side. `coeff_taylor` is the jet of omega^2/c^2
/// about the center, orders 0..d-2 at least.
inline QTFunction construct_indiv_coupled(int d, const InitVector& init,
                                          const GradedPoly2& coeff_taylor,
                                          const AcousticParams& params,
                                          Point center = {0.0, 0.0},
                                          BuildCost* cost = nullptr) {
  if (d < 2) throw std::invalid_argument("construct_indiv_coupled: d < 2");
  if (init.degree() != d)
    throw std::invalid_argument("construct_indiv_coupled: init size mismatch");
  // G^k = i*omega/rho * kappa-convolution; with the provider primitive
  // omega^2/c^2 the data-independent scale becomes i/(omega*rho).
  const cplx gscale = cplx(0.0, 1.0) / (params.omega * params.rho);

  QTFunction f;
  f.degree = d;
  f.center = center;
  f.p = GradedPoly2(d);
  f.vx = GradedPoly2(d - 1);
  f.vy = GradedPoly2(d - 1);

  f.p.at(0, 0) = init.gamma;
  f.vx.at(0, 0) = init.alpha_beta[0].first;
  f.vy.at(0, 0) = init.alpha_beta[0].second;

  for (int k = 0; k <= d - 2; ++k) {
    auto lam = solve_gradient(k, f.vx.component(k), f.vy.component(k), params,
                              cost ? &cost->solve_gradient : nullptr);
    f.p.set_component(k + 1, std::move(lam));

    auto G = truncated_product(coeff_taylor, f.p, k,
                               cost ? &cost->convolution : nullptr);
    for (auto& g : G) g *= gscale;  // precomputed-factor convention: not charged

    auto [mu, eta] = solve_divergence(
        k, G, init.alpha_beta[static_cast<std::size_t>(k) + 1].first,
        init.alpha_beta[static_cast<std::size_t>(k) + 1].second,
        cost ? &cost->solve_divergence : nullptr);
    f.vx.set_component(k + 1, std::move(mu));
    f.vy.set_component(k + 1, std::move(eta));
  }
  auto lam = solve_gradient(d - 1, f.vx.component(d - 1), f.vy.component(d - 1),
                            params, cost ? &cost->solve_gradient : nullptr);
  f.p.set_component(d, std::move(lam));
  return f;
}

/// Decoupled construction: builds the pressure alone through the Laplacian
/// recurrence, then the velocity as its scaled gradient.
inline QTFunction construct_indiv_decoupled(int d, const InitVector& init,
                                            const GradedPoly2& coeff_taylor,
                                            const AcousticParams& params,
                                            Point center = {0.0, 0.0},
                                            BuildCost* cost = nullptr) {
  if (d < 2) throw std::invalid_argument("construct_indiv_decoupled: d < 2");
  if (init.degree() != d)
    throw std::invalid_argument("construct_indiv_decoupled: init size mismatch");

  QTFunction f;
  f.degree = d;
  f.center = center;
  f.p = GradedPoly2(d);

  f.p.at(0, 0) = init.gamma;
  f.p.at(1, 0) = init.alpha_beta[0].first;
  f.p.at(1, 1) = init.alpha_beta[0].second;

  for (int k = 2; k <= d; ++k) {
    auto F = truncated_product(coeff_taylor, f.p, k - 2,
                               cost ? &cost->convolution : nullptr);
    for (auto& x : F) x = -x;  // F^{k-2} = -omega^2 * kappa-convolution
    auto lam = solve_laplacian(
        k, F, init.alpha_beta[static_cast<std::size_t>(k) - 1].first,
        init.alpha_beta[static_cast<std::size_t>(k) - 1].second,
        cost ? &cost->solve_laplacian : nullptr);
    f.p.set_component(k, std::move(lam));
  }
  auto [vx, vy] =
      velocity_from_pressure(f.p, params, cost ? &cost->comp_grad : nullptr);
  f.vx = std::move(vx);
  f.vy = std::move(vy);
  return f;
}

/// 2d+1 quasi-Trefftz functions from canonical initialization vectors.
inline std::vector<QTFunction> construct_basis_explicit(Method method, int d,
                                                        const GradedPoly2& coeff_taylor,
                                                        const AcousticParams& params,
                                                        Point center = {0.0, 0.0},
                                                        BuildCost* cost = nullptr) {
  if (method != Method::Expl1 && method != Method::Expl2)
    throw std::invalid_argument("construct_basis_explicit: explicit methods only");
  std::vector<QTFunction> basis;
  basis.reserve(static_cast<std::size_t>(2 * d) + 1);
  for (int j = 1; j <= 2 * d + 1; ++j) {
    const InitVector init = InitVector::unit(d, j);
    basis.push_back(method == Method::Expl1
                        ? construct_indiv_coupled(d, init, coeff_taylor, params,
                                                  center, cost)
                        : construct_indiv_decoupled(d, init, coeff_taylor, params,
                                                    center, cost));
  }
  return basis;
}

/// Initialization slots read back from a constructed function, in the order
/// [gamma, alpha_0, beta_0, alpha_1, beta_1, ...]. Used to verify that the
/// canonical initializations yield linearly independent elements.
inline std::vector<cplx> read_init_slots(Method method, const QTFunction& f) {
  const int d = f.degree;
  std::vector<cplx> s;
  s.reserve(static_cast<std::size_t>(2 * d) + 1);
  s.push_back(f.p.coeff(0, 0));
  if (method == Method::Expl2) {
    s.push_back(f.p.coeff(1, 0));
    s.push_back(f.p.coeff(1, 1));
    for (int k = 2; k <= d; ++k) {
      s.push_back(f.p.coeff(k, 0));
      s.push_back(f.p.coeff(k, 1));
    }
  } else {
    s.push_back(f.vx.coeff(0, 0));
    s.push_back(f.vy.coeff(0, 0));
    for (int k = 1; k <= d - 1; ++k) {
      s.push_back(f.vy.coeff(k, 0));
      s.push_back(f.vy.coeff(k, 1));
    }
  }
  return s;
}

/// Runs one individual construction with a fresh ledger and verifies every
/// sub-step count against its closed form; throws naming the divergent
/// sub-step on any mismatch.
inline BuildCost measure(Method method, int d, const GradedPoly2& coeff_taylor,
                         const AcousticParams& params) {
  BuildCost cost;
  InitVector init = InitVector::zeros(d);
  init.gamma = 1.0;
  for (auto& [a, b] : init.alpha_beta) {
    a = cplx(1.0, 0.5);
    b = cplx(-0.5, 1.0);
  }
  if (method == Method::Expl1)
    construct_indiv_coupled(d, init, coeff_taylor, params, {0, 0}, &cost);
  else if (method == Method::Expl2)
    construct_indiv_decoupled(d, init, coeff_taylor, params, {0, 0}, &cost);
  else
    throw std::invalid_argument("measure: explicit methods only");

  const ComplexityRow cf = closed_forms(d);
  const std::int64_t n = d;
  auto expect = [](const FlopLedger& got, std::int64_t adds, std::int64_t muls,
                   const char* step) {
    if (got.adds != adds || got.muls != muls)
      throw std::logic_error(std::string("flop count mismatch in ") + step +
                             ": got adds=" + std::to_string(got.adds) +
                             " muls=" + std::to_string(got.muls) + ", expected adds=" +
                             std::to_string(adds) + " muls=" + std::to_string(muls));
  };
  expect(cost.convolution, cf.conv_adds, cf.conv_terms, "convolution");
  if (method == Method::Expl1) {
    expect(cost.solve_divergence, n * (n - 1) / 2, (n - 1) * (3 * n - 2) / 2,
           "solve_divergence");
    expect(cost.solve_gradient, 0, (n + 1) * (n + 2) / 2 - 1, "solve_gradient");
    if (cost.total().total() != cf.expl1_total)
      throw std::logic_error("flop count mismatch in coupled total");
  } else {
    expect(cost.solve_laplacian, n * (n - 1) / 2, n * (n - 1), "solve_laplacian");
    expect(cost.comp_grad, 0, n * (n + 1), "comp_grad");
    if (cost.total().total() != cf.expl2_total)
      throw std::logic_error("flop count mismatch in decoupled total");
  }
  return cost;
}

}  // namespace qtb

#endif
