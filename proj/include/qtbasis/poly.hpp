#ifndef QTBASIS_POLY_HPP
#define QTBASIS_POLY_HPP

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qtbasis/flops.hpp"

namespace qtb {

using cplx = std::complex<double>;
using Point = std::array<double, 2>;

/// Bivariate complex polynomial stored by homogeneous components in local
/// coordinates (X,Y) = (x-x0, y-y0). Component k holds the k+1 coefficients
/// c^k_l of the monomials X^l Y^(k-l), l = 0..k. Degree -1 encodes the zero
/// polynomial (no components); it is absorbing under every operation.
class GradedPoly2 {
 public:
  GradedPoly2() = default;

  explicit GradedPoly2(int degree) { resize(degree); }

  static GradedPoly2 zero() { return GradedPoly2{}; }

  int degree() const { return degree_; }
  bool is_zero() const { return degree_ < 0; }

  void resize(int degree) {
    if (degree < -1) throw std::invalid_argument("GradedPoly2: degree < -1");
    degree_ = degree;
    comps_.assign(degree < 0 ? 0 : static_cast<std::size_t>(degree) + 1, {});
    for (int k = 0; k <= degree; ++k)
      comps_[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(k) + 1, cplx{});
  }

  /// Coefficient of X^l Y^(k-l); zero outside the stored range.
  cplx coeff(int k, int l) const {
    if (k < 0 || k > degree_ || l < 0 || l > k) return cplx{};
    return comps_[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
  }

  cplx& at(int k, int l) {
    if (k < 0 || k > degree_ || l < 0 || l > k)
      throw std::out_of_range("GradedPoly2::at");
    return comps_[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
  }

  void set(int k, int l, cplx v) { at(k, l) = v; }

  std::span<const cplx> component(int k) const {
    if (k < 0 || k > degree_) return {};
    return comps_[static_cast<std::size_t>(k)];
  }

  std::span<cplx> component_mut(int k) {
    if (k < 0 || k > degree_) throw std::out_of_range("GradedPoly2::component_mut");
    return comps_[static_cast<std::size_t>(k)];
  }

  void set_component(int k, std::vector<cplx> c) {
    if (k < 0 || k > degree_ || c.size() != static_cast<std::size_t>(k) + 1)
      throw std::invalid_argument("GradedPoly2::set_component: bad size");
    comps_[static_cast<std::size_t>(k)] = std::move(c);
  }

  GradedPoly2& operator+=(const GradedPoly2& o) {
    if (o.degree_ > degree_) {
      GradedPoly2 grown(o.degree_);
      for (int k = 0; k <= degree_; ++k)
        grown.comps_[static_cast<std::size_t>(k)] = comps_[static_cast<std::size_t>(k)];
      *this = std::move(grown);
    }
    for (int k = 0; k <= o.degree_; ++k)
      for (int l = 0; l <= k; ++l)
        comps_[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] +=
            o.comps_[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
    return *this;
  }

  friend GradedPoly2 operator+(GradedPoly2 a, const GradedPoly2& b) {
    a += b;
    return a;
  }

  GradedPoly2& operator*=(cplx s) {
    for (auto& comp : comps_)
      for (auto& c : comp) c *= s;
    return *this;
  }

  friend GradedPoly2 operator*(GradedPoly2 a, cplx s) {
    a *= s;
    return a;
  }
  friend GradedPoly2 operator*(cplx s, GradedPoly2 a) {
    a *= s;
    return a;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& comp : comps_)
      for (const auto& c : comp) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  int degree_ = -1;
  std::vector<std::vector<cplx>> comps_;
};

/// Evaluation in local coordinates, Horner per homogeneous component.
inline cplx eval_local(const GradedPoly2& p, double X, double Y) {
  cplx result{};
  std::vector<double> ypow(static_cast<std::size_t>(std::max(p.degree(), 0)) + 1, 1.0);
  for (std::size_t i = 1; i < ypow.size(); ++i) ypow[i] = ypow[i - 1] * Y;
  for (int k = 0; k <= p.degree(); ++k) {
    auto comp = p.component(k);
    cplx h = comp[static_cast<std::size_t>(k)];
    for (int l = k - 1; l >= 0; --l)
      h = h * X + comp[static_cast<std::size_t>(l)] * ypow[static_cast<std::size_t>(k - l)];
    result += h;
  }
  return result;
}

inline cplx eval(const GradedPoly2& p, Point point, Point center) {
  return eval_local(p, point[0] - center[0], point[1] - center[1]);
}

/// Partial derivatives; degrees drop by one.
inline std::pair<GradedPoly2, GradedPoly2> grad(const GradedPoly2& p) {
  if (p.degree() <= 0) return {GradedPoly2{}, GradedPoly2{}};
  GradedPoly2 dx(p.degree() - 1), dy(p.degree() - 1);
  for (int k = 1; k <= p.degree(); ++k)
    for (int l = 0; l <= k; ++l) {
      const cplx c = p.coeff(k, l);
      if (l >= 1) dx.at(k - 1, l - 1) += static_cast<double>(l) * c;
      if (k - l >= 1) dy.at(k - 1, l) += static_cast<double>(k - l) * c;
    }
  return {std::move(dx), std::move(dy)};
}

inline GradedPoly2 divergence(const GradedPoly2& vx, const GradedPoly2& vy) {
  if (vx.degree() != vy.degree())
    throw std::invalid_argument("divergence: velocity components differ in degree");
  auto [dxx, dxy] = grad(vx);
  auto [dyx, dyy] = grad(vy);
  return dxx + dyy;
}

inline GradedPoly2 laplacian(const GradedPoly2& p) {
  if (p.degree() <= 1) return GradedPoly2{};
  GradedPoly2 out(p.degree() - 2);
  for (int k = 2; k <= p.degree(); ++k)
    for (int l = 0; l <= k - 2; ++l)
      out.at(k - 2, l) = static_cast<double>((l + 2) * (l + 1)) * p.coeff(k, l + 2) +
                         static_cast<double>((k - l) * (k - l - 1)) * p.coeff(k, l);
  return out;
}

/// Degree-M homogeneous component of the product kappa * lam. Missing
/// components on either factor are treated as zero but the ledger is still
/// charged structurally: one multiply per term of the double sum, and one
/// add per term beyond the first within each inner (fixed-m) sum.
inline std::vector<cplx> truncated_product(const GradedPoly2& kappa,
                                           const GradedPoly2& lam, int M,
                                           FlopLedger* ledger = nullptr) {
  if (M < 0) throw std::invalid_argument("truncated_product: M < 0");
  std::vector<cplx> out(static_cast<std::size_t>(M) + 1, cplx{});
  for (int l = 0; l <= M; ++l) {
    cplx acc{};
    for (int m = 0; m <= M; ++m) {
      const int jlo = std::max(0, m + l - M);
      const int jhi = std::min(m, l);
      cplx inner{};
      for (int j = jlo; j <= jhi; ++j) {
        const cplx term = kappa.coeff(m, j) * lam.coeff(M - m, l - j);
        if (ledger) {
          ledger->mul();
          if (j > jlo) ledger->add();
        }
        inner += term;
      }
      acc += inner;  // combining the per-m partial sums is not charged
    }
    out[static_cast<std::size_t>(l)] = acc;
  }
  return out;
}

/// Full product truncated at total degree maxdeg (uninstrumented; used for
/// Taylor-jet manipulation, not by the basis recurrences).
inline GradedPoly2 mul_truncated(const GradedPoly2& a, const GradedPoly2& b,
                                 int maxdeg) {
  if (a.is_zero() || b.is_zero() || maxdeg < 0) return GradedPoly2{};
  const int deg = std::min(maxdeg, a.degree() + b.degree());
  GradedPoly2 out(deg);
  for (int ka = 0; ka <= a.degree(); ++ka)
    for (int kb = 0; kb <= std::min(b.degree(), deg - ka); ++kb)
      for (int la = 0; la <= ka; ++la)
        for (int lb = 0; lb <= kb; ++lb)
          out.at(ka + kb, la + lb) += a.coeff(ka, la) * b.coeff(kb, lb);
  return out;
}

/// Truncation to total degree q.
inline GradedPoly2 truncate(const GradedPoly2& p, int q) {
  const int deg = std::min(p.degree(), q);
  if (deg < 0) return GradedPoly2{};
  GradedPoly2 out(deg);
  for (int k = 0; k <= deg; ++k)
    for (int l = 0; l <= k; ++l) out.at(k, l) = p.coeff(k, l);
  return out;
}

/// One quasi-Trefftz element: pressure of degree <= d and velocity pair of
/// degree <= d-1, all expanded about the same center.
struct QTFunction {
  GradedPoly2 p;
  GradedPoly2 vx;
  GradedPoly2 vy;
  Point center{0.0, 0.0};
  int degree = 2;

  void validate() const {
    if (degree < 2) throw std::invalid_argument("QTFunction: degree < 2");
    if (p.degree() > degree || vx.degree() > degree - 1 || vy.degree() > degree - 1)
      throw std::invalid_argument("QTFunction: component degree exceeds bound");
  }

  double max_abs_coeff() const {
    return std::max({p.max_abs_coeff(), vx.max_abs_coeff(), vy.max_abs_coeff()});
  }
};

// ---- JSON serialization ----

using json = nlohmann::ordered_json;

inline json poly_to_json(const GradedPoly2& p, Point center) {
  json coeffs = json::array();
  for (int k = 0; k <= p.degree(); ++k) {
    json comp = json::array();
    for (int l = 0; l <= k; ++l) {
      const cplx c = p.coeff(k, l);
      comp.push_back(json::array({c.real(), c.imag()}));
    }
    coeffs.push_back(std::move(comp));
  }
  return json{{"degree", p.degree()},
              {"center", json::array({center[0], center[1]})},
              {"coeffs", std::move(coeffs)}};
}

inline GradedPoly2 poly_from_json(const json& j, Point* center = nullptr) {
  GradedPoly2 p(j.at("degree").get<int>());
  if (center) {
    (*center)[0] = j.at("center")[0].get<double>();
    (*center)[1] = j.at("center")[1].get<double>();
  }
  const auto& coeffs = j.at("coeffs");
  for (int k = 0; k <= p.degree(); ++k)
    for (int l = 0; l <= k; ++l)
      p.at(k, l) = cplx(coeffs[k][l][0].get<double>(), coeffs[k][l][1].get<double>());
  return p;
}

inline json qtfunction_to_json(const QTFunction& f) {
  return json{{"degree", f.degree},
              {"center", json::array({f.center[0], f.center[1]})},
              {"p", poly_to_json(f.p, f.center)},
              {"vx", poly_to_json(f.vx, f.center)},
              {"vy", poly_to_json(f.vy, f.center)}};
}

inline QTFunction qtfunction_from_json(const json& j) {
  QTFunction f;
  f.degree = j.at("degree").get<int>();
  f.center = {j.at("center")[0].get<double>(), j.at("center")[1].get<double>()};
  f.p = poly_from_json(j.at("p"));
  f.vx = poly_from_json(j.at("vx"));
  f.vy = poly_from_json(j.at("vy"));
  return f;
}

}  // namespace qtb

#endif
