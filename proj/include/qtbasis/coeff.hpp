#ifndef QTBASIS_COEFF_HPP
#define QTBASIS_COEFF_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtbasis/poly.hpp"

namespace qtb {

struct AcousticParams {
  double omega = 0.0;  // harmonic frequency, 1/s
  double rho = 0.0;    // density, kg*m^2

  void validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("AcousticParams: rho must be > 0");
    if (omega == 0.0) throw std::invalid_argument("AcousticParams: omega must be nonzero");
  }

  cplx i_omega_rho() const { return cplx(0.0, omega * rho); }
  cplx inv_i_omega_rho() const { return 1.0 / cplx(0.0, omega * rho); }
};

/// Parameters shared by both built-in test cases: omega = pi/2, rho = 4/pi^2.
inline AcousticParams preset_params() {
  const double pi = std::numbers::pi;
  return AcousticParams{pi / 2.0, 4.0 / (pi * pi)};
}

/// Whether stored values represent omega^2/c^2 or 1/c^2.
enum class CoeffScaling { Omega2OverC2, InvC2 };

/// Taylor coefficients t_0..t_q of x -> a*exp(-b*(x-shift)^2) at x0, by the
/// derivative recurrence (n+1) t_{n+1} = -2b((x0-shift) t_n + t_{n-1}).
inline std::vector<double> gaussian_taylor_1d(double a, double b, double shift,
                                              double x0, int q) {
  if (q < 0) throw std::invalid_argument("gaussian_taylor_1d: q < 0");
  std::vector<double> t(static_cast<std::size_t>(q) + 1, 0.0);
  const double u = x0 - shift;
  t[0] = a * std::exp(-b * u * u);
  for (int n = 0; n < q; ++n) {
    double rhs = u * t[static_cast<std::size_t>(n)];
    if (n >= 1) rhs += t[static_cast<std::size_t>(n) - 1];
    t[static_cast<std::size_t>(n) + 1] = -2.0 * b * rhs / static_cast<double>(n + 1);
  }
  return t;
}

struct GaussianTerm {
  double amplitude = 0.0;
  double bx = 0.0;
  double x_shift = 0.0;
  double by = 0.0;
  double y_shift = 0.0;
};

/// Supplier of the Taylor coefficients of the variable Helmholtz coefficient
/// at arbitrary centers. Internally everything is normalized to the quantity
/// omega^2/c^2; callers apply the scalar factors their operator needs.
class CoeffProvider {
 public:
  enum class Kind { Constant, Polynomial, GaussianSum };

  static CoeffProvider constant(double value,
                                CoeffScaling scaling = CoeffScaling::Omega2OverC2) {
    CoeffProvider p;
    p.kind_ = Kind::Constant;
    p.scaling_ = scaling;
    p.constant_ = value;
    return p;
  }

  /// Polynomial in global coordinates; coeffs[i][j] multiplies x^i y^j
  /// (rows may be ragged, missing entries are zero).
  static CoeffProvider polynomial(std::vector<std::vector<double>> coeffs,
                                  CoeffScaling scaling = CoeffScaling::Omega2OverC2) {
    CoeffProvider p;
    p.kind_ = Kind::Polynomial;
    p.scaling_ = scaling;
    p.poly_coeffs_ = std::move(coeffs);
    return p;
  }

  /// constant + sum of separable Gaussians; optionally piecewise across a
  /// vertical seam x = seam_x, with one-sided terms chosen by the center.
  static CoeffProvider gaussian_sum(double constant, std::vector<GaussianTerm> terms,
                                    std::optional<double> seam_x = std::nullopt,
                                    std::vector<GaussianTerm> right_terms = {},
                                    CoeffScaling scaling = CoeffScaling::Omega2OverC2) {
    CoeffProvider p;
    p.kind_ = Kind::GaussianSum;
    p.scaling_ = scaling;
    p.constant_ = constant;
    p.gauss_terms_ = std::move(terms);
    p.seam_x_ = seam_x;
    p.gauss_terms_right_ = std::move(right_terms);
    return p;
  }

  /// Test case 1: omega^2/c^2 = 24 - 9y^4 + 6y^2 + 6y on the unit square.
  static CoeffProvider case1() {
    return polynomial({{24.0, 6.0, 6.0, 0.0, -9.0}});
  }

  /// Test case 2: heated-jet toy model, piecewise Gaussian across x = 150.
  static CoeffProvider case2() {
    GaussianTerm left{-2e-5, 1e-4, 150.0, 0.001, -50.0};
    GaussianTerm right{-2e-5, 1e-6, 150.0, 0.001, -50.0};
    return gaussian_sum(3.1e-5, {left}, 150.0, {right});
  }

  Kind kind() const { return kind_; }
  CoeffScaling scaling() const { return scaling_; }
  std::optional<double> seam_x() const { return seam_x_; }

  /// Pointwise value of omega^2/c^2 at a global point, using the true
  /// (untruncated) function. `side_center` selects the seam side for
  /// piecewise providers; by default the evaluation point itself decides.
  double value(Point x, const AcousticParams& params,
               std::optional<Point> side_center = std::nullopt) const {
    double v = 0.0;
    switch (kind_) {
      case Kind::Constant:
        v = constant_;
        break;
      case Kind::Polynomial: {
        for (std::size_t i = 0; i < poly_coeffs_.size(); ++i)
          for (std::size_t j = 0; j < poly_coeffs_[i].size(); ++j)
            v += poly_coeffs_[i][j] * std::pow(x[0], static_cast<double>(i)) *
                 std::pow(x[1], static_cast<double>(j));
        break;
      }
      case Kind::GaussianSum: {
        v = constant_;
        const Point ref = side_center.value_or(x);
        for (const auto& t : terms_for(ref)) {
          const double dx = x[0] - t.x_shift;
          const double dy = x[1] - t.y_shift;
          v += t.amplitude * std::exp(-t.bx * dx * dx - t.by * dy * dy);
        }
        break;
      }
    }
    if (scaling_ == CoeffScaling::InvC2) v *= params.omega * params.omega;
    return v;
  }

  /// Exact Taylor components of omega^2/c^2 about x0, orders 0..q, in local
  /// coordinates. Computed analytically (recentering / derivative
  /// recurrences), never by finite differences.
  GradedPoly2 taylor(Point x0, int q, const AcousticParams& params) const {
    if (q < 0) throw std::invalid_argument("CoeffProvider::taylor: q < 0");
    GradedPoly2 out(q);
    switch (kind_) {
      case Kind::Constant:
        out.at(0, 0) = constant_;
        break;
      case Kind::Polynomial: {
        // binomial recentering of each global monomial x^i y^j
        for (std::size_t i = 0; i < poly_coeffs_.size(); ++i)
          for (std::size_t j = 0; j < poly_coeffs_[i].size(); ++j) {
            const double a = poly_coeffs_[i][j];
            if (a == 0.0) continue;
            const auto bi = binomial_shift(static_cast<int>(i), x0[0]);
            const auto bj = binomial_shift(static_cast<int>(j), x0[1]);
            for (std::size_t li = 0; li < bi.size(); ++li)
              for (std::size_t lj = 0; lj < bj.size(); ++lj) {
                const int k = static_cast<int>(li + lj);
                if (k <= q)
                  out.at(k, static_cast<int>(li)) += a * bi[li] * bj[lj];
              }
          }
        break;
      }
      case Kind::GaussianSum: {
        out.at(0, 0) = constant_;
        for (const auto& t : terms_for(x0)) {
          const auto tx = gaussian_taylor_1d(t.amplitude, t.bx, t.x_shift, x0[0], q);
          const auto ty = gaussian_taylor_1d(1.0, t.by, t.y_shift, x0[1], q);
          for (int i = 0; i <= q; ++i)
            for (int j = 0; j + i <= q; ++j)
              out.at(i + j, i) += tx[static_cast<std::size_t>(i)] *
                                  ty[static_cast<std::size_t>(j)];
        }
        break;
      }
    }
    if (scaling_ == CoeffScaling::InvC2) out *= params.omega * params.omega;
    return out;
  }

 private:
  static std::vector<double> binomial_shift(int n, double x0) {
    // coefficients of (X + x0)^n in powers of X
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[static_cast<std::size_t>(n)] = 1.0;
    for (int l = n - 1; l >= 0; --l)
      c[static_cast<std::size_t>(l)] =
          c[static_cast<std::size_t>(l) + 1] * x0 * static_cast<double>(l + 1) /
          static_cast<double>(n - l);
    return c;
  }

  const std::vector<GaussianTerm>& terms_for(Point center) const {
    if (seam_x_ && center[0] > *seam_x_) return gauss_terms_right_;
    return gauss_terms_;
  }

  Kind kind_ = Kind::Constant;
  CoeffScaling scaling_ = CoeffScaling::Omega2OverC2;
  double constant_ = 0.0;
  std::vector<std::vector<double>> poly_coeffs_;
  std::vector<GaussianTerm> gauss_terms_;
  std::vector<GaussianTerm> gauss_terms_right_;
  std::optional<double> seam_x_;
};

/// A provider together with its acoustic parameters; this is what a run
/// configuration or a JSON preset describes.
struct CoeffSetup {
  CoeffProvider provider;
  AcousticParams params;
};

inline CoeffSetup preset_setup(int test_case) {
  if (test_case == 1) return {CoeffProvider::case1(), preset_params()};
  if (test_case == 2) return {CoeffProvider::case2(), preset_params()};
  throw std::invalid_argument("unknown test-case preset: " + std::to_string(test_case));
}

// ---- JSON config ----
// {"kind": "constant"|"polynomial"|"gaussian"|"case1"|"case2",
//  "omega": ..., "rho": ..., plus kind-specific fields}

inline CoeffSetup coeff_setup_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "case1" || kind == "case2") {
    CoeffSetup s = preset_setup(kind == "case1" ? 1 : 2);
    if (j.contains("omega")) s.params.omega = j["omega"].get<double>();
    if (j.contains("rho")) s.params.rho = j["rho"].get<double>();
    return s;
  }
  if (kind != "constant" && kind != "polynomial" && kind != "gaussian")
    throw std::invalid_argument("unknown provider kind: " + kind);
  AcousticParams params{j.at("omega").get<double>(), j.at("rho").get<double>()};
  const CoeffScaling scaling =
      j.value("scaling", std::string("omega2_over_c2")) == "inv_c2"
          ? CoeffScaling::InvC2
          : CoeffScaling::Omega2OverC2;
  if (kind == "constant")
    return {CoeffProvider::constant(j.at("value").get<double>(), scaling), params};
  if (kind == "polynomial")
    return {CoeffProvider::polynomial(
                j.at("coeffs").get<std::vector<std::vector<double>>>(), scaling),
            params};
  if (kind == "gaussian") {
    auto parse_terms = [](const json& arr) {
      std::vector<GaussianTerm> ts;
      for (const auto& t : arr)
        ts.push_back({t.at("amplitude").get<double>(), t.at("bx").get<double>(),
                      t.at("x_shift").get<double>(), t.at("by").get<double>(),
                      t.at("y_shift").get<double>()});
      return ts;
    };
    std::optional<double> seam;
    std::vector<GaussianTerm> right;
    if (j.contains("seam_x")) {
      seam = j["seam_x"].get<double>();
      right = parse_terms(j.at("right_terms"));
    }
    return {CoeffProvider::gaussian_sum(j.at("constant").get<double>(),
                                        parse_terms(j.at("terms")), seam,
                                        std::move(right), scaling),
            params};
  }
  throw std::invalid_argument("unknown provider kind: " + kind);
}

}  // namespace qtb

#endif
