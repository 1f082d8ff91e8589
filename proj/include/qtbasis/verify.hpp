#ifndef QTBASIS_VERIFY_HPP
#define QTBASIS_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qtbasis/algebraic_builders.hpp"
#include "qtbasis/coeff.hpp"

namespace qtb {

/// Worst l-inf coefficient norm of the two gradient identities
/// -i*omega*rho*v + grad p over a basis. The comparison runs through the
/// same gradient-scaling code path as the decoupled builders, so bases with
/// velocities derived that way score exactly zero.
inline double check_identities(const std::vector<QTFunction>& basis,
                               const AcousticParams& params) {
  if (basis.empty()) throw std::invalid_argument("check_identities: empty basis");
  const cplx iwr = params.i_omega_rho();
  double worst = 0.0;
  for (const auto& f : basis) {
    auto [gx, gy] = velocity_from_pressure(f.p, params);
    for (int k = 0; k <= f.degree - 1; ++k)
      for (int l = 0; l <= k; ++l) {
        worst = std::max(worst, std::abs(iwr * (gx.coeff(k, l) - f.vx.coeff(k, l))));
        worst = std::max(worst, std::abs(iwr * (gy.coeff(k, l) - f.vy.coeff(k, l))));
      }
  }
  return worst;
}

/// Pointwise residual of the divergence equation at a global point, using
/// the true (untruncated) coefficient:
///   -i*omega/(rho*c(x)^2) * p(x) + dx vx(x) + dy vy(x).
inline cplx s3_residual(const QTFunction& f, const CoeffProvider& provider,
                        const AcousticParams& params, Point x) {
  const double w2c2 = provider.value(x, params);
  const cplx scale = -cplx(0.0, 1.0) / (params.omega * params.rho) * w2c2;
  auto [dxx, unused_xy] = grad(f.vx);
  auto [unused_yx, dyy] = grad(f.vy);
  return scale * eval(f.p, x, f.center) + eval(dxx, x, f.center) +
         eval(dyy, x, f.center);
}

/// Geometric radii h/2, h/4, ..., h/512 (decreasing).
inline std::vector<double> default_radii(double h) {
  std::vector<double> r;
  for (double v = h / 2.0; v >= h / 512.0 * 0.999; v /= 2.0) r.push_back(v);
  return r;
}

/// Log-log least-squares slope with plateau handling: the floor is the
/// median of the three smallest values, points below 100x the floor are
/// excluded from the fit, and a plateau counts as detected when the local
/// slope between the two smallest radii drops below 0.5.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double fit_residual = 0.0;
  double plateau_level = 0.0;
  bool plateau_detected = false;
  int points_used = 0;
};

inline SlopeFit fit_decay(const std::vector<double>& radii,
                          const std::vector<double>& values) {
  if (radii.size() != values.size() || radii.size() < 2)
    throw std::invalid_argument("fit_decay: need >= 2 samples");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1]))
      throw std::invalid_argument("fit_decay: radii must decrease strictly");

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double floor_level = sorted.size() >= 3 ? sorted[1] : sorted[0];

  SlopeFit out;
  out.plateau_level = floor_level;
  const std::size_t n = radii.size();
  if (values[n - 1] > 0.0 && values[n - 2] > 0.0)
    out.plateau_detected =
        std::log(values[n - 2] / values[n - 1]) / std::log(radii[n - 2] / radii[n - 1]) <
        0.5;

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n; ++i)
    if (values[i] >= 100.0 * floor_level && values[i] > 0.0) {
      lx.push_back(std::log(radii[i]));
      ly.push_back(std::log(values[i]));
    }
  if (lx.size() < 2) {
    lx.clear();
    ly.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (values[i] > 0.0) {
        lx.push_back(std::log(radii[i]));
        ly.push_back(std::log(values[i]));
      }
  }
  if (lx.size() < 2) return out;  // all-zero data: slope stays 0

  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  out.intercept = (sy - out.slope * sx) / m;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (out.intercept + out.slope * lx[i]);
    rss += e * e;
  }
  out.fit_residual = std::sqrt(rss / m);
  out.points_used = static_cast<int>(lx.size());
  return out;
}

/// Max divergence-equation residual per radius over a basis, sampled on
/// circles about the common center and normalized per element by its
/// coefficient l-inf norm.
struct DecayResult {
  std::vector<double> radii;
  std::vector<double> values;
  SlopeFit fit;
};

inline DecayResult residual_decay(const std::vector<QTFunction>& basis,
                                  const CoeffProvider& provider,
                                  const AcousticParams& params,
                                  const std::vector<double>& radii,
                                  int samples_per_circle = 16) {
  if (basis.empty()) throw std::invalid_argument("residual_decay: empty basis");
  DecayResult out;
  out.radii = radii;
  out.values.assign(radii.size(), 0.0);
  for (const auto& f : basis) {
    const double scale = f.max_abs_coeff();
    if (scale == 0.0) continue;
    for (std::size_t ri = 0; ri < radii.size(); ++ri)
      for (int s = 0; s < samples_per_circle; ++s) {
        const double th = 2.0 * std::numbers::pi * s / samples_per_circle;
        const Point x{f.center[0] + radii[ri] * std::cos(th),
                      f.center[1] + radii[ri] * std::sin(th)};
        out.values[ri] = std::max(
            out.values[ri], std::abs(s3_residual(f, provider, params, x)) / scale);
      }
  }
  out.fit = fit_decay(out.radii, out.values);
  return out;
}

/// Taylor jet of e^{g0 + h} about a center, where h is the recentered
/// exponent in local coordinates with zero constant term: the jet is
/// e^{g0} * sum_n h^n / n! truncated at total degree q.
inline GradedPoly2 exp_poly_jet(cplx g0, const GradedPoly2& h, int q) {
  if (q < 0) throw std::invalid_argument("exp_poly_jet: q < 0");
  if (!h.is_zero() && std::abs(h.coeff(0, 0)) != 0.0)
    throw std::invalid_argument("exp_poly_jet: exponent must have no constant term");
  GradedPoly2 sum(q);
  sum.at(0, 0) = 1.0;
  GradedPoly2 power(0);
  power.at(0, 0) = 1.0;
  double factorial = 1.0;
  for (int n = 1; n <= q; ++n) {
    power = mul_truncated(power, h, q);
    if (power.is_zero() || power.max_abs_coeff() == 0.0) break;
    factorial *= n;
    sum += power * cplx(1.0 / factorial, 0.0);
  }
  return sum * std::exp(g0);
}

/// Closed-form solution p_ex = e^{5ix - y^3 + y} of the case-1 system,
/// with v_ex its gradient over i*omega*rho.
struct ExactSolution {
  AcousticParams params;

  cplx exponent(Point x) const {
    return cplx(0.0, 5.0 * x[0]) + (-x[1] * x[1] * x[1] + x[1]);
  }

  cplx pressure(Point x) const { return std::exp(exponent(x)); }

  std::pair<cplx, cplx> velocity(Point x) const {
    const cplx p = pressure(x);
    const cplx inv = params.inv_i_omega_rho();
    return {cplx(0.0, 5.0) * p * inv, (1.0 - 3.0 * x[1] * x[1]) * p * inv};
  }

  /// Recentered exponent in local coordinates, constant term removed.
  GradedPoly2 local_exponent(Point c) const {
    GradedPoly2 h(3);
    h.at(1, 1) = cplx(0.0, 5.0);
    h.at(1, 0) = 1.0 - 3.0 * c[1] * c[1];
    h.at(2, 0) = -3.0 * c[1];
    h.at(3, 0) = -1.0;
    return h;
  }

  GradedPoly2 pressure_jet(Point center, int q) const {
    return exp_poly_jet(exponent(center), local_exponent(center), q);
  }

  /// Pressure jet to degree q and velocity jets to degree q-1.
  QTFunction jets(Point center, int q) const {
    QTFunction f;
    f.degree = q;
    f.center = center;
    f.p = pressure_jet(center, q);
    auto [vx, vy] = velocity_from_pressure(f.p, params);
    f.vx = std::move(vx);
    f.vy = std::move(vy);
    return f;
  }
};

inline ExactSolution case1_exact_solution() { return ExactSolution{preset_params()}; }

/// Best-approximation study: matches the exact solution's Taylor jet in the
/// basis by least squares, then measures pointwise errors on circles.
struct BestApproxResult {
  std::vector<double> radii;
  std::vector<double> p_values;
  std::vector<double> v_values;
  SlopeFit p_fit;
  SlopeFit v_fit;
  Vec coefficients;
};

inline QTFunction linear_combination(const std::vector<QTFunction>& basis,
                                     const Vec& coeffs) {
  if (basis.empty() || coeffs.size() != static_cast<Eigen::Index>(basis.size()))
    throw std::invalid_argument("linear_combination: size mismatch");
  QTFunction out;
  out.degree = basis[0].degree;
  out.center = basis[0].center;
  out.p = GradedPoly2(out.degree);
  out.vx = GradedPoly2(out.degree - 1);
  out.vy = GradedPoly2(out.degree - 1);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const cplx c = coeffs(static_cast<Eigen::Index>(j));
    out.p += basis[j].p * c;
    out.vx += basis[j].vx * c;
    out.vy += basis[j].vy * c;
  }
  return out;
}

inline BestApproxResult best_approx_study(const std::vector<QTFunction>& basis,
                                          const ExactSolution& exact,
                                          const std::vector<double>& radii,
                                          int samples_per_circle = 16) {
  if (basis.empty()) throw std::invalid_argument("best_approx_study: empty basis");
  const int d = basis[0].degree;
  const Point center = basis[0].center;
  const SystemNumbering dom(d, d - 1);

  Mat A(dom.size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j)
    A.col(static_cast<Eigen::Index>(j)) = pack_system_vector(basis[j]);

  Eigen::BDCSVD<Mat> svd(A);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > default_rank_tol(static_cast<int>(A.rows()), static_cast<int>(A.cols())) *
            smax))
    throw std::runtime_error("Taylor matrix rank-deficient: sigma_min=" +
                             std::to_string(smin) + " sigma_max=" + std::to_string(smax));

  const Vec rhs = pack_system_vector(exact.jets(center, d));
  BestApproxResult out;
  out.coefficients = A.colPivHouseholderQr().solve(rhs);
  const QTFunction approx = linear_combination(basis, out.coefficients);

  out.radii = radii;
  out.p_values.assign(radii.size(), 0.0);
  out.v_values.assign(radii.size(), 0.0);
  for (std::size_t ri = 0; ri < radii.size(); ++ri)
    for (int s = 0; s < samples_per_circle; ++s) {
      const double th = 2.0 * std::numbers::pi * s / samples_per_circle;
      const Point x{center[0] + radii[ri] * std::cos(th),
                    center[1] + radii[ri] * std::sin(th)};
      const cplx pe = exact.pressure(x) - eval(approx.p, x, center);
      const auto [vex, vey] = exact.velocity(x);
      const cplx ex = vex - eval(approx.vx, x, center);
      const cplx ey = vey - eval(approx.vy, x, center);
      out.p_values[ri] = std::max(out.p_values[ri], std::abs(pe));
      out.v_values[ri] =
          std::max(out.v_values[ri], std::sqrt(std::norm(ex) + std::norm(ey)));
    }
  out.p_fit = fit_decay(out.radii, out.p_values);
  out.v_fit = fit_decay(out.radii, out.v_values);
  return out;
}

}  // namespace qtb

#endif
