#ifndef QTBASIS_STUDY_HPP
#define QTBASIS_STUDY_HPP

#include <algorithm>
#include <chrono>
#include <cstring>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qtbasis/mesh.hpp"
#include "qtbasis/verify.hpp"

namespace qtb {

namespace detail {

inline void append_bytes(std::string& key, const void* data, std::size_t n) {
  key.append(static_cast<const char*>(data), n);
}

inline void append_double(std::string& key, double v) { append_bytes(key, &v, sizeof v); }

/// Byte key of a coefficient jet; bases depend on the jet and the acoustic
/// parameters only, never on the center itself.
inline std::string jet_key(const GradedPoly2& jet, const AcousticParams& params) {
  std::string key;
  append_double(key, params.omega);
  append_double(key, params.rho);
  const int deg = jet.degree();
  append_bytes(key, &deg, sizeof deg);
  for (int k = 0; k <= deg; ++k)
    for (int l = 0; l <= k; ++l) {
      const cplx c = jet.coeff(k, l);
      append_double(key, c.real());
      append_double(key, c.imag());
    }
  return key;
}

}  // namespace detail

/// Memoized basis construction over mesh elements: elements sharing the same
/// coefficient jet reuse one construction, recentered.
class BasisCache {
 public:
  const std::vector<QTFunction>& get(Method method, int d, const GradedPoly2& jet,
                                     const AcousticParams& params,
                                     double rank_tol = -1.0) {
    std::string key = method_name(method);
    key += ':' + std::to_string(d) + ':';
    detail::append_double(key, rank_tol);
    key += detail::jet_key(jet, params);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(std::move(key),
                          construct_basis(method, d, jet, params, {0.0, 0.0}, rank_tol))
               .first;
    return it->second;
  }

  std::vector<QTFunction> get_centered(Method method, int d, const GradedPoly2& jet,
                                       const AcousticParams& params, Point center,
                                       double rank_tol = -1.0) {
    std::vector<QTFunction> basis = get(method, d, jet, params, rank_tol);
    for (auto& f : basis) f.center = center;
    return basis;
  }

 private:
  std::map<std::string, std::vector<QTFunction>> cache_;
};

/// One row of the identity table: worst gradient-identity coefficient over
/// all mesh elements for one (method, degree).
struct IdentityRow {
  Method method;
  int d;
  double max_linf;
};

inline IdentityRow identity_row(const std::vector<Point>& centers,
                                const CoeffSetup& setup, Method method, int d,
                                BasisCache& cache) {
  double worst = 0.0;
  std::map<std::string, double> per_jet;
  for (const Point& c : centers) {
    const GradedPoly2 jet = setup.provider.taylor(c, d - 2, setup.params);
    const std::string key = detail::jet_key(jet, setup.params);
    auto it = per_jet.find(key);
    if (it == per_jet.end())
      it = per_jet
               .emplace(key, check_identities(cache.get(method, d, jet, setup.params),
                                              setup.params))
               .first;
    worst = std::max(worst, it->second);
  }
  return {method, d, worst};
}

inline std::vector<IdentityRow> identity_table(const std::vector<Point>& centers,
                                               const CoeffSetup& setup,
                                               const std::vector<Method>& methods,
                                               int dmin, int dmax, BasisCache& cache) {
  std::vector<IdentityRow> rows;
  for (int d = dmin; d <= dmax; ++d)
    for (Method m : methods) rows.push_back(identity_row(centers, setup, m, d, cache));
  return rows;
}

/// Kernel dimensions of Q^F_d and Q^S_d over mesh elements.
struct KernelDimRow {
  int d;
  int qf_min, qf_max;
  int qs_min, qs_max;
  bool ok(int expected) const {
    return qf_min == expected && qf_max == expected && qs_min == expected &&
           qs_max == expected;
  }
};

inline KernelDimRow kernel_dim_row(const std::vector<Point>& centers,
                                   const CoeffSetup& setup, int d,
                                   double rank_tol = -1.0) {
  KernelDimRow row{d, 1 << 30, -1, 1 << 30, -1};
  std::map<std::string, std::pair<int, int>> per_jet;
  for (const Point& c : centers) {
    const GradedPoly2 jet = setup.provider.taylor(c, d - 2, setup.params);
    const std::string key = detail::jet_key(jet, setup.params);
    auto it = per_jet.find(key);
    if (it == per_jet.end()) {
      const int qf = static_cast<int>(
          kernel_basis(assemble_QF(d, jet, setup.params), rank_tol).size());
      const int qs = static_cast<int>(
          kernel_basis(assemble_QS(d, jet, setup.params), rank_tol).size());
      it = per_jet.emplace(key, std::make_pair(qf, qs)).first;
    }
    row.qf_min = std::min(row.qf_min, it->second.first);
    row.qf_max = std::max(row.qf_max, it->second.first);
    row.qs_min = std::min(row.qs_min, it->second.second);
    row.qs_max = std::max(row.qs_max, it->second.second);
  }
  return row;
}

/// Max-merged residual decay over mesh elements for one (method, degree).
inline DecayResult decay_study(const std::vector<Point>& centers,
                               const CoeffSetup& setup, Method method, int d,
                               const std::vector<double>& radii, BasisCache& cache,
                               int samples_per_circle = 16) {
  DecayResult merged;
  merged.radii = radii;
  merged.values.assign(radii.size(), 0.0);
  for (const Point& c : centers) {
    const GradedPoly2 jet = setup.provider.taylor(c, d - 2, setup.params);
    const auto basis = cache.get_centered(method, d, jet, setup.params, c);
    const DecayResult r =
        residual_decay(basis, setup.provider, setup.params, radii, samples_per_circle);
    for (std::size_t i = 0; i < radii.size(); ++i)
      merged.values[i] = std::max(merged.values[i], r.values[i]);
  }
  merged.fit = fit_decay(merged.radii, merged.values);
  return merged;
}

/// Max-merged best-approximation errors over mesh elements.
struct BestApproxSummary {
  std::vector<double> radii;
  std::vector<double> p_values;
  std::vector<double> v_values;
  SlopeFit p_fit;
  SlopeFit v_fit;
};

inline BestApproxSummary best_approx_mesh(const std::vector<Point>& centers,
                                          const CoeffSetup& setup, Method method, int d,
                                          const std::vector<double>& radii,
                                          BasisCache& cache,
                                          int samples_per_circle = 16) {
  const ExactSolution exact{setup.params};
  BestApproxSummary out;
  out.radii = radii;
  out.p_values.assign(radii.size(), 0.0);
  out.v_values.assign(radii.size(), 0.0);
  for (const Point& c : centers) {
    const GradedPoly2 jet = setup.provider.taylor(c, d - 2, setup.params);
    const auto basis = cache.get_centered(method, d, jet, setup.params, c);
    const BestApproxResult r = best_approx_study(basis, exact, radii, samples_per_circle);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      out.p_values[i] = std::max(out.p_values[i], r.p_values[i]);
      out.v_values[i] = std::max(out.v_values[i], r.v_values[i]);
    }
  }
  out.p_fit = fit_decay(out.radii, out.p_values);
  out.v_fit = fit_decay(out.radii, out.v_values);
  return out;
}

/// Relative projection residual of span(B) onto span(A): the worst
/// ||b - P_A b|| / ||b|| over the packed coefficient vectors of B.
inline double span_projection_residual(const std::vector<QTFunction>& A,
                                       const std::vector<QTFunction>& B) {
  if (A.empty() || B.empty())
    throw std::invalid_argument("span_projection_residual: empty basis");
  Mat MA(pack_system_vector(A[0]).size(), static_cast<Eigen::Index>(A.size()));
  for (std::size_t j = 0; j < A.size(); ++j)
    MA.col(static_cast<Eigen::Index>(j)) = pack_system_vector(A[j]);
  Eigen::BDCSVD<Mat> svd(MA, Eigen::ComputeThinU);
  const Mat U = svd.matrixU();
  double worst = 0.0;
  for (const auto& f : B) {
    const Vec b = pack_system_vector(f);
    const Vec res = b - U * (U.adjoint() * b);
    worst = std::max(worst, res.norm() / b.norm());
  }
  return worst;
}

/// Symmetric worst-case span disagreement between two bases.
inline double span_distance(const std::vector<QTFunction>& A,
                            const std::vector<QTFunction>& B) {
  return std::max(span_projection_residual(A, B), span_projection_residual(B, A));
}

/// Mean per-element construction time in seconds, median over repeats.
/// Deliberately bypasses the cache; jets are precomputed outside the timer.
inline double time_per_element(Method method, int d, const CoeffSetup& setup,
                               const std::vector<Point>& centers, int repeats = 3,
                               double rank_tol = -1.0) {
  std::vector<GradedPoly2> jets;
  jets.reserve(centers.size());
  for (const Point& c : centers)
    jets.push_back(setup.provider.taylor(c, d - 2, setup.params));
  std::vector<double> samples;
  for (int rep = 0; rep < repeats; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t e = 0; e < centers.size(); ++e) {
      volatile double sink =
          construct_basis(method, d, jets[e], setup.params, centers[e], rank_tol)[0]
              .max_abs_coeff();
      (void)sink;
    }
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double>(t1 - t0).count() /
                      static_cast<double>(centers.size()));
  }
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

// ---- CSV / gnuplot emission ----

inline std::string identity_csv(const std::vector<IdentityRow>& rows) {
  std::ostringstream out;
  out << "method,d,max_linf\n";
  out.precision(17);
  for (const auto& r : rows)
    out << method_name(r.method) << ',' << r.d << ',' << r.max_linf << '\n';
  return out.str();
}

inline std::string decay_csv(Method method, int d, const DecayResult& r) {
  std::ostringstream out;
  out << "method,d,r,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < r.radii.size(); ++i)
    out << method_name(method) << ',' << d << ',' << r.radii[i] << ',' << r.values[i]
        << '\n';
  return out.str();
}

inline void append_slope_row(std::ostringstream& out, Method method, int d,
                             const std::string& quantity, const SlopeFit& fit) {
  out << method_name(method) << ',' << d << ',' << quantity << ',' << fit.slope << ','
      << fit.plateau_level << ',' << (fit.plateau_detected ? 1 : 0) << '\n';
}

inline std::string slopes_csv_header() {
  return "method,d,quantity,slope,plateau,plateau_detected\n";
}

inline std::string flops_csv(int dmax) {
  std::ostringstream out;
  out << "d,T,Ttilde,expl1,expl2,expl1_basis,expl2_basis,alge1_model,alge2_model\n";
  for (const auto& r : complexity_table(dmax))
    out << r.d << ',' << r.conv_terms << ',' << r.conv_adds << ',' << r.expl1_total
        << ',' << r.expl2_total << ',' << r.expl1_basis << ',' << r.expl2_basis << ','
        << r.alge1_svd_model << ',' << (r.alge2_svd_model + r.alge2_multiply_model)
        << '\n';
  return out.str();
}

/// gnuplot script plotting a decay CSV on log-log axes.
inline std::string decay_gnuplot(const std::string& csv_path,
                                 const std::string& title) {
  std::ostringstream out;
  out << "set datafile separator ','\n"
      << "set logscale xy\n"
      << "set xlabel 'r'\n"
      << "set ylabel 'max residual'\n"
      << "set title '" << title << "'\n"
      << "plot '" << csv_path << "' every ::1 using 3:4 with linespoints notitle\n";
  return out.str();
}

}  // namespace qtb

#endif
