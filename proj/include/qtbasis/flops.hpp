#ifndef QTBASIS_FLOPS_HPP
#define QTBASIS_FLOPS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtb {

/// Counter of arithmetic work. One complex multiply charges 1 mul, one
/// complex add charges 1 add; no distinction between real and complex
/// arithmetic. Data-independent factors (e.g. (l+1)/(k+1-l), i*omega*rho)
/// are treated as precomputed and charge nothing.
struct FlopLedger {
  std::int64_t adds = 0;
  std::int64_t muls = 0;

  void add(std::int64_t n = 1) { adds += n; }
  void mul(std::int64_t n = 1) { muls += n; }
  std::int64_t total() const { return adds + muls; }

  FlopLedger& operator+=(const FlopLedger& o) {
    adds += o.adds;
    muls += o.muls;
    return *this;
  }
};

/// Per-substep ledgers for one individual basis-function construction.
struct BuildCost {
  FlopLedger convolution;       // truncated coefficient products
  FlopLedger solve_divergence;  // coupled construction
  FlopLedger solve_gradient;    // coupled construction
  FlopLedger solve_laplacian;   // decoupled construction
  FlopLedger comp_grad;         // decoupled construction

  FlopLedger total() const {
    FlopLedger t;
    t += convolution;
    t += solve_divergence;
    t += solve_gradient;
    t += solve_laplacian;
    t += comp_grad;
    return t;
  }
};

namespace detail {
inline std::int64_t exact_div(std::int64_t num, std::int64_t den) {
  if (num % den != 0)
    throw std::logic_error("complexity formula not integral: " +
                           std::to_string(num) + "/" + std::to_string(den));
  return num / den;
}
}  // namespace detail

/// Closed-form operation counts for one degree d.
struct ComplexityRow {
  int d = 0;
  std::int64_t conv_terms = 0;        // T_d, multiplies in the coefficient products
  std::int64_t conv_adds = 0;         // T~_d, additions in the coefficient products
  std::int64_t expl1_total = 0;       // one coupled construction
  std::int64_t expl2_total = 0;       // one decoupled construction
  std::int64_t expl1_basis = 0;       // (2d+1) coupled constructions
  std::int64_t expl2_basis = 0;       // (2d+1) decoupled constructions
  std::int64_t alge1_svd_model = 0;   // model cost of the full-system SVD
  std::int64_t alge2_svd_model = 0;   // model cost of the pressure SVD
  std::int64_t alge2_multiply_model = 0;  // model cost of the gradient multiply
};

inline ComplexityRow closed_forms(int d) {
  if (d < 2) throw std::invalid_argument("closed_forms requires d >= 2");
  const std::int64_t n = d;
  ComplexityRow r;
  r.d = d;
  r.conv_terms = detail::exact_div((n - 1) * n * (n + 1) * (n + 2), 24);
  r.conv_adds = d >= 4 ? detail::exact_div((n - 3) * (n - 2) * (n - 1) * n, 24) : 0;
  r.expl1_total =
      detail::exact_div(n * n * n * n - 2 * n * n * n + 35 * n * n - 22 * n + 12, 12);
  r.expl2_total =
      detail::exact_div(n * n * n * n - 2 * n * n * n + 35 * n * n - 10 * n, 12);
  r.expl1_basis = (2 * n + 1) * r.expl1_total;
  r.expl2_basis = (2 * n + 1) * r.expl2_total;
  r.alge1_svd_model = detail::exact_div(
      n * n *
          (27 * n * n * n * n + 45 * n * n * n + 30 * n * n + 9 * n + 1),
      2);
  r.alge2_svd_model =
      detail::exact_div(n * n * (n * n * n * n - n * n * n - n + 1), 2);
  r.alge2_multiply_model =
      ((n + 1) * (n + 2) - 1) * n * (n + 1) * (2 * n + 1);
  return r;
}

/// Multiplication count of one truncated product at homogeneous degree M.
inline std::int64_t conv_mul_count(int M) {
  const std::int64_t m = M;
  return detail::exact_div((m + 1) * (m + 2) * (m + 3), 6);
}

/// Addition count of one truncated product at homogeneous degree M.
inline std::int64_t conv_add_count(int M) {
  if (M == 0) return 0;
  const std::int64_t m = M;
  return detail::exact_div((m - 1) * m * (m + 1), 6);
}

inline std::vector<ComplexityRow> complexity_table(int dmax) {
  std::vector<ComplexityRow> rows;
  for (int d = 2; d <= dmax; ++d) rows.push_back(closed_forms(d));
  return rows;
}

}  // namespace qtb

#endif
