#ifndef QTBASIS_ALGEBRAIC_BUILDERS_HPP
#define QTBASIS_ALGEBRAIC_BUILDERS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qtbasis/explicit_builders.hpp"

namespace qtb {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

/// Sparse operator matrix in triplet form with a dense conversion.
struct OpMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::tuple<int, int, cplx>> entries;

  void push(int r, int c, cplx v) {
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw std::out_of_range("OpMatrix::push: index out of range");
    if (v != cplx{}) entries.emplace_back(r, c, v);
  }

  Mat to_dense() const {
    Mat m = Mat::Zero(rows, cols);
    for (const auto& [r, c, v] : entries) m(r, c) += v;
    return m;
  }

  Vec apply(const Vec& x) const {
    if (x.size() != cols) throw std::invalid_argument("OpMatrix::apply: size mismatch");
    Vec y = Vec::Zero(rows);
    for (const auto& [r, c, v] : entries) y(r) += v * x(c);
    return y;
  }
};

/// Numbering of the canonical basis of P^pdeg x (P^vdeg)^2: elements
/// phi^k_{l,i} are gathered by increasing k, within k by increasing
/// i in {1,2,3} (pressure, vx, vy), within (k,i) by increasing l.
/// Either polynomial slot may be absent at a level (k > its degree).
struct SystemNumbering {
  int pdeg = -1;
  int vdeg = -1;
  std::vector<int> block_offset;  // offset of the k-block, k = 0..max(pdeg,vdeg)

  SystemNumbering(int pressure_degree, int velocity_degree)
      : pdeg(pressure_degree), vdeg(velocity_degree) {
    const int kmax = std::max(pdeg, vdeg);
    block_offset.assign(static_cast<std::size_t>(kmax) + 2, 0);
    for (int k = 0; k <= kmax; ++k) {
      int width = 0;
      if (k <= pdeg) width += k + 1;
      if (k <= vdeg) width += 2 * (k + 1);
      block_offset[static_cast<std::size_t>(k) + 1] =
          block_offset[static_cast<std::size_t>(k)] + width;
    }
  }

  int size() const { return block_offset.back(); }

  /// i = 1 pressure, 2 vx, 3 vy.
  int index(int k, int i, int l) const {
    const int kmax = std::max(pdeg, vdeg);
    if (k < 0 || k > kmax || l < 0 || l > k) throw std::out_of_range("SystemNumbering");
    if (i == 1) {
      if (k > pdeg) throw std::out_of_range("SystemNumbering: no pressure slot");
      return block_offset[static_cast<std::size_t>(k)] + l;
    }
    if ((i != 2 && i != 3) || k > vdeg)
      throw std::out_of_range("SystemNumbering: no velocity slot");
    const int pwidth = k <= pdeg ? k + 1 : 0;
    return block_offset[static_cast<std::size_t>(k)] + pwidth + (i - 2) * (k + 1) + l;
  }
};

/// Index of phi^k_l in the canonical basis of a scalar polynomial space.
inline int scalar_index(int k, int l) {
  if (k < 0 || l < 0 || l > k) throw std::out_of_range("scalar_index");
  return k * (k + 1) / 2 + l;
}

inline int scalar_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Matrix of the first-order operator Q^F_d on the numbering above.
/// `coeff_taylor` is the jet of omega^2/c^2 about the center, orders 0..d-2
/// at least; the kappa block is scaled by -i/(omega*rho) accordingly.
inline OpMatrix assemble_QF(int d, const GradedPoly2& coeff_taylor,
                            const AcousticParams& params) {
  if (d < 2) throw std::invalid_argument("assemble_QF: d < 2");
  const SystemNumbering dom(d, d - 1), cod(d - 2, d - 1);
  OpMatrix M;
  M.rows = cod.size();
  M.cols = dom.size();
  const cplx iwr = params.i_omega_rho();
  const cplx kscale = -cplx(0.0, 1.0) / (params.omega * params.rho);

  for (int k = 0; k <= d; ++k)
    for (int l = 0; l <= k; ++l) {
      const int col = dom.index(k, 1, l);
      for (int m = 0; m <= d - 2 - k; ++m)
        for (int j = 0; j <= m; ++j)
          M.push(cod.index(m + k, 1, j + l), col, kscale * coeff_taylor.coeff(m, j));
      if (k > 0 && l > 0)
        M.push(cod.index(k - 1, 2, l - 1), col, static_cast<double>(l));
      if (k > 0 && k - l > 0)
        M.push(cod.index(k - 1, 3, l), col, static_cast<double>(k - l));
    }
  for (int k = 0; k <= d - 1; ++k)
    for (int l = 0; l <= k; ++l) {
      const int col2 = dom.index(k, 2, l);
      M.push(cod.index(k, 2, l), col2, -iwr);
      if (k > 0 && l > 0)
        M.push(cod.index(k - 1, 1, l - 1), col2, static_cast<double>(l));
      const int col3 = dom.index(k, 3, l);
      M.push(cod.index(k, 3, l), col3, -iwr);
      if (k > 0 && k - l > 0) M.push(cod.index(k - 1, 1, l), col3, static_cast<double>(k - l));
    }
  return M;
}

/// Matrix of the second-order operator Q^S_d (scalar spaces, canonical
/// numbering). The kappa block carries the omega^2/c^2 jet directly.
inline OpMatrix assemble_QS(int d, const GradedPoly2& coeff_taylor,
                            const AcousticParams& params) {
  (void)params;
  if (d < 2) throw std::invalid_argument("assemble_QS: d < 2");
  OpMatrix M;
  M.rows = scalar_dim(d - 2);
  M.cols = scalar_dim(d);
  for (int k = 0; k <= d; ++k)
    for (int l = 0; l <= k; ++l) {
      const int col = scalar_index(k, l);
      if (k > 1 && l > 1)
        M.push(scalar_index(k - 2, l - 2), col, static_cast<double>(l * (l - 1)));
      if (k > 1 && k - l > 1)
        M.push(scalar_index(k - 2, l), col, static_cast<double>((k - l) * (k - l - 1)));
      for (int m = 0; m <= d - 2 - k; ++m)
        for (int j = 0; j <= m; ++j)
          M.push(scalar_index(m + k, j + l), col, coeff_taylor.coeff(m, j));
    }
  return M;
}

/// Matrix of the gradient-scaling operator G_d from P^d to (P^{d-1})^2; the
/// codomain is numbered by increasing k, vx before vy within a level.
inline OpMatrix assemble_G(int d, const AcousticParams& params) {
  if (d < 1) throw std::invalid_argument("assemble_G: d < 1");
  const SystemNumbering cod(-1, d - 1);
  OpMatrix M;
  M.rows = cod.size();
  M.cols = scalar_dim(d);
  const cplx inv = params.inv_i_omega_rho();
  for (int k = 1; k <= d; ++k)
    for (int l = 0; l <= k; ++l) {
      const int col = scalar_index(k, l);
      if (l > 0) M.push(cod.index(k - 1, 2, l - 1), col, static_cast<double>(l) * inv);
      if (k - l > 0) M.push(cod.index(k - 1, 3, l), col, static_cast<double>(k - l) * inv);
    }
  return M;
}

inline double default_rank_tol(int rows, int cols) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * 64.0;
}

/// Orthonormal kernel basis via a full SVD: rank r counts singular values
/// above rank_tol times the largest, and the kernel is the last n-r right
/// singular vectors. An all-zero matrix yields the identity columns.
inline std::vector<Vec> kernel_basis(const OpMatrix& M, double rank_tol = -1.0) {
  if (rank_tol < 0.0) rank_tol = default_rank_tol(M.rows, M.cols);
  const Mat A = M.to_dense();
  std::vector<Vec> ker;
  if (A.norm() == 0.0) {
    for (int c = 0; c < M.cols; ++c) ker.push_back(Vec::Unit(M.cols, c));
    return ker;
  }
  Eigen::BDCSVD<Mat> svd(A, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double cutoff = rank_tol * sigma(0);
  int rank = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cutoff) ++rank;
  for (int c = rank; c < M.cols; ++c) ker.push_back(svd.matrixV().col(c));
  return ker;
}

/// Slices a Q^F-domain coefficient vector into (p, vx, vy).
inline QTFunction unpack_system_vector(int d, const Vec& x, Point center = {0.0, 0.0}) {
  const SystemNumbering dom(d, d - 1);
  if (x.size() != dom.size())
    throw std::invalid_argument("unpack_system_vector: size mismatch");
  QTFunction f;
  f.degree = d;
  f.center = center;
  f.p = GradedPoly2(d);
  f.vx = GradedPoly2(d - 1);
  f.vy = GradedPoly2(d - 1);
  for (int k = 0; k <= d; ++k)
    for (int l = 0; l <= k; ++l) {
      f.p.at(k, l) = x(dom.index(k, 1, l));
      if (k <= d - 1) {
        f.vx.at(k, l) = x(dom.index(k, 2, l));
        f.vy.at(k, l) = x(dom.index(k, 3, l));
      }
    }
  return f;
}

inline Vec pack_system_vector(const QTFunction& f) {
  const int d = f.degree;
  const SystemNumbering dom(d, d - 1);
  Vec x = Vec::Zero(dom.size());
  for (int k = 0; k <= d; ++k)
    for (int l = 0; l <= k; ++l) {
      x(dom.index(k, 1, l)) = f.p.coeff(k, l);
      if (k <= d - 1) {
        x(dom.index(k, 2, l)) = f.vx.coeff(k, l);
        x(dom.index(k, 3, l)) = f.vy.coeff(k, l);
      }
    }
  return x;
}

inline GradedPoly2 unpack_scalar_vector(int degree, const Vec& x) {
  if (x.size() != scalar_dim(degree))
    throw std::invalid_argument("unpack_scalar_vector: size mismatch");
  GradedPoly2 p(degree);
  for (int k = 0; k <= degree; ++k)
    for (int l = 0; l <= k; ++l) p.at(k, l) = x(scalar_index(k, l));
  return p;
}

inline Vec pack_scalar_vector(int degree, const GradedPoly2& p) {
  Vec x = Vec::Zero(scalar_dim(degree));
  for (int k = 0; k <= degree; ++k)
    for (int l = 0; l <= k; ++l) x(scalar_index(k, l)) = p.coeff(k, l);
  return x;
}

/// SVD-kernel basis constructions. ALGE1 unpacks the kernel of Q^F_d
/// directly; ALGE2 takes the kernel of Q^S_d as pressures and derives the
/// velocities through the gradient-scaling code path shared with the
/// decoupled builder.
inline std::vector<QTFunction> construct_basis_algebraic(Method method, int d,
                                                         const GradedPoly2& coeff_taylor,
                                                         const AcousticParams& params,
                                                         Point center = {0.0, 0.0},
                                                         double rank_tol = -1.0) {
  if (method != Method::Alge1 && method != Method::Alge2)
    throw std::invalid_argument("construct_basis_algebraic: algebraic methods only");
  const int expected = 2 * d + 1;
  std::vector<QTFunction> basis;
  basis.reserve(static_cast<std::size_t>(expected));
  if (method == Method::Alge1) {
    const OpMatrix M = assemble_QF(d, coeff_taylor, params);
    auto ker = kernel_basis(M, rank_tol);
    if (static_cast<int>(ker.size()) != expected)
      throw std::runtime_error("rank deficiency: ker Q^F_" + std::to_string(d) +
                               " has dimension " + std::to_string(ker.size()) +
                               ", expected " + std::to_string(expected));
    for (const auto& v : ker) basis.push_back(unpack_system_vector(d, v, center));
  } else {
    const OpMatrix M = assemble_QS(d, coeff_taylor, params);
    auto ker = kernel_basis(M, rank_tol);
    if (static_cast<int>(ker.size()) != expected)
      throw std::runtime_error("rank deficiency: ker Q^S_" + std::to_string(d) +
                               " has dimension " + std::to_string(ker.size()) +
                               ", expected " + std::to_string(expected));
    for (const auto& v : ker) {
      QTFunction f;
      f.degree = d;
      f.center = center;
      f.p = unpack_scalar_vector(d, v);
      auto [vx, vy] = velocity_from_pressure(f.p, params);
      f.vx = std::move(vx);
      f.vy = std::move(vy);
      basis.push_back(std::move(f));
    }
  }
  return basis;
}

/// Basis by any of the four methods.
inline std::vector<QTFunction> construct_basis(Method method, int d,
                                               const GradedPoly2& coeff_taylor,
                                               const AcousticParams& params,
                                               Point center = {0.0, 0.0},
                                               double rank_tol = -1.0) {
  if (method == Method::Expl1 || method == Method::Expl2)
    return construct_basis_explicit(method, d, coeff_taylor, params, center);
  return construct_basis_algebraic(method, d, coeff_taylor, params, center, rank_tol);
}

/// Plain PBM (P1) image of the sparsity pattern, one pixel per entry.
inline std::string sparsity_pbm(const OpMatrix& M) {
  std::vector<std::vector<char>> grid(
      static_cast<std::size_t>(M.rows),
      std::vector<char>(static_cast<std::size_t>(M.cols), 0));
  for (const auto& [r, c, v] : M.entries)
    grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = 1;
  std::string out = "P1\n" + std::to_string(M.cols) + " " + std::to_string(M.rows) + "\n";
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c] ? '1' : '0';
      out += c + 1 < row.size() ? ' ' : '\n';
    }
  }
  return out;
}

/// Triplet text dump: one "row col re im" line per entry.
inline std::string triplet_dump(const OpMatrix& M) {
  std::string out;
  for (const auto& [r, c, v] : M.entries)
    out += std::to_string(r) + " " + std::to_string(c) + " " +
           std::to_string(v.real()) + " " + std::to_string(v.imag()) + "\n";
  return out;
}

}  // namespace qtb

#endif
