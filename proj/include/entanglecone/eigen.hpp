#pragma once

// Hermitian eigenproblems by cyclic complex Jacobi rotations, and the
// positivity primitives that reduce to them.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "entanglecone/matrix.hpp"

namespace entanglecone {

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column c pairs with values[c]
  int sweeps = 0;

  double min_value() const { return values.back(); }
  Vector min_vector() const { return vectors.col(vectors.cols() - 1); }
};

inline constexpr int kMaxJacobiSweeps = 100;

// x = V diag(values) V*. Input is symmetrized; asymmetry beyond
// tol.convergence * ||x||_F is rejected.
inline EigenDecomposition hermitian_eigen(const Matrix& x, const Tolerances& tol = {},
                                          int max_sweeps = kMaxJacobiSweeps) {
  if (!x.is_square()) throw DimensionError("hermitian_eigen needs a square matrix, got " + x.shape());
  const double xnorm = frobenius_norm(x);
  if (hermiticity_defect(x) > tol.convergence * xnorm) {
    throw DomainError("matrix is not Hermitian within tolerance");
  }
  const std::size_t n = x.rows();
  Matrix a = hermitian_part(x);
  Matrix v = Matrix::identity(n);

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * std::norm(a(p, q));
    return std::sqrt(s);
  };

  const double target = tol.eig_offdiag * xnorm;
  int sweeps = 0;
  while (off_mass() > target) {
    if (sweeps == max_sweeps) throw NumericalError("Jacobi eigensolver did not converge");
    ++sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const Complex phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // Rotation U with U_pp = U_qq = c, U_pq = s e^{i arg}, U_qp = -s e^{-i arg};
        // only columns p, q change off the 2x2 block and rows mirror them.
        const Complex sp = s * phase;
        const Complex sm = s * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - sm * akq;
          a(k, q) = sp * akp + c * akq;
          a(p, k) = std::conj(a(k, p));
          a(q, k) = std::conj(a(k, q));
        }
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - sm * vkq;
          v(k, q) = sp * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  out.sweeps = sweeps;
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

// Slack scale shared by every PSD verdict: relative to max(1, ||x||_F).
inline double psd_threshold(const Matrix& x, const Tolerances& tol) {
  return tol.psd_slack * std::max(1.0, frobenius_norm(x));
}

struct PsdResult {
  bool psd = true;
  double min_eigenvalue = 0.0;
  std::optional<Vector> witness;  // unit v with <v, x v> = min_eigenvalue, set when !psd

  explicit operator bool() const { return psd; }
};

inline PsdResult is_psd(const Matrix& x, const Tolerances& tol = {}) {
  const EigenDecomposition ed = hermitian_eigen(x, tol);
  PsdResult out;
  out.min_eigenvalue = ed.values.empty() ? 0.0 : ed.min_value();
  out.psd = out.min_eigenvalue >= -psd_threshold(x, tol);
  if (!out.psd) out.witness = ed.min_vector();
  return out;
}

inline Matrix support_projection(const Matrix& x, const Tolerances& tol = {}) {
  const EigenDecomposition ed = hermitian_eigen(x, tol);
  const double cut = psd_threshold(x, tol);
  if (!ed.values.empty() && ed.min_value() < -cut) {
    throw DomainError("support_projection of a non-PSD matrix");
  }
  Matrix p(x.rows(), x.rows());
  for (std::size_t c = 0; c < ed.values.size() && ed.values[c] > cut; ++c) {
    p += outer(ed.vectors.col(c));
  }
  return p;
}

// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
inline Matrix psd_projection(const Matrix& x, const Tolerances& tol = {}) {
  const EigenDecomposition ed = hermitian_eigen(x, tol);
  Matrix out(x.rows(), x.rows());
  for (std::size_t c = 0; c < ed.values.size() && ed.values[c] > 0.0; ++c) {
    out += outer(ed.vectors.col(c)) * ed.values[c];
  }
  return out;
}

// Applies f to the spectrum of a Hermitian matrix.
template <class F>
Matrix spectral_function(const Matrix& x, F&& f, const Tolerances& tol = {}) {
  const EigenDecomposition ed = hermitian_eigen(x, tol);
  Matrix out(x.rows(), x.rows());
  for (std::size_t c = 0; c < ed.values.size(); ++c) {
    const double fv = f(ed.values[c]);
    if (fv != 0.0) out += outer(ed.vectors.col(c)) * fv;
  }
  return out;
}

}  // namespace entanglecone
