#pragma once

// Dense complex matrices and the tensor-product primitives built on them.
//
// Composite indices of M_n (x) M_m use the fixed row-major convention
// (i, k) -> i * m + k, where i indexes the first factor and k the second.
// Transposes are entrywise in the standard computational basis.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "entanglecone/errors.hpp"
#include "entanglecone/random.hpp"

namespace entanglecone {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

// Numerical thresholds shared by every positivity verdict.
struct Tolerances {
  double psd_slack = 1e-9;
  double eig_offdiag = 1e-12;
  double convergence = 1e-10;

  void validate() const {
    for (double t : {psd_slack, eig_offdiag, convergence}) {
      if (!(t > 0.0 && t < 1e-3)) {
        throw DomainError("tolerances must lie in (0, 1e-3)");
      }
    }
  }
};

// Factor dimensions of a bipartite space M_n (x) M_m.
struct Dims {
  std::size_t n = 0;
  std::size_t m = 0;

  std::size_t total() const { return n * m; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

enum class Side { First, Second };

class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("entry count " + std::to_string(data_.size()) + " does not match " +
                           std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (const Complex& z : data_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("matrix entries must be finite");
      }
    }
  }

  // Row-major nested initializer, mostly for tests.
  Matrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("ragged matrix initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

  static Matrix identity(std::size_t n) {
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
  }

  // Matrix unit e_ij of an n x n algebra.
  static Matrix unit(std::size_t n, std::size_t i, std::size_t j) {
    Matrix out(n, n);
    out(i, j) = 1.0;
    return out;
  }

  static Matrix diagonal(std::span<const double> d) {
    Matrix out(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) out(i, i) = d[i];
    return out;
  }

  static Matrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  // Single column holding v.
  static Matrix column(std::span<const Complex> v) {
    return Matrix(v.size(), 1, std::vector<Complex>(v.begin(), v.end()));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Complex> entries() const { return data_; }
  std::span<Complex> entries() { return data_; }

  Vector col(std::size_t c) const {
    Vector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  Matrix transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  Matrix conj() const {
    Matrix out = *this;
    for (Complex& z : out.data_) z = std::conj(z);
    return out;
  }

  Matrix adjoint() const {
    Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }

  Matrix& operator*=(Complex s) {
    for (Complex& z : data_) z *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }
  friend Matrix operator*(Matrix a, Complex s) { return a *= s; }
  friend Matrix operator*(Complex s, Matrix a) { return a *= s; }
  friend Matrix operator*(Matrix a, double s) { return a *= Complex(s); }
  friend Matrix operator*(double s, Matrix a) { return a *= Complex(s); }
  friend Matrix operator/(Matrix a, double s) { return a *= Complex(1.0 / s); }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) {
      throw DimensionError("product of " + a.shape() + " and " + b.shape());
    }
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex{}) continue;
        const Complex* brow = &b.data_[k * b.cols_];
        Complex* orow = &out.data_[i * out.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
      }
    }
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw DimensionError("shape mismatch " + shape() + " vs " + o.shape());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

inline Complex trace(const Matrix& x) {
  if (!x.is_square()) throw DimensionError("trace of non-square " + x.shape());
  Complex t{};
  for (std::size_t i = 0; i < x.rows(); ++i) t += x(i, i);
  return t;
}

inline double frobenius_norm(const Matrix& x) {
  double s = 0.0;
  for (const Complex& z : x.entries()) s += std::norm(z);
  return std::sqrt(s);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("shape mismatch " + a.shape() + " vs " + b.shape());
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    d = std::max(d, std::abs(a.entries()[i] - b.entries()[i]));
  }
  return d;
}

// Tr(a b) without forming the product.
inline Complex trace_product(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) {
    throw DimensionError("trace_product of " + a.shape() + " and " + b.shape());
  }
  Complex t{};
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
  return t;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline Matrix hermitian_part(const Matrix& x) { return (x + x.adjoint()) * 0.5; }

// ||x - x*||_F
inline double hermiticity_defect(const Matrix& x) {
  if (!x.is_square()) throw DimensionError("expected square matrix, got " + x.shape());
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) s += std::norm(x(i, j) - std::conj(x(j, i)));
  return std::sqrt(s);
}

inline Complex inner(std::span<const Complex> u, std::span<const Complex> v) {
  if (u.size() != v.size()) throw DimensionError("inner product of unequal lengths");
  Complex s{};
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

inline double norm(std::span<const Complex> v) { return std::sqrt(std::real(inner(v, v))); }

inline Vector apply(const Matrix& a, std::span<const Complex> v) {
  if (a.cols() != v.size()) throw DimensionError("matrix-vector shape mismatch");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s{};
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

// <v, x v>
inline Complex expectation(const Matrix& x, std::span<const Complex> v) { return inner(v, apply(x, v)); }

// v v*
inline Matrix outer(std::span<const Complex> v) {
  Matrix out(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out(i, j) = v[i] * std::conj(v[j]);
  return out;
}

inline Vector kron(std::span<const Complex> x, std::span<const Complex> y) {
  Vector out(x.size() * y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < y.size(); ++k) out[i * y.size() + k] = x[i] * y[k];
  return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t br = b.rows();
  const std::size_t bc = b.cols();
  Matrix out(a.rows() * br, a.cols() * bc);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < br; ++k)
        for (std::size_t l = 0; l < bc; ++l) out(i * br + k, j * bc + l) = aij * b(k, l);
    }
  return out;
}

namespace detail {

inline void require_bipartite(const Matrix& x, Dims dims) {
  if (dims.n == 0 || dims.m == 0) throw DimensionError("factor dimensions must be positive");
  if (!x.is_square() || x.rows() != dims.total()) {
    throw DimensionError("expected " + std::to_string(dims.total()) + "x" + std::to_string(dims.total()) +
                         " bipartite matrix, got " + x.shape());
  }
}

}  // namespace detail

// Transpose of one tensor factor. Second: out[(i,k),(j,l)] = x[(i,l),(j,k)];
// First: out[(i,k),(j,l)] = x[(j,k),(i,l)].
inline Matrix partial_transpose(const Matrix& x, Dims dims, Side side) {
  detail::require_bipartite(x, dims);
  const auto [n, m] = dims;
  Matrix out(n * m, n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < m; ++l) {
          out(i * m + k, j * m + l) = side == Side::Second ? x(i * m + l, j * m + k) : x(j * m + k, i * m + l);
        }
  return out;
}

// Trace over one tensor factor; First leaves an m x m matrix, Second an n x n.
inline Matrix partial_trace(const Matrix& x, Dims dims, Side side) {
  detail::require_bipartite(x, dims);
  const auto [n, m] = dims;
  if (side == Side::First) {
    Matrix out(m, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) out(k, l) += x(i * m + k, i * m + l);
    return out;
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k) out(i, j) += x(i * m + k, j * m + k);
  return out;
}

// The m x m block at first-factor position (i, j).
inline Matrix block(const Matrix& x, Dims dims, std::size_t i, std::size_t j) {
  const std::size_t m = dims.m;
  Matrix out(m, m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t l = 0; l < m; ++l) out(k, l) = x(i * m + k, j * m + l);
  return out;
}

// P = sum_ij e_ij (x) e_ij, n times the maximally entangled projection.
inline Matrix maximally_entangled_p(std::size_t n) {
  Matrix p(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i * n + i, j * n + j) = 1.0;
  return p;
}

// SWAP on C^n (x) C^n.
inline Matrix swap_matrix(std::size_t n) {
  Matrix s(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) s(i * n + k, k * n + i) = 1.0;
  return s;
}

// Random generators used by tests, the search and the witness library.
namespace random {

inline Matrix gaussian(SplitMix64& rng, std::size_t rows, std::size_t cols) {
  Matrix out(rows, cols);
  for (Complex& z : out.entries()) z = rng.complex_gaussian();
  return out;
}

inline Vector unit_vector(SplitMix64& rng, std::size_t n) {
  Vector v(n);
  for (Complex& z : v) z = rng.complex_gaussian();
  const double nv = norm(v);
  for (Complex& z : v) z /= nv;
  return v;
}

inline Matrix hermitian(SplitMix64& rng, std::size_t n) { return hermitian_part(gaussian(rng, n, n)); }

// A A* with A of shape n x rank, normalized to unit trace.
inline Matrix density(SplitMix64& rng, std::size_t n, std::size_t rank) {
  const Matrix a = gaussian(rng, n, rank);
  Matrix rho = a * a.adjoint();
  return rho / std::real(trace(rho));
}

// Haar-ish unitary from Gram-Schmidt on a complex Gaussian matrix.
inline Matrix unitary(SplitMix64& rng, std::size_t n) {
  Matrix g = gaussian(rng, n, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      Complex proj{};
      for (std::size_t r = 0; r < n; ++r) proj += std::conj(g(r, p)) * g(r, c);
      for (std::size_t r = 0; r < n; ++r) g(r, c) -= proj * g(r, p);
    }
    double nc = 0.0;
    for (std::size_t r = 0; r < n; ++r) nc += std::norm(g(r, c));
    nc = std::sqrt(nc);
    for (std::size_t r = 0; r < n; ++r) g(r, c) /= nc;
  }
  return g;
}

}  // namespace random

}  // namespace entanglecone
