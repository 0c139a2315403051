#pragma once

// Linear maps M_n -> M_m, their Choi matrices C = sum_ij e_ij (x) f(e_ij),
// and the dual bipartite functionals f~(a (x) b) = Tr(f(a) b^T), whose
// density matrix is C^T.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "entanglecone/eigen.hpp"
#include "entanglecone/matrix.hpp"

namespace entanglecone {

// One term x -> Tr(omega_density x) b of a Holevo-form map.
struct HolevoTerm {
  Matrix omega_density;  // n x n PSD
  Matrix b;              // m x m PSD, nonzero
};

// Entanglement-breaking representation x -> sum_k Tr(omega_k x) b_k.
struct HolevoForm {
  std::vector<HolevoTerm> terms;

  void validate(const Tolerances& tol = {}) const {
    if (terms.empty()) throw DomainError("Holevo form needs at least one term");
    const std::size_t n = terms.front().omega_density.rows();
    const std::size_t m = terms.front().b.rows();
    for (const auto& t : terms) {
      if (!t.omega_density.is_square() || t.omega_density.rows() != n || !t.b.is_square() || t.b.rows() != m) {
        throw DimensionError("Holevo terms have inconsistent shapes");
      }
      if (!is_psd(t.omega_density, tol)) throw DomainError("Holevo functional density is not PSD");
      if (!is_psd(t.b, tol)) throw DomainError("Holevo output operator is not PSD");
      if (frobenius_norm(t.b) == 0.0) throw DomainError("Holevo output operator is zero");
    }
  }

  std::size_t dim_in() const { return terms.empty() ? 0 : terms.front().omega_density.rows(); }
  std::size_t dim_out() const { return terms.empty() ? 0 : terms.front().b.rows(); }
};

struct ChoiGiven {};
using KrausList = std::vector<Matrix>;
using Provenance = std::variant<ChoiGiven, KrausList, HolevoForm>;

// A linear map M_n -> M_m held canonically by its Choi matrix.
class MatrixMap {
 public:
  MatrixMap() = default;

  MatrixMap(std::size_t dim_in, std::size_t dim_out, Matrix choi, Provenance provenance = ChoiGiven{},
            const Tolerances& tol = {})
      : dim_in_(dim_in), dim_out_(dim_out), choi_(std::move(choi)), provenance_(std::move(provenance)) {
    if (dim_in_ == 0 || dim_out_ == 0) throw DimensionError("map dimensions must be positive");
    if (!choi_.is_square() || choi_.rows() != dim_in_ * dim_out_) {
      throw DimensionError("Choi matrix of a map " + std::to_string(dim_in_) + "->" + std::to_string(dim_out_) +
                           " must be " + std::to_string(dim_in_ * dim_out_) + " square, got " + choi_.shape());
    }
    if (hermiticity_defect(choi_) > tol.convergence * std::max(1.0, frobenius_norm(choi_))) {
      throw DomainError("Choi matrix is not Hermitian: map does not preserve Hermiticity");
    }
  }

  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return dim_out_; }
  Dims dims() const { return {dim_in_, dim_out_}; }
  const Matrix& choi() const { return choi_; }
  const Provenance& provenance() const { return provenance_; }

  const HolevoForm* holevo() const { return std::get_if<HolevoForm>(&provenance_); }
  const KrausList* kraus() const { return std::get_if<KrausList>(&provenance_); }

 private:
  std::size_t dim_in_ = 0;
  std::size_t dim_out_ = 0;
  Matrix choi_;
  Provenance provenance_;
};

// Density matrix on M_n (x) M_m. Trace is the total mass of the functional;
// it need not be 1.
class BipartiteState {
 public:
  BipartiteState() = default;

  BipartiteState(Dims dims, Matrix density, const Tolerances& tol = {}) : dims_(dims), density_(std::move(density)) {
    detail::require_bipartite(density_, dims_);
    PsdResult r = is_psd(density_, tol);
    if (!r) {
      throw DomainError("density matrix is not PSD (min eigenvalue " + std::to_string(r.min_eigenvalue) + ")");
    }
    if (!(mass() > 0.0)) throw DomainError("density matrix has zero trace");
  }

  Dims dims() const { return dims_; }
  const Matrix& density() const { return density_; }
  double mass() const { return std::real(trace(density_)); }
  Matrix normalized_density() const { return density_ / mass(); }

 private:
  Dims dims_;
  Matrix density_;
};

// Convex combination sum_i weight_i a_i (x) b_i of product states.
struct EnsembleTerm {
  double weight = 0.0;
  Matrix a;  // n x n PSD, trace 1
  Matrix b;  // m x m PSD, trace 1
};

struct SeparableEnsemble {
  std::vector<EnsembleTerm> terms;

  Dims dims() const { return terms.empty() ? Dims{} : Dims{terms.front().a.rows(), terms.front().b.rows()}; }

  void validate(const Tolerances& tol = {}) const {
    if (terms.empty()) throw DomainError("ensemble needs at least one term");
    const Dims d = dims();
    double total = 0.0;
    for (const auto& t : terms) {
      if (!t.a.is_square() || t.a.rows() != d.n || !t.b.is_square() || t.b.rows() != d.m) {
        throw DimensionError("ensemble terms have inconsistent shapes");
      }
      if (!(t.weight > 0.0)) throw DomainError("ensemble weights must be positive");
      if (!is_psd(t.a, tol) || !is_psd(t.b, tol)) throw DomainError("ensemble factor is not PSD");
      if (std::abs(trace(t.a) - 1.0) > 1e-9 || std::abs(trace(t.b) - 1.0) > 1e-9) {
        throw DomainError("ensemble factors must have unit trace");
      }
      total += t.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("ensemble weights must sum to 1");
  }

  Matrix density() const {
    const Dims d = dims();
    Matrix rho(d.total(), d.total());
    for (const auto& t : terms) rho += kron(t.a, t.b) * t.weight;
    return rho;
  }
};

inline Matrix choi_from_action(std::size_t n, std::size_t m, const std::function<Matrix(const Matrix&)>& action) {
  Matrix choi(n * m, n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Matrix out = action(Matrix::unit(n, i, j));
      if (out.rows() != m || out.cols() != m) {
        throw DimensionError("map action returned " + out.shape() + ", expected " + std::to_string(m) + "x" +
                             std::to_string(m));
      }
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) choi(i * m + k, j * m + l) = out(k, l);
    }
  return choi;
}

inline MatrixMap map_from_action(std::size_t n, std::size_t m, const std::function<Matrix(const Matrix&)>& action,
                                 const Tolerances& tol = {}) {
  return MatrixMap(n, m, choi_from_action(n, m, action), ChoiGiven{}, tol);
}

// f(a) = sum_ij a_ij f(e_ij), read straight off the Choi blocks. Equal to
// Tr_1((a^T (x) I) C).
inline Matrix apply_map(const MatrixMap& f, const Matrix& a) {
  const std::size_t n = f.dim_in();
  const std::size_t m = f.dim_out();
  if (a.rows() != n || a.cols() != n) {
    throw DimensionError("map expects " + std::to_string(n) + "x" + std::to_string(n) + " input, got " + a.shape());
  }
  Matrix out(m, m);
  const Matrix& c = f.choi();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) out(k, l) += aij * c(i * m + k, j * m + l);
    }
  return out;
}

// (id (x) f)(x) for x on C^p (x) C^n: f applied blockwise to the second slot.
inline Matrix apply_second(const MatrixMap& f, const Matrix& x, std::size_t p) {
  const Dims in{p, f.dim_in()};
  detail::require_bipartite(x, in);
  const std::size_t m = f.dim_out();
  Matrix out(p * m, p * m);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      const Matrix y = apply_map(f, block(x, in, i, j));
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) out(i * m + k, j * m + l) = y(k, l);
    }
  return out;
}

// Adjoint for the trace pairing: Tr(f(a) b) = Tr(a g(b)).
inline MatrixMap map_adjoint(const MatrixMap& f) {
  const std::size_t n = f.dim_in();
  const std::size_t m = f.dim_out();
  const Matrix& c = f.choi();
  Matrix g(m * n, m * n);
  // g(e_kl)_ji = Tr(f(e_ij) e_kl) = C[(i,l),(j,k)]
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t l = 0; l < m; ++l)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) g(k * n + j, l * n + i) = c(i * m + l, j * m + k);
  Provenance prov = ChoiGiven{};
  if (const KrausList* ks = f.kraus()) {
    KrausList adj;
    for (const Matrix& v : *ks) adj.push_back(v.adjoint());
    prov = std::move(adj);
  }
  return MatrixMap(m, n, std::move(g), std::move(prov));
}

// t o f o t; its Choi matrix is the full transpose of f's.
inline MatrixMap map_transpose_conjugate(const MatrixMap& f) {
  Provenance prov = ChoiGiven{};
  if (const KrausList* ks = f.kraus()) {
    KrausList out;
    for (const Matrix& v : *ks) out.push_back(v.conj());
    prov = std::move(out);
  } else if (const HolevoForm* hf = f.holevo()) {
    HolevoForm out;
    for (const auto& t : hf->terms) out.terms.push_back({t.omega_density.transpose(), t.b.transpose()});
    prov = std::move(out);
  }
  return MatrixMap(f.dim_in(), f.dim_out(), f.choi().transpose(), std::move(prov));
}

inline MatrixMap holevo_to_map(const HolevoForm& hf, const Tolerances& tol = {}) {
  hf.validate(tol);
  const std::size_t n = hf.dim_in();
  const std::size_t m = hf.dim_out();
  Matrix choi(n * m, n * m);
  for (const auto& t : hf.terms) choi += kron(t.omega_density.transpose(), t.b);
  return MatrixMap(n, m, std::move(choi), hf, tol);
}

inline MatrixMap kraus_to_map(const KrausList& vs, const Tolerances& tol = {}) {
  if (vs.empty()) throw DimensionError("Kraus list is empty");
  const std::size_t m = vs.front().rows();
  const std::size_t n = vs.front().cols();
  for (const Matrix& v : vs) {
    if (v.rows() != m || v.cols() != n) throw DimensionError("Kraus operators have inconsistent shapes");
  }
  Matrix choi(n * m, n * m);
  for (const Matrix& v : vs) {
    const Matrix vh = v.adjoint();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        // V e_ij V* = (column i of V)(column j of V)*
        for (std::size_t k = 0; k < m; ++k)
          for (std::size_t l = 0; l < m; ++l) choi(i * m + k, j * m + l) += v(k, i) * vh(j, l);
      }
  }
  return MatrixMap(n, m, std::move(choi), vs, tol);
}

// The dual functional's density C^T. Fails when f is not CP.
inline BipartiteState state_from_map(const MatrixMap& f, const Tolerances& tol = {}) {
  Matrix density = f.choi().transpose();
  PsdResult r = is_psd(density, tol);
  if (!r) {
    throw DomainError("dual functional is not positive: C^T has eigenvalue " + std::to_string(r.min_eigenvalue));
  }
  return BipartiteState(f.dims(), std::move(density), tol);
}

inline MatrixMap map_from_state(const BipartiteState& s, const Tolerances& tol = {}) {
  return MatrixMap(s.dims().n, s.dims().m, s.density().transpose(), ChoiGiven{}, tol);
}

// f~(a (x) b) = Tr(f(a) b^T)
inline Complex pairing_value(const MatrixMap& f, const Matrix& a, const Matrix& b) {
  if (b.rows() != f.dim_out() || b.cols() != f.dim_out()) {
    throw DimensionError("pairing expects a " + std::to_string(f.dim_out()) + " square right operand");
  }
  return trace_product(apply_map(f, a), b.transpose());
}

// Product ensemble of the separable density sum_k omega_k (x) b_k^T of a
// Holevo-form map.
inline SeparableEnsemble ensemble_from_holevo(const HolevoForm& hf) {
  SeparableEnsemble ens;
  double total = 0.0;
  for (const auto& t : hf.terms) {
    const double ta = std::real(trace(t.omega_density));
    const double tb = std::real(trace(t.b));
    if (ta <= 0.0) continue;
    ens.terms.push_back({ta * tb, t.omega_density / ta, t.b.transpose() / tb});
    total += ta * tb;
  }
  for (auto& t : ens.terms) t.weight /= total;
  return ens;
}

}  // namespace entanglecone
