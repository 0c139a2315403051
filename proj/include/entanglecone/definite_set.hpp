#pragma once

// Definite sets {a = a* : f(a^2) = f(a)^2} of Holevo-form maps, the block
// splitting they induce, and the resulting decomposition of separable
// ensembles into mutually orthogonal irreducible components.

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "entanglecone/separability.hpp"

namespace entanglecone {

// Disjoint sets over [0, n) with the smallest index as canonical
// representative, so components do not depend on union order.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }

  bool unite(std::size_t i, std::size_t j) {
    std::size_t ri = find(i);
    std::size_t rj = find(j);
    if (ri == rj) return false;
    if (rj < ri) std::swap(ri, rj);
    parent_[rj] = ri;
    return true;
  }

  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
};

inline bool is_projection(const Matrix& e, double tolerance = 1e-9) {
  if (!e.is_square()) return false;
  const double scale = std::max(1.0, frobenius_norm(e));
  return hermiticity_defect(e) <= tolerance * scale && frobenius_norm(e * e - e) <= tolerance * scale;
}

inline bool is_definite_element(const MatrixMap& f, const Matrix& a, const Tolerances& tol = {}) {
  if (a.rows() != f.dim_in() || a.cols() != f.dim_in()) throw DimensionError("definite-set test: operand size");
  if (hermiticity_defect(a) > tol.convergence * std::max(1.0, frobenius_norm(a))) {
    throw DomainError("definite-set elements must be Hermitian");
  }
  const Matrix fa = apply_map(f, a);
  const double scale = std::max(1.0, frobenius_norm(fa) * frobenius_norm(fa));
  return frobenius_norm(apply_map(f, a * a) - fa * fa) <= tol.convergence * scale;
}

inline constexpr double kSplitTolerance = 1e-9;

// For a projection e in the definite set of f (fc = I - e): f(e), f(fc) are
// orthogonal projections and, on `samples` random Hermitian x,
// f(x) = f(e x e) + f(fc x fc) = f(e) f(x) f(e) + f(fc) f(x) f(fc).
inline bool split_by_projection(const MatrixMap& f, const Matrix& e, std::size_t samples, std::uint64_t seed = 0,
                                const Tolerances& tol = {}) {
  if (!is_projection(e)) throw DomainError("split_by_projection: e is not a projection");
  if (!is_definite_element(f, e, tol)) throw DomainError("split_by_projection: e is not in the definite set");
  const std::size_t n = f.dim_in();
  const Matrix fc = Matrix::identity(n) - e;
  const Matrix pe = apply_map(f, e);
  const Matrix pf = apply_map(f, fc);
  if (!is_projection(pe) || !is_projection(pf) || frobenius_norm(pe * pf) > kSplitTolerance) return false;
  SplitMix64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const Matrix x = random::hermitian(rng, n);
    const Matrix fx = apply_map(f, x);
    const double scale = kSplitTolerance * std::max(1.0, frobenius_norm(fx));
    const Matrix cut = apply_map(f, e * x * e) + apply_map(f, fc * x * fc);
    const Matrix sandwiched = pe * fx * pe + pf * fx * pf;
    if (frobenius_norm(fx - cut) > scale || frobenius_norm(fx - sandwiched) > scale) return false;
  }
  return true;
}

struct BlockComponent {
  std::vector<std::size_t> indices;  // ensemble terms, ascending
  Matrix e;                          // n x n support projection
  Matrix f;                          // m x m support projection
  double weight = 0.0;
  Matrix state;                      // unit-trace component density
};

struct BlockDecomposition {
  std::vector<BlockComponent> components;
  double max_cross_overlap = 0.0;     // max ||e_C e_C'||_F, ||f_C f_C'||_F
  double reconstruction_error = 0.0;  // ||sum weight_C state_C - rho||_F
};

// Tr(p q) above this declares two supports overlapping.
inline constexpr double kOverlapThreshold = 1e-8;

// Terms are linked when their supports overlap on either factor; connected
// components become blocks e_C (x) f_C, mutually orthogonal on both sides.
inline BlockDecomposition decompose_separable(const SeparableEnsemble& ens, const Tolerances& tol = {}) {
  ens.validate(tol);
  const std::size_t count = ens.terms.size();
  std::vector<Matrix> sa;
  std::vector<Matrix> sb;
  for (const auto& t : ens.terms) {
    sa.push_back(support_projection(t.a, tol));
    sb.push_back(support_projection(t.b, tol));
  }
  UnionFind uf(count);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j) {
      if (std::real(trace_product(sa[i], sa[j])) > kOverlapThreshold ||
          std::real(trace_product(sb[i], sb[j])) > kOverlapThreshold) {
        uf.unite(i, j);
      }
    }

  const Dims d = ens.dims();
  BlockDecomposition out;
  std::vector<std::size_t> slot(count, count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t root = uf.find(i);
    if (slot[root] == count) {
      slot[root] = out.components.size();
      out.components.push_back({});
    }
    out.components[slot[root]].indices.push_back(i);
  }
  Matrix total(d.total(), d.total());
  for (auto& c : out.components) {
    Matrix asum(d.n, d.n);
    Matrix bsum(d.m, d.m);
    Matrix rho(d.total(), d.total());
    for (std::size_t i : c.indices) {
      const auto& t = ens.terms[i];
      asum += t.a * t.weight;
      bsum += t.b * t.weight;
      rho += kron(t.a, t.b) * t.weight;
      c.weight += t.weight;
    }
    c.e = support_projection(asum, tol);
    c.f = support_projection(bsum, tol);
    c.state = rho / c.weight;
    total += rho;
  }
  for (std::size_t i = 0; i < out.components.size(); ++i)
    for (std::size_t j = i + 1; j < out.components.size(); ++j) {
      const auto& ci = out.components[i];
      const auto& cj = out.components[j];
      out.max_cross_overlap =
          std::max({out.max_cross_overlap, frobenius_norm(ci.e * cj.e), frobenius_norm(ci.f * cj.f)});
    }
  out.reconstruction_error = frobenius_norm(total - ens.density());
  return out;
}

// Holevo-form map whose dual density is the ensemble's state, normalized to
// be unital on its range: x -> sum_i Tr(a_i x) B^{-1/2} (w_i b_i^T) B^{-1/2}
// with B = sum_i w_i b_i^T.
inline MatrixMap ensemble_holevo_map(const SeparableEnsemble& ens, const Tolerances& tol = {}) {
  ens.validate(tol);
  const std::size_t m = ens.dims().m;
  Matrix big(m, m);
  for (const auto& t : ens.terms) big += t.b.transpose() * t.weight;
  const double cut = psd_threshold(big, tol);
  const Matrix inv_sqrt = spectral_function(big, [cut](double v) { return v > cut ? 1.0 / std::sqrt(v) : 0.0; }, tol);
  HolevoForm hf;
  for (const auto& t : ens.terms) {
    hf.terms.push_back({t.a, hermitian_part(inv_sqrt * (t.b.transpose() * t.weight) * inv_sqrt)});
  }
  return holevo_to_map(hf, tol);
}

// Hermitian basis of M_n: e_kk, e_kl + e_lk, i(e_kl - e_lk).
inline std::vector<Matrix> hermitian_basis(std::size_t n) {
  std::vector<Matrix> basis;
  for (std::size_t k = 0; k < n; ++k) basis.push_back(Matrix::unit(n, k, k));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) {
      basis.push_back(Matrix::unit(n, k, l) + Matrix::unit(n, l, k));
      Matrix y(n, n);
      y(k, l) = Complex(0.0, 1.0);
      y(l, k) = Complex(0.0, -1.0);
      basis.push_back(y);
    }
  return basis;
}

// Images of two basis elements whose commutator is too large.
struct NotAbelian {
  std::size_t first = 0;
  std::size_t second = 0;
  double commutator_norm = 0.0;
  Matrix first_image;
  Matrix second_image;
};

using AbelianRangeResult = std::variant<HolevoForm, NotAbelian>;

inline constexpr double kCommuteTolerance = 1e-9;
inline constexpr double kClusterGap = 1e-8;
inline constexpr std::uint64_t kDiagonalizeSeed = 0xAB31'1A40'0000'0024ULL;

namespace detail {

inline bool is_scalar(const Matrix& g, double tolerance) {
  const Complex mean = trace(g) / static_cast<double>(g.rows());
  return frobenius_norm(g - Matrix::identity(g.rows()) * mean) <= tolerance * std::max(1.0, frobenius_norm(g));
}

// Splits the subspace spanned by the orthonormal columns of q until every
// image compresses to a scalar; appends the resulting spectral projections.
inline void refine_common_eigenspaces(const std::vector<Matrix>& images, const Matrix& q, SplitMix64& rng,
                                      const Tolerances& tol, std::vector<Matrix>& out, int depth = 0) {
  const Matrix qh = q.adjoint();
  std::vector<Matrix> compressed;
  bool scalar = true;
  for (const Matrix& g : images) {
    compressed.push_back(hermitian_part(qh * g * q));
    scalar = scalar && is_scalar(compressed.back(), kCommuteTolerance);
  }
  if (scalar) {
    out.push_back(q * qh);
    return;
  }
  if (depth > static_cast<int>(q.rows()) + 2) throw NumericalError("simultaneous diagonalization did not split");
  Matrix combo(q.cols(), q.cols());
  for (const Matrix& c : compressed) combo += c * rng.gaussian();
  const EigenDecomposition ed = hermitian_eigen(combo, tol);
  const double spread = ed.values.front() - ed.values.back();
  std::size_t start = 0;
  std::vector<std::pair<std::size_t, std::size_t>> clusters;
  for (std::size_t i = 1; i <= ed.values.size(); ++i) {
    if (i == ed.values.size() || ed.values[i - 1] - ed.values[i] > kClusterGap * spread) {
      clusters.emplace_back(start, i);
      start = i;
    }
  }
  if (clusters.size() == 1) throw NumericalError("degenerate refinement: images do not commute on an eigenspace");
  for (const auto& [lo, hi] : clusters) {
    Matrix sub(q.cols(), hi - lo);
    for (std::size_t c = lo; c < hi; ++c)
      for (std::size_t r = 0; r < q.cols(); ++r) sub(r, c - lo) = ed.vectors(r, c);
    refine_common_eigenspaces(images, q * sub, rng, tol, out, depth + 1);
  }
}

}  // namespace detail

// When f(M_n) lies in an abelian algebra, f(x) = sum_r omega_r(x) p_r over
// common spectral projections p_r, with omega_r(x) = Tr(p_r f(x)) / Tr(p_r).
// Returns that Holevo form, or the first non-commuting pair of images.
inline AbelianRangeResult abelian_range_decompose(const MatrixMap& f, const Tolerances& tol = {}) {
  const std::vector<Matrix> basis = hermitian_basis(f.dim_in());
  std::vector<Matrix> images;
  for (const Matrix& h : basis) images.push_back(apply_map(f, h));
  for (std::size_t k = 0; k < images.size(); ++k)
    for (std::size_t l = k + 1; l < images.size(); ++l) {
      const double cn = frobenius_norm(commutator(images[k], images[l]));
      if (cn > kCommuteTolerance * std::max(1.0, frobenius_norm(images[k]) * frobenius_norm(images[l]))) {
        return NotAbelian{k, l, cn, images[k], images[l]};
      }
    }
  SplitMix64 rng(kDiagonalizeSeed);
  std::vector<Matrix> projections;
  detail::refine_common_eigenspaces(images, Matrix::identity(f.dim_out()), rng, tol, projections);

  const MatrixMap adj = map_adjoint(f);
  HolevoForm hf;
  for (const Matrix& p : projections) {
    const double rank = std::real(trace(p));
    Matrix omega = hermitian_part(apply_map(adj, p)) / rank;
    if (frobenius_norm(omega) <= psd_threshold(omega, tol)) continue;
    hf.terms.push_back({std::move(omega), p});
  }
  if (hf.terms.empty()) throw DomainError("abelian_range_decompose: map is zero");
  hf.validate(tol);
  const MatrixMap check = holevo_to_map(hf, tol);
  if (frobenius_norm(check.choi() - f.choi()) > 1e-9 * std::max(1.0, frobenius_norm(f.choi()))) {
    throw NumericalError("abelian_range_decompose: spectral reconstruction does not reproduce the map");
  }
  return hf;
}

struct ConditionalExpectationReport {
  bool separable = false;
  std::optional<HolevoForm> certificate;  // when separable
  std::optional<NotAbelian> non_abelian;  // when entangled
  double ppt_min_eigenvalue = 0.0;        // of PT of the (unnormalized) dual density
  std::optional<WitnessCertificate> detected_by;
};

// For a unital idempotent f: separable dual functional iff the range is
// abelian. The entangled branch is re-confirmed by the Peres test or the
// witness battery; failing both is reported as a NumericalError.
inline ConditionalExpectationReport conditional_expectation_verdict(const MatrixMap& f, const Tolerances& tol = {}) {
  const std::size_t n = f.dim_in();
  if (f.dim_out() != n) throw DomainError("conditional expectation must map M_n into itself");
  if (frobenius_norm(apply_map(f, Matrix::identity(n)) - Matrix::identity(n)) > 1e-9) {
    throw DomainError("conditional expectation must be unital");
  }
  for (const Matrix& h : hermitian_basis(n)) {
    const Matrix fh = apply_map(f, h);
    if (frobenius_norm(apply_map(f, fh) - fh) > 1e-9 * std::max(1.0, frobenius_norm(fh))) {
      throw DomainError("conditional expectation must be idempotent");
    }
  }
  ConditionalExpectationReport rep;
  AbelianRangeResult range = abelian_range_decompose(f, tol);
  const BipartiteState s = state_from_map(f, tol);
  const PptResult ppt = ppt_check(s, tol);
  rep.ppt_min_eigenvalue = ppt.min_eigenvalue;
  if (auto* hf = std::get_if<HolevoForm>(&range)) {
    rep.separable = true;
    rep.certificate = std::move(*hf);
    return rep;
  }
  rep.non_abelian = std::get<NotAbelian>(range);
  if (ppt) {
    const StateReport battery = witness_battery(s, build_witness_library(n, tol), tol);
    if (!battery.entangled_by) {
      throw NumericalError("non-abelian range but the dual state passes the Peres test and every witness");
    }
    rep.detected_by = battery.entangled_by;
  } else {
    rep.detected_by = WitnessCertificate{"transpose" + std::to_string(n), ppt.min_eigenvalue, *ppt.witness};
  }
  return rep;
}

}  // namespace entanglecone
