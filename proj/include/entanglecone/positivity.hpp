#pragma once

// Where a map sits among the cones CP, copositive and positive, plus the
// builtin witness maps (identity, transpose, the Choi map on M_3) and the
// library of their twisted variants.

#include <charconv>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entanglecone/choi_duality.hpp"
#include "entanglecone/parallel.hpp"

namespace entanglecone {

struct Budget {
  std::size_t restarts = 64;
  std::size_t iterations = 500;
};

inline PsdResult is_cp(const MatrixMap& f, const Tolerances& tol = {}) { return is_psd(f.choi(), tol); }

inline MatrixMap compose(const MatrixMap& outer_map, const MatrixMap& inner_map, const Tolerances& tol = {}) {
  if (outer_map.dim_in() != inner_map.dim_out()) throw DimensionError("composition of incompatible maps");
  return map_from_action(
      inner_map.dim_in(), outer_map.dim_out(),
      [&](const Matrix& x) { return apply_map(outer_map, apply_map(inner_map, x)); }, tol);
}

// x -> f(x)^T
inline MatrixMap transpose_after(const MatrixMap& f, const Tolerances& tol = {}) {
  return MatrixMap(f.dim_in(), f.dim_out(), partial_transpose(f.choi(), f.dims(), Side::Second), ChoiGiven{}, tol);
}

// Copositive means t o f is CP, i.e. the second-slot partial transpose of C
// is PSD. Both routes are evaluated and must agree.
inline PsdResult is_copositive(const MatrixMap& f, const Tolerances& tol = {}) {
  PsdResult direct = is_psd(partial_transpose(f.choi(), f.dims(), Side::Second), tol);
  const MatrixMap tf = map_from_action(
      f.dim_in(), f.dim_out(), [&](const Matrix& x) { return apply_map(f, x).transpose(); }, tol);
  const PsdResult composed = is_cp(tf, tol);
  if (direct.psd != composed.psd) throw NumericalError("copositivity routes disagree");
  return direct;
}

// x -> a f(b x b*) a*
inline MatrixMap conjugation_twist(const MatrixMap& f, const Matrix& a, const Matrix& b, const Tolerances& tol = {}) {
  const Matrix bh = b.adjoint();
  const Matrix ah = a.adjoint();
  return map_from_action(
      f.dim_in(), f.dim_out(), [&](const Matrix& x) { return a * apply_map(f, b * x * bh) * ah; }, tol);
}

struct BlockMinResult {
  double value = std::numeric_limits<double>::infinity();
  Vector x;
  Vector y;
  std::size_t restart = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

// (x* (x) I) C (x (x) I)
inline Matrix compress_first(const Matrix& c, Dims d, std::span<const Complex> x) {
  Matrix out(d.m, d.m);
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t j = 0; j < d.n; ++j) {
      const Complex w = std::conj(x[i]) * x[j];
      if (w == Complex{}) continue;
      for (std::size_t k = 0; k < d.m; ++k)
        for (std::size_t l = 0; l < d.m; ++l) out(k, l) += w * c(i * d.m + k, j * d.m + l);
    }
  return out;
}

// (I (x) y*) C (I (x) y)
inline Matrix compress_second(const Matrix& c, Dims d, std::span<const Complex> y) {
  Matrix out(d.n, d.n);
  for (std::size_t k = 0; k < d.m; ++k)
    for (std::size_t l = 0; l < d.m; ++l) {
      const Complex w = std::conj(y[k]) * y[l];
      if (w == Complex{}) continue;
      for (std::size_t i = 0; i < d.n; ++i)
        for (std::size_t j = 0; j < d.n; ++j) out(i, j) += w * c(i * d.m + k, j * d.m + l);
    }
  return out;
}

inline BlockMinResult block_min_single(const Matrix& c, Dims d, std::size_t iterations, std::uint64_t seed,
                                       std::size_t restart, const Tolerances& tol) {
  SplitMix64 rng = derive_stream(seed, restart);
  BlockMinResult r;
  r.restart = restart;
  r.x = random::unit_vector(rng, d.n);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < iterations; ++it) {
    r.iterations = it + 1;
    const EigenDecomposition ey = hermitian_eigen(compress_first(c, d, r.x), tol);
    r.y = ey.min_vector();
    const EigenDecomposition ex = hermitian_eigen(compress_second(c, d, r.y), tol);
    r.x = ex.min_vector();
    const double val = ex.min_value();
    if (std::abs(prev - val) <= tol.convergence * std::max(1.0, std::abs(val))) {
      r.converged = true;
      break;
    }
    prev = val;
  }
  r.value = std::real(expectation(c, kron(r.x, r.y)));
  return r;
}

}  // namespace detail

// Best found min of <x (x) y, C x (x) y> over unit product vectors by
// alternating smallest-eigenvector updates from budget.restarts random starts.
// An upper bound on the true minimum: a negative value certifies that the
// associated map is not positive. Ties go to the lowest restart index, so the
// result does not depend on `threads`.
inline BlockMinResult block_positivity_minimize(const Matrix& c, Dims dims, Budget budget, std::uint64_t seed,
                                                const Tolerances& tol = {}, unsigned threads = 0) {
  detail::require_bipartite(c, dims);
  if (budget.restarts == 0 || budget.iterations == 0) throw DomainError("block minimization needs a nonzero budget");
  std::vector<BlockMinResult> runs(budget.restarts);
  parallel_for(budget.restarts, threads,
               [&](std::size_t r) { runs[r] = detail::block_min_single(c, dims, budget.iterations, seed, r, tol); });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].value < runs[best].value) best = r;
  return runs[best];
}

// Slack below which a block minimum certifies non-positivity.
inline double block_threshold(const Matrix& c, const Tolerances& tol) { return psd_threshold(c, tol); }

inline MatrixMap identity_map(std::size_t n) { return MatrixMap(n, n, maximally_entangled_p(n)); }

inline MatrixMap transpose_map(std::size_t n) { return MatrixMap(n, n, swap_matrix(n)); }

inline constexpr std::uint64_t kValidationSeed = 0x5EED'C401'0000'0003ULL;

// Positive, not CP, not copositive. Throws ConstructionError otherwise.
inline void validate_nondecomposable_candidate(const MatrixMap& f, const Tolerances& tol = {}) {
  const BlockMinResult bm = block_positivity_minimize(f.choi(), f.dims(), Budget{}, kValidationSeed, tol);
  if (bm.value < -block_threshold(f.choi(), tol)) {
    throw ConstructionError("candidate map is not positive (block minimum " + std::to_string(bm.value) + ")");
  }
  if (is_cp(f, tol)) throw ConstructionError("candidate map is completely positive");
  if (is_copositive(f, tol)) throw ConstructionError("candidate map is copositive");
}

// Choi's map on M_3: x -> diag(2x11 + x33, 2x22 + x11, 2x33 + x22) - x.
inline const MatrixMap& builtin_choi_map() {
  static const MatrixMap choi = [] {
    MatrixMap f = map_from_action(3, 3, [](const Matrix& x) {
      Matrix d(3, 3);
      d(0, 0) = 2.0 * x(0, 0) + x(2, 2);
      d(1, 1) = 2.0 * x(1, 1) + x(0, 0);
      d(2, 2) = 2.0 * x(2, 2) + x(1, 1);
      return d - x;
    });
    validate_nondecomposable_candidate(f);
    return f;
  }();
  return choi;
}

// identity{n}, transpose{n} and choi3. Throws DomainError for unknown names.
inline MatrixMap builtin_map(std::string_view name) {
  if (name == "choi3") return builtin_choi_map();
  auto sized = [&](std::string_view prefix) -> std::optional<std::size_t> {
    if (!name.starts_with(prefix)) return std::nullopt;
    const std::string_view digits = name.substr(prefix.size());
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || n == 0 || n > 16) {
      return std::nullopt;
    }
    return n;
  };
  if (auto n = sized("identity")) return identity_map(*n);
  if (auto n = sized("transpose")) return transpose_map(*n);
  throw DomainError("unknown builtin map '" + std::string(name) + "'");
}

struct NamedMap {
  std::string name;
  MatrixMap map;
};

// Positive maps on M_m used to probe the second factor of bipartite states.
struct WitnessLibrary {
  std::size_t dim = 0;
  std::vector<NamedMap> entries;

  const NamedMap* find(std::string_view name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
};

inline constexpr std::uint64_t kLibrarySeed = 0x1B5A'0000'7715'0001ULL;

// identity{m}, transpose{m}, two conjugation twists of the transpose, and for
// m = 3 the Choi map, its compositions with the transpose and two twists.
// Every entry except identity and transpose is screened for block positivity.
inline WitnessLibrary build_witness_library(std::size_t m, const Tolerances& tol = {}, unsigned threads = 0) {
  WitnessLibrary lib;
  lib.dim = m;
  SplitMix64 rng(kLibrarySeed ^ m);
  const std::string tname = "transpose" + std::to_string(m);
  lib.entries.push_back({"identity" + std::to_string(m), identity_map(m)});
  lib.entries.push_back({tname, transpose_map(m)});
  std::vector<NamedMap> screened;
  for (int k = 0; k < 2; ++k) {
    const Matrix a = random::gaussian(rng, m, m);
    const Matrix b = random::gaussian(rng, m, m);
    screened.push_back({tname + "~twist" + std::to_string(k), conjugation_twist(transpose_map(m), a, b, tol)});
  }
  if (m == 3) {
    const MatrixMap& phi = builtin_choi_map();
    lib.entries.push_back({"choi3", phi});
    screened.push_back({"choi3.t", compose(phi, transpose_map(3), tol)});
    screened.push_back({"t.choi3", transpose_after(phi, tol)});
    for (int k = 0; k < 2; ++k) {
      const Matrix a = random::gaussian(rng, 3, 3);
      const Matrix b = random::gaussian(rng, 3, 3);
      screened.push_back({"choi3~twist" + std::to_string(k), conjugation_twist(phi, a, b, tol)});
    }
  }
  for (auto& e : screened) {
    const BlockMinResult bm = block_positivity_minimize(e.map.choi(), e.map.dims(), Budget{}, kValidationSeed, tol,
                                                        threads);
    if (bm.value < -block_threshold(e.map.choi(), tol)) {
      throw ConstructionError("witness '" + e.name + "' failed block-positivity screening");
    }
    lib.entries.push_back(std::move(e));
  }
  return lib;
}

}  // namespace entanglecone
