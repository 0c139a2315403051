#pragma once

// State-side analyses: partial-transpose (Peres) test, the positive-map
// witness battery, and the search for PPT states that a nondecomposable
// positive map detects as entangled.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "entanglecone/positivity.hpp"

namespace entanglecone {

struct PptResult {
  bool ppt = true;
  double min_eigenvalue = 0.0;    // of (id (x) t)(h)
  std::optional<Vector> witness;  // eigenvector for min_eigenvalue when !ppt
  bool forms_agree = true;        // (id (x) t)(h) and (t (x) id)(h) verdicts
  bool copositive_probes_ok = true;

  explicit operator bool() const { return ppt; }
};

inline constexpr std::size_t kCopositiveProbes = 20;
inline constexpr std::uint64_t kProbeSeed = 0xC0B0'5171'0000'0014ULL;

// Peres test on the second factor, cross-checked against the first-factor
// partial transpose and, when PPT, against random copositive maps
// id (x) (t o L) with L completely positive.
inline PptResult ppt_check(const BipartiteState& s, const Tolerances& tol = {}) {
  const Dims d = s.dims();
  const PsdResult second = is_psd(partial_transpose(s.density(), d, Side::Second), tol);
  const PsdResult first = is_psd(partial_transpose(s.density(), d, Side::First), tol);
  PptResult out;
  out.ppt = second.psd;
  out.min_eigenvalue = second.min_eigenvalue;
  out.witness = second.witness;
  out.forms_agree = second.psd == first.psd;
  if (out.ppt) {
    SplitMix64 rng(kProbeSeed ^ (d.n * 131 + d.m));
    for (std::size_t k = 0; k < kCopositiveProbes && out.copositive_probes_ok; ++k) {
      const KrausList ks{random::gaussian(rng, d.m, d.m), random::gaussian(rng, d.m, d.m)};
      const MatrixMap copos = transpose_after(kraus_to_map(ks, tol), tol);
      out.copositive_probes_ok = is_psd(apply_second(copos, s.density(), d.n), tol).psd;
    }
  }
  return out;
}

enum class Entanglement { CertifiedEntangled, CertifiedSeparable, Inconclusive };

inline const char* to_string(Entanglement e) {
  switch (e) {
    case Entanglement::CertifiedEntangled: return "certified-entangled";
    case Entanglement::CertifiedSeparable: return "certified-separable";
    case Entanglement::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

// A named witness map and a unit vector v with <v, (id (x) psi)(h) v> < 0.
struct WitnessCertificate {
  std::string witness;
  double eigenvalue = 0.0;
  Vector vector;
};

struct StateReport {
  PptResult ppt;
  Entanglement entanglement = Entanglement::Inconclusive;
  std::optional<WitnessCertificate> entangled_by;
  std::optional<SeparableEnsemble> separable_by;
  std::vector<std::string> skipped;  // library entries with the wrong input dimension
  bool peres_crosscheck = true;
};

// Checks that an ensemble reproduces the normalized density.
inline bool ensemble_reproduces(const SeparableEnsemble& ens, const BipartiteState& s, double tolerance = 1e-9) {
  if (ens.dims() != s.dims()) return false;
  return frobenius_norm(ens.density() - s.normalized_density()) <= tolerance;
}

// (id (x) psi)(h) for every library entry; any negative eigenvalue certifies
// entanglement. A separability certificate, when supplied, must reproduce the
// state and must not contradict the battery.
inline StateReport witness_battery(const BipartiteState& s, const WitnessLibrary& lib, const Tolerances& tol = {},
                                   std::optional<SeparableEnsemble> certificate = std::nullopt) {
  StateReport rep;
  rep.ppt = ppt_check(s, tol);
  const Dims d = s.dims();
  for (const auto& entry : lib.entries) {
    if (entry.map.dim_in() != d.m) {
      std::clog << "witness_battery: skipping '" << entry.name << "' (input dimension " << entry.map.dim_in()
                << " != " << d.m << ")\n";
      rep.skipped.push_back(entry.name);
      continue;
    }
    const PsdResult r = is_psd(apply_second(entry.map, s.density(), d.n), tol);
    if (!r && !rep.entangled_by) rep.entangled_by = WitnessCertificate{entry.name, r.min_eigenvalue, *r.witness};
  }
  if (certificate) {
    if (!ensemble_reproduces(*certificate, s)) throw DomainError("separability certificate does not reproduce the state");
    if (rep.entangled_by) throw NumericalError("state has a separable certificate but witness '" +
                                               rep.entangled_by->witness + "' detects it");
    if (!rep.ppt) throw NumericalError("state has a separable certificate but fails the Peres test");
    rep.separable_by = std::move(certificate);
    rep.entanglement = Entanglement::CertifiedSeparable;
  } else if (rep.entangled_by) {
    rep.entanglement = Entanglement::CertifiedEntangled;
  }
  rep.peres_crosscheck = rep.ppt.forms_agree && rep.ppt.copositive_probes_ok;
  return rep;
}

// Tr(h C_f). Equal to Tr((id (x) f*)(h) P) for the adjoint f*.
inline double witness_pairing(const BipartiteState& s, const MatrixMap& f) {
  if (s.dims() != f.dims()) throw DimensionError("witness_pairing: state and map dimensions differ");
  return std::real(trace_product(s.density(), f.choi()));
}

// Agreement of the Peres test with CP-and-copositive of the dual map. Always
// true for a correct implementation.
inline bool peres_equivalence(const BipartiteState& s, const Tolerances& tol = {}) {
  const MatrixMap f = map_from_state(s, tol);
  const bool ppt = ppt_check(s, tol).ppt;
  return ppt == (is_cp(f, tol).psd && is_copositive(f, tol).psd);
}

struct SearchBudget {
  std::size_t restarts = 16;
  std::size_t iterations = 300;
};

struct SearchResult {
  BipartiteState state;
  std::string witness;
  double violation = 0.0;  // -lambda_min((id (x) W)(h))
  Vector violation_vector;
  std::size_t iterations = 0;
  std::size_t restart = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

namespace search_detail {

inline constexpr double kInitialStep = 0.1;
inline constexpr int kMaxHalvings = 30;
inline constexpr std::size_t kPlateauSteps = 50;
// Accepted steps gaining less than this count toward the plateau exit.
inline constexpr double kMinProgress = 1e-7;
inline constexpr std::size_t kDykstraIterations = 500;
inline constexpr double kDykstraExit = 1e-8;
inline constexpr double kInteriorMix = 0.1;
inline constexpr double kFeasibilityMargin = 1e-12;

struct Objective {
  double violation;
  Vector vector;
};

inline Objective evaluate(const MatrixMap& w, const Matrix& h, std::size_t n, const Tolerances& tol) {
  const EigenDecomposition ed = hermitian_eigen(apply_second(w, h, n), tol);
  return {-ed.min_value(), ed.min_vector()};
}

// Dykstra projection onto {h >= 0} cap {PT(h) >= 0}, then unit trace, then a
// minimal mix with I/(nm) so both cones hold with a strict margin. Returns
// nullopt if the projection collapses to zero.
inline std::optional<Matrix> project_feasible(const Matrix& x, Dims d, const Tolerances& tol) {
  Matrix cur = hermitian_part(x);
  Matrix p(cur.rows(), cur.cols());
  Matrix q(cur.rows(), cur.cols());
  for (std::size_t it = 0; it < kDykstraIterations; ++it) {
    const Matrix y = psd_projection(cur + p, tol);
    p = cur + p - y;
    const Matrix z = partial_transpose(psd_projection(partial_transpose(y + q, d, Side::Second), tol), d, Side::Second);
    q = y + q - z;
    const double moved = frobenius_norm(z - cur);
    cur = z;
    if (moved < kDykstraExit) break;
  }
  cur = hermitian_part(cur);
  const double tr = std::real(trace(cur));
  if (!(tr > 1e-12)) return std::nullopt;
  cur = cur / tr;
  const double inv_dim = 1.0 / static_cast<double>(d.total());
  const double lowest =
      std::min(hermitian_eigen(cur, tol).min_value(), hermitian_eigen(partial_transpose(cur, d, Side::Second), tol).min_value());
  if (lowest < kFeasibilityMargin) {
    const double delta = (kFeasibilityMargin - lowest) / (inv_dim - lowest);
    cur = cur * (1.0 - delta) + Matrix::identity(d.total()) * (delta * inv_dim);
  }
  return cur;
}

// (1 - eps) * random product mixture + eps * I/(nm), projected.
inline Matrix initial_point(SplitMix64& rng, Dims d, const Tolerances& tol) {
  Matrix mix(d.total(), d.total());
  const std::size_t terms = d.total();
  for (std::size_t k = 0; k < terms; ++k) {
    mix += outer(kron(random::unit_vector(rng, d.n), random::unit_vector(rng, d.m)));
  }
  mix = mix / static_cast<double>(terms);
  const Matrix h0 = mix * (1.0 - kInteriorMix) + Matrix::identity(d.total()) * (kInteriorMix / d.total());
  return *project_feasible(h0, d, tol);
}

struct RunOutcome {
  Matrix state;
  Objective objective;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> history;  // violation after the start and each accepted step
};

inline RunOutcome ascend(const MatrixMap& w, const MatrixMap& w_adj, Dims d, std::size_t iterations,
                         std::uint64_t seed, std::size_t restart, const Tolerances& tol) {
  SplitMix64 rng = derive_stream(seed, restart);
  RunOutcome run;
  run.state = initial_point(rng, d, tol);
  run.objective = evaluate(w, run.state, d.n, tol);
  run.history.push_back(run.objective.violation);
  std::size_t flat = 0;
  for (std::size_t it = 0; it < iterations; ++it) {
    run.iterations = it + 1;
    // Ascent direction for -lambda_min: -(id (x) W*)(v v*).
    const Matrix grad = -apply_second(w_adj, outer(run.objective.vector), d.n);
    bool accepted = false;
    double step = kInitialStep;
    for (int halving = 0; halving <= kMaxHalvings; ++halving, step *= 0.5) {
      std::optional<Matrix> trial = project_feasible(run.state + grad * step, d, tol);
      if (!trial) continue;
      Objective obj = evaluate(w, *trial, d.n, tol);
      if (obj.violation > run.objective.violation) {
        const double gain = obj.violation - run.objective.violation;
        flat = gain < kMinProgress ? flat + 1 : 0;
        run.state = std::move(*trial);
        run.objective = std::move(obj);
        run.history.push_back(run.objective.violation);
        accepted = true;
        break;
      }
    }
    if (!accepted || flat >= kPlateauSteps) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace search_detail

// Maximizes the violation -lambda_min((id (x) W)(h)) over unit-trace h with
// h >= 0 and PT(h) >= 0 by projected subgradient ascent from
// budget.restarts random separable starting points. Decomposable witnesses
// can never be violated; the search then returns a violation <= 0.
inline SearchResult search_ppt_entangled(const NamedMap& witness, SearchBudget budget, std::uint64_t seed,
                                         const Tolerances& tol = {}, unsigned threads = 0) {
  if (budget.restarts == 0 || budget.iterations == 0) throw DomainError("search needs a nonzero budget");
  const MatrixMap& w = witness.map;
  const Dims d{w.dim_in(), w.dim_in()};
  const MatrixMap w_adj = map_adjoint(w);
  std::vector<search_detail::RunOutcome> runs(budget.restarts);
  parallel_for(budget.restarts, threads, [&](std::size_t r) {
    runs[r] = search_detail::ascend(w, w_adj, d, budget.iterations, seed, r, tol);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].objective.violation > runs[best].objective.violation) best = r;
  auto& run = runs[best];
  return SearchResult{BipartiteState(d, std::move(run.state), tol),
                      witness.name,
                      run.objective.violation,
                      std::move(run.objective.vector),
                      run.iterations,
                      best,
                      run.converged,
                      seed};
}

}  // namespace entanglecone
