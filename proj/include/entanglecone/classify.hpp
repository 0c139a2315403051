#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "entanglecone/definite_set.hpp"

namespace entanglecone {

enum class PositiveVerdict { CertifiedNonpositive, ProbablyPositive };

enum class EbVerdict { CertifiedSeparableChoi, CertifiedEntangledChoi, Inconclusive, NotApplicable };

inline const char* to_string(PositiveVerdict v) {
  return v == PositiveVerdict::CertifiedNonpositive ? "certified-nonpositive" : "probably-positive";
}

inline const char* to_string(EbVerdict v) {
  switch (v) {
    case EbVerdict::CertifiedSeparableChoi: return "certified-separable-choi";
    case EbVerdict::CertifiedEntangledChoi: return "certified-entangled-choi";
    case EbVerdict::Inconclusive: return "inconclusive";
    case EbVerdict::NotApplicable: return "not-applicable";
  }
  return "inconclusive";
}

struct MapClassReport {
  PsdResult cp;
  PsdResult copositive;
  BlockMinResult block;
  PositiveVerdict positive_verdict = PositiveVerdict::ProbablyPositive;
  EbVerdict eb_verdict = EbVerdict::Inconclusive;
  std::optional<HolevoForm> eb_holevo;              // separable-Choi certificate
  std::optional<WitnessCertificate> eb_witness;     // entangled-Choi certificate
};

// Full placement of f in the cone hierarchy. Entanglement breaking is only
// asked of CP maps (otherwise C^T is not a state): separable when f carries a
// Holevo form or has abelian range, entangled when a library witness detects
// the dual state, else inconclusive.
inline MapClassReport classify_map(const MatrixMap& f, Budget budget, std::uint64_t seed, const Tolerances& tol = {},
                                   unsigned threads = 0) {
  MapClassReport rep;
  rep.cp = is_cp(f, tol);
  rep.copositive = is_copositive(f, tol);
  rep.block = block_positivity_minimize(f.choi(), f.dims(), budget, seed, tol, threads);
  rep.positive_verdict = rep.block.value < -block_threshold(f.choi(), tol) ? PositiveVerdict::CertifiedNonpositive
                                                                           : PositiveVerdict::ProbablyPositive;
  if (rep.cp && rep.positive_verdict == PositiveVerdict::CertifiedNonpositive) {
    throw NumericalError("map is CP but a product vector makes its Choi matrix negative");
  }
  if (!rep.cp) {
    rep.eb_verdict = EbVerdict::NotApplicable;
    return rep;
  }
  if (const HolevoForm* hf = f.holevo()) {
    rep.eb_verdict = EbVerdict::CertifiedSeparableChoi;
    rep.eb_holevo = *hf;
    return rep;
  }
  AbelianRangeResult range = abelian_range_decompose(f, tol);
  if (auto* hf = std::get_if<HolevoForm>(&range)) {
    rep.eb_verdict = EbVerdict::CertifiedSeparableChoi;
    rep.eb_holevo = *hf;
    return rep;
  }
  const BipartiteState s = state_from_map(f, tol);
  const StateReport battery = witness_battery(s, build_witness_library(f.dim_out(), tol, threads), tol);
  if (battery.entangled_by) {
    rep.eb_verdict = EbVerdict::CertifiedEntangledChoi;
    rep.eb_witness = battery.entangled_by;
  } else {
    rep.eb_verdict = EbVerdict::Inconclusive;
  }
  return rep;
}

}  // namespace entanglecone
