#include <gtest/gtest.h>

#include "support.hpp"

using namespace ectest;

namespace {

MatrixMap diag_holevo_map() {
  return holevo_to_map(HolevoForm{{{e(2, 0, 0), e(2, 0, 0)}, {e(2, 1, 1), e(2, 1, 1)}}});
}

}  // namespace

TEST(ChoiFromAction, Examples) {
  const Matrix p = choi_from_action(2, 2, [](const Matrix& x) { return x; });
  EXPECT_EQ(p, maximally_entangled_p(2));
  for (auto [r, c] : {std::pair{0, 0}, {0, 3}, {3, 0}, {3, 3}}) EXPECT_EQ(p(r, c), Complex(1.0));
  EXPECT_EQ(choi_from_action(2, 2, [](const Matrix& x) { return x.transpose(); }), swap_matrix(2));
  EXPECT_EQ(choi_from_action(2, 3, [](const Matrix&) { return Matrix(3, 3); }), Matrix(6, 6));
}

TEST(ChoiFromAction, WrongOutputSize) {
  EXPECT_THROW(choi_from_action(2, 3, [](const Matrix& x) { return x; }), DimensionError);
}

TEST(MatrixMapType, ConstructionChecks) {
  EXPECT_THROW(MatrixMap(2, 2, Matrix::identity(3)), DimensionError);
  EXPECT_THROW(MatrixMap(0, 2, Matrix()), DimensionError);
  Matrix bad = Matrix::identity(4);
  bad(0, 1) = 1.0;
  EXPECT_THROW(MatrixMap(2, 2, bad), DomainError);
}

TEST(ApplyMap, Examples) {
  EXPECT_EQ(apply_map(identity_map(2), e(2, 0, 0)), e(2, 0, 0));
  EXPECT_EQ(apply_map(transpose_map(2), e(2, 0, 1)), e(2, 1, 0));
  const MatrixMap h = holevo_to_map(HolevoForm{{{e(2, 0, 0), e(2, 1, 1)}}});
  EXPECT_EQ(apply_map(h, e(2, 0, 0)), e(2, 1, 1));
  EXPECT_EQ(apply_map(h, e(2, 1, 1)), Matrix(2, 2));
  EXPECT_THROW(apply_map(h, Matrix::identity(3)), DimensionError);
}

TEST(ApplyMap, MatchesPartialTraceFormulaAndAction) {
  SplitMix64 rng(201);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = pick(rng, 1, 4), m = pick(rng, 1, 4);
    const Matrix k = random::gaussian(rng, m, n);
    const auto action = [&](const Matrix& x) { return k * x * k.adjoint(); };
    const MatrixMap f = map_from_action(n, m, action);
    const Matrix a = random::gaussian(rng, n, n);
    EXPECT_LE(max_abs_diff(apply_map(f, a), apply_map_oracle(f, a)), 1e-12);
    EXPECT_LE(max_abs_diff(apply_map(f, a), action(a)), 1e-12);
  }
}

TEST(ApplySecond, EqualsIdentityTensorMap) {
  SplitMix64 rng(202);
  const MatrixMap f = kraus_to_map(random_kraus(rng, 2, 3, 2));
  const Matrix a = random::gaussian(rng, 2, 2), b = random::gaussian(rng, 2, 2);
  EXPECT_LE(max_abs_diff(apply_second(f, kron(a, b), 2), kron(a, apply_map(f, b))), 1e-12);
}

TEST(MapAdjoint, Examples) {
  EXPECT_EQ(map_adjoint(identity_map(2)).choi(), maximally_entangled_p(2));
  EXPECT_EQ(map_adjoint(transpose_map(2)).choi(), swap_matrix(2));
  SplitMix64 rng(203);
  const Matrix v = random::gaussian(rng, 3, 2);
  const MatrixMap conj = kraus_to_map({v});
  const MatrixMap adj = map_adjoint(conj);
  EXPECT_EQ(adj.dim_in(), 3u);
  EXPECT_EQ(adj.dim_out(), 2u);
  const Matrix b = random::gaussian(rng, 3, 3);
  EXPECT_LE(max_abs_diff(apply_map(adj, b), v.adjoint() * b * v), 1e-12);
  // Kraus provenance is carried to the adjoint.
  ASSERT_NE(adj.kraus(), nullptr);
  EXPECT_LE(max_abs_diff(adj.kraus()->front(), v.adjoint()), 0.0);
}

TEST(MapAdjoint, TracePairingDuality) {
  SplitMix64 rng(204);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = pick(rng, 1, 4), m = pick(rng, 1, 4);
    const MatrixMap f = t % 2 == 0 ? kraus_to_map(random_kraus(rng, n, m, pick(rng, 1, 3)))
                                   : MatrixMap(n, m, random::hermitian(rng, n * m));
    const MatrixMap adj = map_adjoint(f);
    const Matrix a = random::gaussian(rng, n, n), b = random::gaussian(rng, m, m);
    EXPECT_NEAR(std::abs(trace(apply_map(f, a) * b) - trace(a * apply_map(adj, b))), 0.0, 1e-10);
  }
}

TEST(MapTransposeConjugate, Examples) {
  EXPECT_EQ(map_transpose_conjugate(transpose_map(2)).choi(), swap_matrix(2));
  EXPECT_EQ(map_transpose_conjugate(identity_map(2)).choi(), maximally_entangled_p(2));
}

TEST(MapTransposeConjugate, ChoiIsFullTranspose) {
  SplitMix64 rng(205);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = pick(rng, 1, 4), m = pick(rng, 1, 4);
    const MatrixMap h = holevo_to_map(random_holevo(rng, n, m, pick(rng, 1, 3)));
    const MatrixMap ht = map_transpose_conjugate(h);
    EXPECT_LE(max_abs_diff(ht.choi(), h.choi().transpose()), 1e-12);
    ASSERT_NE(ht.holevo(), nullptr);
    EXPECT_LE(max_abs_diff(holevo_to_map(*ht.holevo()).choi(), ht.choi()), 1e-12);
    const MatrixMap k = kraus_to_map(random_kraus(rng, n, m, pick(rng, 1, 3)));
    const MatrixMap kt = map_transpose_conjugate(k);
    EXPECT_LE(max_abs_diff(kt.choi(), k.choi().transpose()), 1e-12);
    ASSERT_NE(kt.kraus(), nullptr);
    EXPECT_LE(max_abs_diff(kraus_to_map(*kt.kraus()).choi(), kt.choi()), 1e-12);
    // x -> conj(f(conj(x))) by definition.
    const Matrix a = random::gaussian(rng, n, n);
    EXPECT_LE(max_abs_diff(apply_map(kt, a), apply_map(k, a.conj()).conj()), 1e-12);
  }
}

TEST(HolevoToMap, Examples) {
  EXPECT_EQ(holevo_to_map(HolevoForm{{{e(2, 0, 0), e(2, 1, 1)}}}).choi(), Matrix::diagonal({0, 1, 0, 0}));
  EXPECT_LE(max_abs_diff(holevo_to_map(HolevoForm{{{Matrix::identity(2) / 2.0, Matrix::identity(2)}}}).choi(),
                         Matrix::identity(4) / 2.0),
            0.0);
  EXPECT_EQ(diag_holevo_map().choi(), Matrix::diagonal({1, 0, 0, 1}));
}

TEST(HolevoToMap, ActionIsFunctionalTimesOperator) {
  SplitMix64 rng(206);
  for (int t = 0; t < 50; ++t) {
    const HolevoForm hf = random_holevo(rng, 3, 2, 3);
    const MatrixMap f = holevo_to_map(hf);
    const Matrix x = random::gaussian(rng, 3, 3);
    Matrix expect(2, 2);
    for (const auto& term : hf.terms) expect += term.b * trace(term.omega_density * x);
    EXPECT_LE(max_abs_diff(apply_map(f, x), expect), 1e-12);
  }
}

TEST(HolevoToMap, DualDensityIsManifestlySeparable) {
  SplitMix64 rng(207);
  for (int t = 0; t < 50; ++t) {
    const HolevoForm hf = random_holevo(rng, 2, 3, 2);
    Matrix expect(6, 6);
    for (const auto& term : hf.terms) expect += kron(term.omega_density, term.b.transpose());
    EXPECT_LE(max_abs_diff(state_from_map(holevo_to_map(hf)).density(), expect), 1e-12);
    const SeparableEnsemble ens = ensemble_from_holevo(hf);
    EXPECT_NO_THROW(ens.validate());
    const Matrix unit = expect / std::real(trace(expect));
    EXPECT_LE(max_abs_diff(ens.density(), unit), 1e-12);
  }
}

TEST(HolevoToMap, ValidationFailures) {
  EXPECT_THROW(holevo_to_map(HolevoForm{}), DomainError);
  EXPECT_THROW(holevo_to_map(HolevoForm{{{Matrix::diagonal({1, -1}), e(2, 0, 0)}}}), DomainError);
  EXPECT_THROW(holevo_to_map(HolevoForm{{{e(2, 0, 0), Matrix(2, 2)}}}), DomainError);
  EXPECT_THROW(holevo_to_map(HolevoForm{{{e(2, 0, 0), e(2, 0, 0)}, {e(3, 0, 0), e(2, 0, 0)}}}), DimensionError);
}

TEST(KrausToMap, Examples) {
  EXPECT_EQ(kraus_to_map({Matrix::identity(2)}).choi(), maximally_entangled_p(2));
  const Matrix v = e(2, 0, 1);
  const MatrixMap f = kraus_to_map({v});
  Matrix expect(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) expect += kron(e(2, i, j), v * e(2, i, j) * e(2, 1, 0));
  EXPECT_EQ(f.choi(), expect);
  EXPECT_TRUE(is_psd(f.choi()).psd);
  SplitMix64 rng(208);
  EXPECT_TRUE(is_psd(kraus_to_map(random_kraus(rng, 2, 2, 2)).choi()).psd);
}

TEST(KrausToMap, ShapeErrors) {
  EXPECT_THROW(kraus_to_map({}), DimensionError);
  EXPECT_THROW(kraus_to_map({Matrix(2, 2), Matrix(3, 2)}), DimensionError);
}

TEST(StateFromMap, Examples) {
  const BipartiteState s = state_from_map(identity_map(2));
  EXPECT_EQ(s.density(), maximally_entangled_p(2));
  EXPECT_DOUBLE_EQ(s.mass(), 2.0);
  EXPECT_LE(max_abs_diff(s.normalized_density(), maximally_entangled_p(2) / 2.0), 0.0);
  EXPECT_EQ(state_from_map(holevo_to_map(HolevoForm{{{e(2, 0, 0), e(2, 1, 1)}}})).density(),
            kron(e(2, 0, 0), e(2, 1, 1)));
  EXPECT_THROW(state_from_map(transpose_map(2)), DomainError);
}

TEST(MapFromState, Examples) {
  const MatrixMap half = map_from_state(BipartiteState({2, 2}, maximally_entangled_p(2) / 2.0));
  EXPECT_LE(max_abs_diff(half.choi(), identity_map(2).choi() / 2.0), 0.0);
  const MatrixMap f = map_from_state(BipartiteState({2, 2}, kron(e(2, 0, 0), e(2, 0, 0))));
  EXPECT_EQ(apply_map(f, e(2, 0, 0)), e(2, 0, 0));
  EXPECT_EQ(apply_map(f, e(2, 1, 1)), Matrix(2, 2));
}

TEST(MapFromState, RoundTrip) {
  SplitMix64 rng(209);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = pick(rng, 1, 4), m = pick(rng, 1, 4);
    const MatrixMap f = kraus_to_map(random_kraus(rng, n, m, pick(rng, 1, 3)));
    EXPECT_EQ(map_from_state(state_from_map(f)).choi(), f.choi());
    const BipartiteState s({n, m}, random_mixed_state(rng, n * m, 3));
    EXPECT_EQ(state_from_map(map_from_state(s)).density(), s.density());
  }
}

TEST(BipartiteStateType, Validation) {
  EXPECT_THROW(BipartiteState({2, 2}, swap_matrix(2)), DomainError);
  EXPECT_THROW(BipartiteState({2, 2}, Matrix(4, 4)), DomainError);
  EXPECT_THROW(BipartiteState({2, 3}, Matrix::identity(4)), DimensionError);
}

TEST(PairingValue, Examples) {
  const MatrixMap id = identity_map(2);
  EXPECT_EQ(pairing_value(id, e(2, 0, 0), e(2, 0, 0)), Complex(1.0));
  EXPECT_EQ(pairing_value(id, Matrix::identity(2), Matrix::identity(2)), Complex(2.0));
  EXPECT_EQ(pairing_value(id, e(2, 0, 1), e(2, 0, 1)), Complex(1.0));
  EXPECT_THROW(pairing_value(id, e(2, 0, 0), e(3, 0, 0)), DimensionError);
}

TEST(PairingValue, EqualsDualDensityFunctional) {
  SplitMix64 rng(210);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = pick(rng, 1, 4), m = pick(rng, 1, 4);
    const MatrixMap f = t % 2 == 0 ? kraus_to_map(random_kraus(rng, n, m, 2))
                                   : holevo_to_map(random_holevo(rng, n, m, 2));
    const Matrix a = random::gaussian(rng, n, n), b = random::gaussian(rng, m, m);
    const Complex direct = trace(f.choi().transpose() * kron(a, b));
    EXPECT_NEAR(std::abs(pairing_value(f, a, b) - direct), 0.0, 1e-10);
  }
}
