#pragma once

// Generators and reference computations shared by the test executables. The
// oracles here deliberately avoid the library routines they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "entanglecone/entanglecone.hpp"

namespace ectest {

using namespace entanglecone;

inline Matrix e(std::size_t n, std::size_t i, std::size_t j) { return Matrix::unit(n, i, j); }

inline std::size_t pick(SplitMix64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

// ---- generators ----

inline Matrix random_psd(SplitMix64& rng, std::size_t n, std::size_t rank) {
  const Matrix a = random::gaussian(rng, n, rank);
  return a * a.adjoint();
}

inline HolevoForm random_holevo(SplitMix64& rng, std::size_t n, std::size_t m, std::size_t terms) {
  HolevoForm hf;
  for (std::size_t k = 0; k < terms; ++k) {
    hf.terms.push_back({random::density(rng, n, pick(rng, 1, n)), random_psd(rng, m, pick(rng, 1, m))});
  }
  return hf;
}

inline KrausList random_kraus(SplitMix64& rng, std::size_t n, std::size_t m, std::size_t count) {
  KrausList ks;
  for (std::size_t k = 0; k < count; ++k) ks.push_back(random::gaussian(rng, m, n));
  return ks;
}

// Mixture of `terms` random pure states, unit trace.
inline Matrix random_mixed_state(SplitMix64& rng, std::size_t dim, std::size_t terms) {
  Matrix rho(dim, dim);
  for (std::size_t k = 0; k < terms; ++k) rho += outer(random::unit_vector(rng, dim)) * rng.uniform();
  return rho / std::real(trace(rho));
}

// Ensemble with `blocks` orthogonal blocks on C^n (x) C^m; block k owns a
// contiguous slice of the basis on both sides. Terms are shuffled.
struct BlockEnsemble {
  SeparableEnsemble ens;
  std::size_t blocks;
};

inline BlockEnsemble block_ensemble(SplitMix64& rng, std::size_t blocks, std::size_t n, std::size_t m) {
  std::vector<std::size_t> acut(blocks + 1), bcut(blocks + 1);
  for (std::size_t k = 0; k <= blocks; ++k) {
    acut[k] = k * n / blocks;
    bcut[k] = k * m / blocks;
  }
  const Matrix ua = random::unitary(rng, n);
  const Matrix ub = random::unitary(rng, m);
  std::vector<EnsembleTerm> terms;
  for (std::size_t k = 0; k < blocks; ++k) {
    const std::size_t na = acut[k + 1] - acut[k], nb = bcut[k + 1] - bcut[k];
    const std::size_t count = pick(rng, 1, 3);
    for (std::size_t c = 0; c < count; ++c) {
      // The first term of each block has full support on it, so the block is connected.
      const std::size_t ra = c == 0 ? na : pick(rng, 1, na), rb = c == 0 ? nb : pick(rng, 1, nb);
      Matrix a(n, n), b(m, m);
      const Matrix sa = random::density(rng, na, ra), sb = random::density(rng, nb, rb);
      for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) a(acut[k] + i, acut[k] + j) = sa(i, j);
      for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j) b(bcut[k] + i, bcut[k] + j) = sb(i, j);
      terms.push_back({0.1 + rng.uniform(), hermitian_part(ua * a * ua.adjoint()), hermitian_part(ub * b * ub.adjoint())});
    }
  }
  for (std::size_t i = terms.size(); i > 1; --i) std::swap(terms[i - 1], terms[rng() % i]);
  double total = 0.0;
  for (const auto& t : terms) total += t.weight;
  for (auto& t : terms) t.weight /= total;
  return {SeparableEnsemble{std::move(terms)}, blocks};
}

// ---- oracles ----

// Entry-by-entry Kronecker product from the index formula.
inline Matrix kron_oracle(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out(r, c) = a(r / b.rows(), c / b.cols()) * b(r % b.rows(), c % b.cols());
  return out;
}

// x^{T_2} = sum_kl (I (x) e_kl) x (I (x) e_kl).
inline Matrix partial_transpose_second_oracle(const Matrix& x, Dims d) {
  Matrix out(d.total(), d.total());
  for (std::size_t k = 0; k < d.m; ++k)
    for (std::size_t l = 0; l < d.m; ++l) {
      const Matrix g = kron_oracle(Matrix::identity(d.n), e(d.m, k, l));
      out += g * x * g;
    }
  return out;
}

// Tr_2(x) = sum_k (I (x) <k|) x (I (x) |k>).
inline Matrix partial_trace_second_oracle(const Matrix& x, Dims d) {
  Matrix out(d.n, d.n);
  for (std::size_t k = 0; k < d.m; ++k) {
    Matrix ket(d.m, 1);
    ket(k, 0) = 1.0;
    const Matrix g = kron_oracle(Matrix::identity(d.n), ket);
    out += g.adjoint() * x * g;
  }
  return out;
}

inline Matrix partial_trace_first_oracle(const Matrix& x, Dims d) {
  Matrix out(d.m, d.m);
  for (std::size_t i = 0; i < d.n; ++i) {
    Matrix ket(d.n, 1);
    ket(i, 0) = 1.0;
    const Matrix g = kron_oracle(ket, Matrix::identity(d.m));
    out += g.adjoint() * x * g;
  }
  return out;
}

// f(a) = Tr_1((a^T (x) I) C).
inline Matrix apply_map_oracle(const MatrixMap& f, const Matrix& a) {
  const Dims d = f.dims();
  return partial_trace_first_oracle(kron_oracle(a.transpose(), Matrix::identity(d.m)) * f.choi(), d);
}

// Characteristic polynomial det(lambda I - x) = lambda^n + c[n-1] lambda^{n-1} + ... + c[0]
// by Faddeev-LeVerrier.
inline std::vector<std::complex<double>> charpoly(const Matrix& x) {
  const std::size_t n = x.rows();
  std::vector<std::complex<double>> c(n + 1);
  c[n] = 1.0;
  Matrix mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    mk = x * mk + Matrix::identity(n) * c[n - k + 1];
    const Matrix xm = x * mk;
    c[n - k] = -trace(xm) / static_cast<double>(k);
  }
  return c;
}

// Real roots of a monic quadratic or cubic with real spectrum, descending.
inline std::vector<double> real_roots_descending(const std::vector<std::complex<double>>& c) {
  std::vector<double> r;
  if (c.size() == 3) {
    const double b = c[1].real();
    const double k = c[0].real();
    const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * k));
    r = {(-b + disc) / 2.0, (-b - disc) / 2.0};
  } else if (c.size() == 4) {
    // Depressed cubic t^3 + p t + q via lambda = t - a/3, trigonometric form.
    const double a = c[2].real();
    const double b = c[1].real();
    const double k = c[0].real();
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + k;
    if (std::abs(p) < 1e-300) {
      const double t = std::cbrt(-q);
      r = {t - a / 3.0, t - a / 3.0, t - a / 3.0};
    } else {
      const double rad = 2.0 * std::sqrt(-p / 3.0);
      const double arg = std::clamp(3.0 * q / (p * rad), -1.0, 1.0);
      const double phi = std::acos(arg) / 3.0;
      for (int j = 0; j < 3; ++j) r.push_back(rad * std::cos(phi - 2.0 * std::numbers::pi * j / 3.0) - a / 3.0);
    }
  }
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

}  // namespace ectest
