// Copyright 2026 The mmpdo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded generators and brute-force reference computations.
//
// Nothing here calls the entropy estimator or the chain marginal code in
// mpdo.hpp: dense states are built from Kraus operators and Kronecker
// products, and classical chains are evaluated by dynamic programming.
// All generators are deterministic functions of their seed.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "mmpdo/channels.hpp"
#include "mmpdo/errors.hpp"
#include "mmpdo/mpdo.hpp"
#include "mmpdo/spectra.hpp"
#include "mmpdo/spinchain.hpp"

namespace mmpdo::oracle {

using Rng = std::mt19937_64;
using RealMatrix = Eigen::MatrixXd;

inline ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

/// Hilbert-Schmidt style sample G G^dagger / Tr with G of size d x rank
/// (rank 0 means full rank).
inline DensityMatrix random_density_matrix(Dims dims, Rng& rng, std::size_t rank = 0) {
  const std::size_t d = dims_product(dims);
  if (d > kDenseCap) throw ResourceError("random_density_matrix: dimension over cap");
  const ComplexMatrix g = gaussian_matrix(d, rank == 0 ? d : rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix::from_matrix(rho, std::move(dims));
}

inline DensityMatrix random_density_matrix(Dims dims, std::uint64_t seed, std::size_t rank = 0) {
  Rng rng(seed);
  return random_density_matrix(std::move(dims), rng, rank);
}

/// Columns of a Gaussian matrix orthonormalized by Householder QR.
inline ComplexMatrix random_isometry(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows < cols) throw UsageError("random_isometry: rows < cols");
  const ComplexMatrix g = gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(g.rows(), g.cols());
  // Fix column phases against R's diagonal so the distribution is Haar.
  const ComplexMatrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex dj = r(j, j);
    if (std::abs(dj) > 0) q.col(j) *= dj / std::abs(dj);
  }
  return q;
}

inline ComplexMatrix random_unitary(std::size_t d, Rng& rng) {
  return random_isometry(d, d, rng);
}

inline ComplexMatrix random_hermitian(std::size_t d, Rng& rng) {
  const ComplexMatrix g = gaussian_matrix(d, d, rng);
  return (g + g.adjoint()) * 0.5;
}

/// Channel X -> Tr_env V X V^dagger for a random isometry V into
/// out (x) env. env_dim 0 means d_in * d_out.
inline QuantumChannel random_channel(std::size_t d_in, Dims out_dims, Rng& rng,
                                     std::size_t env_dim = 0) {
  const std::size_t d_out = dims_product(out_dims);
  if (env_dim == 0) env_dim = d_in * d_out;
  if (d_in * d_out > kDenseCap) throw ResourceError("random_channel: dimension over cap");
  const ComplexMatrix v = random_isometry(d_out * env_dim, d_in, rng);
  std::vector<ComplexMatrix> kraus;
  for (std::size_t e = 0; e < env_dim; ++e) {
    ComplexMatrix k(static_cast<Eigen::Index>(d_out), static_cast<Eigen::Index>(d_in));
    for (std::size_t o = 0; o < d_out; ++o) {
      k.row(static_cast<Eigen::Index>(o)) = v.row(static_cast<Eigen::Index>(o * env_dim + e));
    }
    kraus.push_back(std::move(k));
  }
  return channel_from_kraus(kraus, std::move(out_dims), 1e-10);
}

inline QuantumChannel random_channel(std::size_t d_in, Dims out_dims, std::uint64_t seed,
                                     std::size_t env_dim = 0) {
  Rng rng(seed);
  return random_channel(d_in, std::move(out_dims), rng, env_dim);
}

/// Kraus operators from the Choi spectrum: K[o, i] = sqrt(l) v[(i, o)].
inline std::vector<ComplexMatrix> kraus_operators(const QuantumChannel& ch) {
  const HermitianEigen eig = hermitian_eigen(ch.choi(), 1e-8);
  const auto d_in = static_cast<Eigen::Index>(ch.d_in());
  const auto d_out = static_cast<Eigen::Index>(ch.d_out());
  std::vector<ComplexMatrix> out;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) <= 1e-15) continue;
    const double s = std::sqrt(eig.values(k));
    ComplexMatrix op(d_out, d_in);
    for (Eigen::Index i = 0; i < d_in; ++i) {
      for (Eigen::Index o = 0; o < d_out; ++o) op(o, i) = s * eig.vectors(i * d_out + o, k);
    }
    out.push_back(std::move(op));
  }
  return out;
}

/// sum_k (I (x) K_k (x) I) rho (I (x) K_k (x) I)^dagger on subsystem `site`.
inline ComplexMatrix apply_kraus(const ComplexMatrix& rho, const Dims& dims, std::size_t site,
                                 std::span<const ComplexMatrix> kraus) {
  const std::size_t dl = dims_product(std::span(dims).subspan(0, site));
  const std::size_t dr = dims_product(std::span(dims).subspan(site + 1));
  ComplexMatrix out;
  for (const auto& k : kraus) {
    const ComplexMatrix big = kron(kron(identity_matrix(dl), k), identity_matrix(dr));
    const ComplexMatrix term = big * rho * big.adjoint();
    if (out.size() == 0) {
      out = term;
    } else {
      out += term;
    }
  }
  return out;
}

/// Dense state of the chain built with Kraus operators.
inline DensityMatrix dense_state(const MarkovianMpdo& m) {
  if (dims_product(m.site_dims()) > kDenseCap) throw ResourceError("dense_state: over cap");
  ComplexMatrix rho = m.initial().matrix();
  Dims dims{m.site_dims()[0]};
  for (std::size_t k = 0; k < m.channels().size(); ++k) {
    const auto kraus = kraus_operators(m.channels()[k]);
    rho = apply_kraus(rho, dims, k, kraus);
    dims.push_back(m.site_dims()[k + 1]);
  }
  return DensityMatrix::from_matrix(rho, std::move(dims), kAppliedStateTol);
}

/// Dense state after the first `steps` channels, on sites 0..steps.
inline DensityMatrix dense_prefix_state(const MarkovianMpdo& m, std::size_t steps) {
  ComplexMatrix rho = m.initial().matrix();
  Dims dims{m.site_dims()[0]};
  for (std::size_t k = 0; k < steps; ++k) {
    const auto kraus = kraus_operators(m.channels()[k]);
    rho = apply_kraus(rho, dims, k, kraus);
    dims.push_back(m.site_dims()[k + 1]);
  }
  return DensityMatrix::from_matrix(rho, std::move(dims), kAppliedStateTol);
}

// ---------------------------------------------------------------------------
// Classical Markov chains
// ---------------------------------------------------------------------------

inline void check_distribution(const Eigen::VectorXd& p, const std::string& what) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) >= 0.0)) throw UsageError(what + " has a negative entry");
    s += p(i);
  }
  if (std::abs(s - 1.0) > 1e-12) throw UsageError(what + " does not sum to 1");
}

/// Diagonal embedding of a classical chain: |k><k| -> |k><k| (x)
/// sum_j P(j|k) |j><j|, with off-diagonal inputs sent to zero.
inline MarkovianMpdo classical_markov_mpdo(const std::vector<RealMatrix>& transitions,
                                           const Eigen::VectorXd& initial) {
  check_distribution(initial, "initial distribution");
  ComplexMatrix rho0 = ComplexMatrix::Zero(initial.size(), initial.size());
  for (Eigen::Index i = 0; i < initial.size(); ++i) rho0(i, i) = initial(i);
  std::vector<QuantumChannel> channels;
  Eigen::Index d = initial.size();
  for (std::size_t k = 0; k < transitions.size(); ++k) {
    const RealMatrix& p = transitions[k];
    if (p.rows() != d) {
      throw UsageError("transition " + std::to_string(k) + " has wrong row count");
    }
    const Eigen::Index dn = p.cols();
    ComplexMatrix choi = ComplexMatrix::Zero(d * d * dn, d * d * dn);
    for (Eigen::Index a = 0; a < d; ++a) {
      check_distribution(p.row(a).transpose(),
                         "row " + std::to_string(a) + " of transition " + std::to_string(k));
      for (Eigen::Index j = 0; j < dn; ++j) {
        const Eigen::Index idx = (a * d + a) * dn + j;
        choi(idx, idx) = p(a, j);
      }
    }
    channels.push_back(QuantumChannel::from_choi(std::move(choi), static_cast<std::size_t>(d),
                                                 Dims{static_cast<std::size_t>(d),
                                                      static_cast<std::size_t>(dn)}));
    d = dn;
  }
  return MarkovianMpdo(DensityMatrix::from_matrix(rho0), std::move(channels));
}

inline double shannon_entropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) h -= p(i) * std::log(p(i));
  }
  return h;
}

/// H(X_1..X_n) = H(X_1) + sum_k sum_a p_k(a) H(P_k(a, .)).
inline double classical_chain_entropy(const std::vector<RealMatrix>& transitions,
                                      const Eigen::VectorXd& initial) {
  double h = shannon_entropy(initial);
  Eigen::VectorXd p = initial;
  for (const auto& t : transitions) {
    for (Eigen::Index a = 0; a < p.size(); ++a) {
      h += p(a) * shannon_entropy(t.row(a).transpose());
    }
    p = (p.transpose() * t).transpose();
  }
  return h;
}

inline RealMatrix random_stochastic(std::size_t rows, std::size_t cols, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  RealMatrix p(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) p(i, j) = unif(rng);
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

inline Eigen::VectorXd random_distribution(std::size_t d, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  Eigen::VectorXd p(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = unif(rng);
  return p / p.sum();
}

// ---------------------------------------------------------------------------
// Chain generators
// ---------------------------------------------------------------------------

/// Product chain: initial taus[0], channel k = X -> X (x) taus[k+1].
inline MarkovianMpdo product_chain(const std::vector<DensityMatrix>& taus) {
  std::vector<QuantumChannel> channels;
  for (std::size_t k = 0; k + 1 < taus.size(); ++k) {
    channels.push_back(append_channel(taus[k].dim(), taus[k + 1]));
  }
  return MarkovianMpdo(taus.front(), std::move(channels));
}

/// Petz chain of a random global state's pair marginals, each channel mixed
/// with a random channel of weight uniform in [0, noise].
inline MarkovianMpdo random_markov_chain(const Dims& site_dims, std::uint64_t seed,
                                         double noise, std::size_t rank = 0) {
  Rng rng(seed);
  const DensityMatrix global = random_density_matrix(site_dims, rng, rank);
  std::uniform_real_distribution<double> weight(0.0, noise);
  std::vector<QuantumChannel> channels;
  for (std::size_t k = 0; k + 1 < site_dims.size(); ++k) {
    const std::size_t keep[] = {k, k + 1};
    const QuantumChannel petz = petz_recovery(partial_trace(global, keep));
    const QuantumChannel noisy =
        random_channel(site_dims[k], Dims{site_dims[k], site_dims[k + 1]}, rng);
    channels.push_back(mix_channels(noisy, petz, weight(rng)));
  }
  return MarkovianMpdo(partial_trace(global, {0}), std::move(channels));
}

/// Chain of independent random channels; usually far from Markovian.
inline MarkovianMpdo random_channel_chain(const Dims& site_dims, std::uint64_t seed) {
  Rng rng(seed);
  DensityMatrix initial = random_density_matrix(Dims{site_dims[0]}, rng);
  std::vector<QuantumChannel> channels;
  for (std::size_t k = 0; k + 1 < site_dims.size(); ++k) {
    channels.push_back(random_channel(site_dims[k], Dims{site_dims[k], site_dims[k + 1]}, rng));
  }
  return MarkovianMpdo(std::move(initial), std::move(channels));
}

// ---------------------------------------------------------------------------
// Entropy decomposition
// ---------------------------------------------------------------------------

struct EntropyDecomposition {
  double exact = 0.0;
  /// r_i = S(i..n-1) - S(i,i+1) - S(i+1..n-1) + S(i+1), i = 0..n-3.
  std::vector<double> signed_residuals;
  std::vector<double> residuals;  // |r_i|
};

/// Per-step entropy residuals of the dense state. Their signed sum equals
/// S(rho) minus the pair-minus-single estimate.
inline EntropyDecomposition entropy_decomposition_oracle(const MarkovianMpdo& m) {
  const DensityMatrix rho = dense_state(m);
  const std::size_t n = m.sites();
  EntropyDecomposition out;
  out.exact = von_neumann_entropy(rho);
  auto range_entropy = [&](std::size_t first, std::size_t last) {
    return von_neumann_entropy(marginal(rho, first, last));
  };
  for (std::size_t i = 0; i + 2 < n; ++i) {
    const double r = range_entropy(i, n - 1) - range_entropy(i, i + 1) -
                     range_entropy(i + 1, n - 1) + range_entropy(i + 1, i + 1);
    out.signed_residuals.push_back(r);
    out.residuals.push_back(std::abs(r));
  }
  return out;
}

}  // namespace mmpdo::oracle
