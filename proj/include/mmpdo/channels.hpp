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

// Quantum channels in Choi form.
//
// The Choi matrix is stored unnormalized,
//   C = sum_{i,j} |i><j|_{in'} (x) Phi(|i><j|),
// with the input copy as the left (slow) factor. The Jamiolkowski state is
// C / d_in. CP <=> C >= 0, TP <=> Tr_out C = I.

#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmpdo/errors.hpp"
#include "mmpdo/spectra.hpp"

namespace mmpdo {

inline constexpr double kCptpTol = 1e-8;

/// Tolerances used to validate states produced by channel application.
/// Looser than for inputs: each channel that is only tol_cptp-valid can
/// move the trace and the spectrum floor by about tol_cptp.
inline constexpr DensityTolerances kAppliedStateTol{1e-9, 1e-8, 1e-6};

struct ChannelDefects {
  double hermiticity = 0.0;  // max |C - C^dagger|
  double cp = 0.0;           // max(0, -lambda_min(C))
  double tp = 0.0;           // ||Tr_out C - I||_op

  bool within(double tol) const {
    return hermiticity <= tol && cp <= tol && tp <= tol;
  }
};

class QuantumChannel {
 public:
  /// Validated construction; throws InvalidChannelError carrying both
  /// defects when the map is not CPTP within `tol`.
  static QuantumChannel from_choi(ComplexMatrix choi, std::size_t d_in, Dims out_dims,
                                  double tol = kCptpTol) {
    QuantumChannel ch = unvalidated(std::move(choi), d_in, std::move(out_dims));
    if (!ch.defects_.within(tol)) {
      throw InvalidChannelError(
          "invalid channel: CP defect " + std::to_string(ch.defects_.cp) +
              ", TP defect " + std::to_string(ch.defects_.tp) +
              ", hermiticity defect " + std::to_string(ch.defects_.hermiticity),
          ch.defects_.cp, ch.defects_.tp);
    }
    return ch;
  }

  /// Checks only the dimensions; defects are measured and stored but not
  /// enforced. The verifier builds witnesses this way.
  static QuantumChannel unvalidated(ComplexMatrix choi, std::size_t d_in, Dims out_dims) {
    if (d_in == 0 || out_dims.empty()) {
      throw UsageError("channel needs a positive input dimension and an output");
    }
    for (std::size_t d : out_dims) {
      if (d == 0) throw UsageError("channel output dimension must be positive");
    }
    const std::size_t side = d_in * dims_product(out_dims);
    if (choi.rows() != choi.cols() || static_cast<std::size_t>(choi.rows()) != side) {
      throw UsageError("Choi matrix side " + std::to_string(choi.rows()) +
                       " does not match d_in * d_out = " + std::to_string(side));
    }
    QuantumChannel ch(std::move(choi), d_in, std::move(out_dims));
    ch.defects_ = ch.measure_defects();
    return ch;
  }

  std::size_t d_in() const { return d_in_; }
  const Dims& out_dims() const { return out_dims_; }
  std::size_t d_out() const { return dims_product(out_dims_); }
  const ComplexMatrix& choi() const { return choi_; }
  const ChannelDefects& defects() const { return defects_; }

  /// Subsystem dims of the Choi matrix: (d_in, out_dims...).
  Dims choi_dims() const {
    Dims dims{d_in_};
    dims.insert(dims.end(), out_dims_.begin(), out_dims_.end());
    return dims;
  }

 private:
  QuantumChannel(ComplexMatrix choi, std::size_t d_in, Dims out_dims)
      : d_in_(d_in), out_dims_(std::move(out_dims)), choi_(std::move(choi)) {}

  ChannelDefects measure_defects() const {
    ChannelDefects out;
    out.hermiticity = hermiticity_defect(choi_);
    const ComplexMatrix sym = (choi_ + choi_.adjoint()) * 0.5;
    // The symmetrized matrix is Hermitian to rounding, so no drift check.
    const RealVector values = hermitian_eigenvalues(sym, 1.0);
    out.cp = std::max(0.0, -values(0));
    const std::size_t keep[] = {0};
    const ComplexMatrix reduced = partial_trace(sym, choi_dims(), keep);
    out.tp = operator_norm(reduced - identity_matrix(d_in_), 1.0);
    return out;
  }

  std::size_t d_in_;
  Dims out_dims_;
  ComplexMatrix choi_;
  ChannelDefects defects_;
};

inline QuantumChannel channel_from_choi(ComplexMatrix choi, std::size_t d_in, Dims out_dims,
                                        double tol = kCptpTol) {
  return QuantumChannel::from_choi(std::move(choi), d_in, std::move(out_dims), tol);
}

// ---------------------------------------------------------------------------
// Standard channels
// ---------------------------------------------------------------------------

/// vec(K) with (i, o) indexing, so that C = sum_k vec(K_k) vec(K_k)^dagger.
inline Eigen::VectorXcd choi_vector(const ComplexMatrix& kraus) {
  const Eigen::Index d_out = kraus.rows();
  const Eigen::Index d_in = kraus.cols();
  Eigen::VectorXcd v(d_in * d_out);
  for (Eigen::Index i = 0; i < d_in; ++i) {
    for (Eigen::Index o = 0; o < d_out; ++o) v(i * d_out + o) = kraus(o, i);
  }
  return v;
}

inline QuantumChannel channel_from_kraus(std::span<const ComplexMatrix> kraus,
                                         Dims out_dims, double tol = kCptpTol) {
  if (kraus.empty()) throw UsageError("channel_from_kraus: no Kraus operators");
  const std::size_t d_in = static_cast<std::size_t>(kraus.front().cols());
  const Eigen::Index side = kraus.front().cols() * kraus.front().rows();
  ComplexMatrix choi = ComplexMatrix::Zero(side, side);
  for (const auto& k : kraus) {
    const Eigen::VectorXcd v = choi_vector(k);
    choi += v * v.adjoint();
  }
  return QuantumChannel::from_choi(std::move(choi), d_in, std::move(out_dims), tol);
}

inline QuantumChannel identity_channel(std::size_t d) {
  const ComplexMatrix id = identity_matrix(d);
  const Eigen::VectorXcd v = choi_vector(id);
  return QuantumChannel::from_choi(v * v.adjoint(), d, Dims{d});
}

/// X -> Tr(X) tau.
inline QuantumChannel replacement_channel(std::size_t d_in, const DensityMatrix& tau) {
  return QuantumChannel::from_choi(kron(identity_matrix(d_in), tau.matrix()), d_in,
                                   tau.dims());
}

/// X -> X (x) tau: extends a site by an uncorrelated neighbour.
inline QuantumChannel append_channel(std::size_t d, const DensityMatrix& tau) {
  const Eigen::VectorXcd v = choi_vector(identity_matrix(d));
  Dims out{d};
  out.insert(out.end(), tau.dims().begin(), tau.dims().end());
  return QuantumChannel::from_choi(kron(v * v.adjoint(), tau.matrix()), d, std::move(out));
}

/// X -> (1-p) X + p Tr(X) I/d.
inline QuantumChannel depolarizing_channel(std::size_t d, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("depolarizing_channel: p outside [0,1]");
  const Eigen::VectorXcd v = choi_vector(identity_matrix(d));
  ComplexMatrix choi = (1.0 - p) * (v * v.adjoint()) +
                       (p / static_cast<double>(d)) * identity_matrix(d * d);
  return QuantumChannel::from_choi(std::move(choi), d, Dims{d});
}

/// Convex combination w*A + (1-w)*B of two channels with the same dims.
inline QuantumChannel mix_channels(const QuantumChannel& a, const QuantumChannel& b, double w) {
  if (a.d_in() != b.d_in() || a.out_dims() != b.out_dims()) {
    throw UsageError("mix_channels: dimension mismatch");
  }
  return QuantumChannel::unvalidated(w * a.choi() + (1.0 - w) * b.choi(), a.d_in(),
                                     a.out_dims());
}

// ---------------------------------------------------------------------------
// Application
// ---------------------------------------------------------------------------

namespace detail {

/// Applies the Choi matrix `choi` (din -> dout) to the middle factor of an
/// operator on (dl, din, dr). Returns an operator on (dl, dout, dr).
inline ComplexMatrix apply_choi(const ComplexMatrix& rho, std::size_t dl, std::size_t din,
                                std::size_t dr, const ComplexMatrix& choi, std::size_t dout) {
  using Idx = Eigen::Index;
  const Idx in2 = static_cast<Idx>(din * din);
  const Idx out2 = static_cast<Idx>(dout * dout);
  // transfer(o*dout + o', i*din + j) = C((i,o),(j,o'))
  ComplexMatrix transfer(out2, in2);
  for (std::size_t i = 0; i < din; ++i) {
    for (std::size_t j = 0; j < din; ++j) {
      for (std::size_t o = 0; o < dout; ++o) {
        for (std::size_t o2 = 0; o2 < dout; ++o2) {
          transfer(static_cast<Idx>(o * dout + o2), static_cast<Idx>(i * din + j)) =
              choi(static_cast<Idx>(i * dout + o), static_cast<Idx>(j * dout + o2));
        }
      }
    }
  }
  const std::size_t out_side = dl * dout * dr;
  ComplexMatrix out(static_cast<Idx>(out_side), static_cast<Idx>(out_side));
  Eigen::MatrixXcd block(in2, static_cast<Idx>(dr * dr));
  for (std::size_t l = 0; l < dl; ++l) {
    for (std::size_t l2 = 0; l2 < dl; ++l2) {
      for (std::size_t i = 0; i < din; ++i) {
        for (std::size_t j = 0; j < din; ++j) {
          for (std::size_t r = 0; r < dr; ++r) {
            for (std::size_t r2 = 0; r2 < dr; ++r2) {
              block(static_cast<Idx>(i * din + j), static_cast<Idx>(r * dr + r2)) =
                  rho(static_cast<Idx>((l * din + i) * dr + r),
                      static_cast<Idx>((l2 * din + j) * dr + r2));
            }
          }
        }
      }
      const ComplexMatrix mapped = transfer * block;
      for (std::size_t o = 0; o < dout; ++o) {
        for (std::size_t o2 = 0; o2 < dout; ++o2) {
          for (std::size_t r = 0; r < dr; ++r) {
            for (std::size_t r2 = 0; r2 < dr; ++r2) {
              out(static_cast<Idx>((l * dout + o) * dr + r),
                  static_cast<Idx>((l2 * dout + o2) * dr + r2)) =
                  mapped(static_cast<Idx>(o * dout + o2), static_cast<Idx>(r * dr + r2));
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// (I (x) Phi (x) I)(rho) with Phi acting on subsystem `site` (0-based). The
/// output dims splice Phi's out_dims in place of that subsystem.
inline DensityMatrix apply(const QuantumChannel& phi, const DensityMatrix& rho,
                           std::size_t site) {
  const Dims& dims = rho.dims();
  if (site >= dims.size()) throw UsageError("apply: site index out of range");
  if (dims[site] != phi.d_in()) {
    throw UsageError("apply: subsystem " + std::to_string(site) + " has dimension " +
                     std::to_string(dims[site]) + " but channel expects " +
                     std::to_string(phi.d_in()));
  }
  const std::size_t dl = dims_product(std::span(dims).subspan(0, site));
  const std::size_t dr = dims_product(std::span(dims).subspan(site + 1));
  ComplexMatrix out =
      detail::apply_choi(rho.matrix(), dl, phi.d_in(), dr, phi.choi(), phi.d_out());
  Dims out_dims(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(site));
  out_dims.insert(out_dims.end(), phi.out_dims().begin(), phi.out_dims().end());
  out_dims.insert(out_dims.end(), dims.begin() + static_cast<std::ptrdiff_t>(site) + 1,
                  dims.end());
  return DensityMatrix::from_matrix(out, std::move(out_dims), kAppliedStateTol);
}

/// The map X -> Tr_{traced}[Phi(X)], `traced` indexing Phi's output
/// subsystems (0-based).
inline QuantumChannel compose_then_trace(const QuantumChannel& phi,
                                         std::span<const std::size_t> traced) {
  const Dims& outs = phi.out_dims();
  std::vector<bool> drop(outs.size(), false);
  for (std::size_t t : traced) {
    if (t >= outs.size()) throw UsageError("compose_then_trace: output index out of range");
    drop[t] = true;
  }
  std::vector<std::size_t> keep{0};
  Dims kept_dims;
  for (std::size_t s = 0; s < outs.size(); ++s) {
    if (!drop[s]) {
      keep.push_back(s + 1);
      kept_dims.push_back(outs[s]);
    }
  }
  if (kept_dims.empty()) {
    throw UsageError("compose_then_trace: cannot trace out every output subsystem");
  }
  ComplexMatrix reduced = partial_trace(phi.choi(), phi.choi_dims(), keep);
  return QuantumChannel::unvalidated(std::move(reduced), phi.d_in(), std::move(kept_dims));
}

inline QuantumChannel compose_then_trace(const QuantumChannel& phi,
                                         std::initializer_list<std::size_t> traced) {
  return compose_then_trace(phi, std::span<const std::size_t>(traced.begin(), traced.size()));
}

/// Sequential composition: first `inner`, then `outer` on inner's output
/// subsystem `site` (0-based), with identity on the other output subsystems.
inline QuantumChannel compose_on_site(const QuantumChannel& inner, const QuantumChannel& outer,
                                      std::size_t site) {
  // Applying `outer` to an output factor of the Choi operator of `inner`
  // gives the Choi operator of the composition.
  const Dims dims = inner.choi_dims();
  if (site >= inner.out_dims().size() || inner.out_dims()[site] != outer.d_in()) {
    throw UsageError("compose_on_site: dimension mismatch");
  }
  const std::size_t pos = site + 1;
  const std::size_t dl = dims_product(std::span(dims).subspan(0, pos));
  const std::size_t dr = dims_product(std::span(dims).subspan(pos + 1));
  ComplexMatrix choi =
      detail::apply_choi(inner.choi(), dl, outer.d_in(), dr, outer.choi(), outer.d_out());
  Dims out(inner.out_dims().begin(), inner.out_dims().begin() + static_cast<std::ptrdiff_t>(site));
  out.insert(out.end(), outer.out_dims().begin(), outer.out_dims().end());
  out.insert(out.end(), inner.out_dims().begin() + static_cast<std::ptrdiff_t>(site) + 1,
             inner.out_dims().end());
  return QuantumChannel::unvalidated(std::move(choi), inner.d_in(), std::move(out));
}

// ---------------------------------------------------------------------------
// Jamiolkowski states and distances
// ---------------------------------------------------------------------------

struct JamiolkowskiState {
  DensityMatrix state;  // dims (d_in, out_dims...)
};

inline JamiolkowskiState jamiolkowski_state(const QuantumChannel& phi) {
  return {DensityMatrix::trusted(phi.choi() / static_cast<double>(phi.d_in()),
                                 phi.choi_dims())};
}

inline QuantumChannel channel_from_jamiolkowski(const JamiolkowskiState& j, std::size_t d_in,
                                                double tol = kCptpTol) {
  const Dims& dims = j.state.dims();
  Dims out(dims.begin() + 1, dims.end());
  return QuantumChannel::from_choi(j.state.matrix() * static_cast<double>(d_in), d_in,
                                   std::move(out), tol);
}

struct ChannelDistance {
  double sharp = 0.0;  // ||Tr_out |C - C'| ||_op
  double loose = 0.0;  // d_in * ||rho_Phi - rho_Phi'||_1
};

/// Two upper bounds on the diamond distance between channels. `sharp` is
/// evaluated on the unnormalized Choi difference, which keeps it a valid
/// diamond-norm bound; sharp <= loose always.
inline ChannelDistance channel_distance_bound(const QuantumChannel& a, const QuantumChannel& b) {
  if (a.d_in() != b.d_in() || a.out_dims() != b.out_dims()) {
    throw UsageError("channel_distance_bound: dimension mismatch");
  }
  const ComplexMatrix diff = a.choi() - b.choi();
  const double herm_tol = 10 * kCptpTol;
  const std::size_t keep[] = {0};
  ChannelDistance out;
  out.sharp = operator_norm(partial_trace(hermitian_abs(diff, herm_tol), a.choi_dims(), keep),
                            herm_tol);
  out.loose = trace_norm(diff, herm_tol);
  return out;
}

// ---------------------------------------------------------------------------
// Finite-precision rounding
// ---------------------------------------------------------------------------

/// Keeps `bits` fractional bits of x, truncating toward zero.
inline double truncate_bits(double x, int bits) {
  return std::ldexp(std::trunc(std::ldexp(x, bits)), -bits);
}

/// Rounds rho to a state whose eigen-data carry `bits` fractional bits.
///
/// The eigenvector amplitudes (real and imaginary parts) and all eigenvalues
/// but the largest are truncated toward zero; the largest eigenvalue absorbs
/// the normalization residue so the result has unit trace. The trace-norm
/// error is at most 5 d^2 2^-bits.
inline DensityMatrix round_density_matrix(const DensityMatrix& rho, int bits,
                                          double tol = kCptpTol) {
  if (bits < 4) throw UsageError("round_density_matrix: bits must be >= 4");
  const HermitianEigen eig = hermitian_eigen(rho.matrix(), kAppliedStateTol.herm);
  const Eigen::Index d = eig.values.size();

  ComplexMatrix vecs(d, d);
  RealVector norms(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const Complex a = eig.vectors(k, j);
      vecs(k, j) = Complex(truncate_bits(a.real(), bits), truncate_bits(a.imag(), bits));
    }
    norms(j) = vecs.col(j).squaredNorm();
  }
  RealVector weights(d);
  double absorbed = 1.0;
  for (Eigen::Index j = 0; j + 1 < d; ++j) {
    weights(j) = truncate_bits(eig.values(j), bits);
    absorbed -= weights(j) * norms(j);
  }
  if (!(norms(d - 1) > 0.0)) {
    throw PrecisionError("round_density_matrix: leading eigenvector truncated to zero");
  }
  weights(d - 1) = absorbed / norms(d - 1);
  if (weights(d - 1) < -tol) {
    throw PrecisionError("round_density_matrix: absorbing eigenvalue " +
                         std::to_string(weights(d - 1)) + " is negative at " +
                         std::to_string(bits) + " bits");
  }
  ComplexMatrix out = vecs * weights.asDiagonal() * vecs.adjoint();
  return DensityMatrix::trusted(std::move(out), rho.dims());
}

namespace detail {

/// C + (I - Tr_out C) (x) I_out / d_out, which makes Tr_out exactly I.
inline ComplexMatrix tp_project(const ComplexMatrix& choi, const Dims& choi_dims) {
  const std::size_t d_in = choi_dims.front();
  const std::size_t d_out = dims_product(choi_dims) / d_in;
  const std::size_t keep[] = {0};
  const ComplexMatrix reduced = partial_trace(choi, choi_dims, keep);
  return choi + kron(identity_matrix(d_in) - reduced, identity_matrix(d_out)) /
                    static_cast<double>(d_out);
}

/// Maps a nearly CPTP Choi matrix to a CPTP one: TP projection, clipping
/// of eigenvalues below -tol and a second projection. If negative
/// eigenvalues beyond -tol survive (typical when the Choi matrix has a
/// kernel), the result is mixed with the completely depolarizing channel
/// by the smallest weight that restores positivity; TP is unaffected.
inline ComplexMatrix restore_cptp(const ComplexMatrix& choi, const Dims& choi_dims, double tol) {
  const std::size_t d_out = dims_product(choi_dims) / choi_dims.front();
  ComplexMatrix c = tp_project((choi + choi.adjoint()) * 0.5, choi_dims);
  HermitianEigen eig = hermitian_eigen(c, 1.0);
  if (eig.values(0) >= -tol) return c;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) < -tol) eig.values(k) = 0.0;
  }
  c = tp_project(eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint(), choi_dims);
  const double lo = hermitian_eigenvalues(c, 1.0)(0);
  if (lo >= -tol) return c;
  const double mu = -lo * static_cast<double>(d_out);
  const double w = mu / (1.0 + mu);
  return (1.0 - w) * c +
         w * identity_matrix(static_cast<std::size_t>(c.rows())) / static_cast<double>(d_out);
}

}  // namespace detail

struct RoundedChannel {
  QuantumChannel channel;
  /// d_in * ||rho_Phi - rho_rounded||_1, an upper bound on the diamond distance.
  double distance_bound;
};

/// Rounds the Jamiolkowski state, then restores trace preservation.
///
/// The rounded Choi matrix is returned to the CPTP set by
/// detail::restore_cptp.
inline RoundedChannel round_channel(const QuantumChannel& phi, int bits,
                                    double tol = kCptpTol) {
  if (bits < 4) throw UsageError("round_channel: bits must be >= 4");
  const JamiolkowskiState j = jamiolkowski_state(phi);
  const DensityMatrix rounded = round_density_matrix(j.state, bits, tol);
  const Dims dims = phi.choi_dims();
  const ComplexMatrix choi =
      detail::restore_cptp(rounded.matrix() * static_cast<double>(phi.d_in()), dims, tol);
  QuantumChannel out = QuantumChannel::unvalidated(choi, phi.d_in(), phi.out_dims());
  if (!out.defects().within(tol)) {
    throw PrecisionError("round_channel: rounded channel is not CPTP at " +
                         std::to_string(bits) + " bits");
  }
  const double bound = trace_norm(phi.choi() - out.choi(), 10 * kCptpTol);
  return {std::move(out), bound};
}

}  // namespace mmpdo
