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

// Desk-scale spin-chain physics: exact Gibbs states, conditional mutual
// information scans, Petz recovery and witness construction by blocking.

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mmpdo/channels.hpp"
#include "mmpdo/decimal.hpp"
#include "mmpdo/errors.hpp"
#include "mmpdo/hamiltonian.hpp"
#include "mmpdo/mpdo.hpp"
#include "mmpdo/spectra.hpp"

namespace mmpdo {

/// A 1D free-energy decision instance: is min F <= alpha, or > beta?
struct FreeEnergyInstance {
  LocalHamiltonian hamiltonian;
  double temperature = 1.0;
  double alpha = 0.0;
  double beta_threshold = 0.0;

  void validate() const {
    if (!(temperature > 0.0)) throw ContractViolation("temperature must be positive");
    if (!(beta_threshold - alpha > 0.0)) {
      throw ContractViolation("beta threshold must exceed alpha");
    }
  }
};

// ---------------------------------------------------------------------------
// Gibbs states
// ---------------------------------------------------------------------------

struct GibbsSpectrum {
  HermitianEigen eigen;
  RealVector weights;  // Boltzmann probabilities per eigenvector
  double log_partition_shifted = 0.0;  // ln sum exp(-beta (E - E_min))
  double ground_energy = 0.0;
};

inline GibbsSpectrum gibbs_spectrum(const LocalHamiltonian& h, double beta,
                                    std::size_t cap = kDenseCap) {
  if (!(beta >= 0.0)) throw UsageError("inverse temperature must be non-negative");
  GibbsSpectrum g;
  g.eigen = hermitian_eigen(h.dense(cap));
  g.ground_energy = g.eigen.values(0);
  g.weights.resize(g.eigen.values.size());
  double z = 0.0;
  for (Eigen::Index i = 0; i < g.weights.size(); ++i) {
    g.weights(i) = std::exp(-beta * (g.eigen.values(i) - g.ground_energy));
    z += g.weights(i);
  }
  g.weights /= z;
  g.log_partition_shifted = std::log(z);
  return g;
}

/// e^{-beta H} / Tr e^{-beta H}, shifted by the ground energy for stability.
inline DensityMatrix gibbs_state(const LocalHamiltonian& h, double beta,
                                 std::size_t cap = kDenseCap) {
  const GibbsSpectrum g = gibbs_spectrum(h, beta, cap);
  ComplexMatrix rho = g.eigen.vectors * g.weights.asDiagonal() * g.eigen.vectors.adjoint();
  return DensityMatrix::from_matrix(rho, h.site_dims(), kAppliedStateTol);
}

struct ThermalSummary {
  double free_energy = 0.0;
  double entropy = 0.0;
  double energy = 0.0;
};

/// Exact thermal quantities at temperature T from the spectrum of H.
inline ThermalSummary thermal_summary(const LocalHamiltonian& h, double temperature,
                                      std::size_t cap = kDenseCap) {
  if (!(temperature > 0.0)) throw UsageError("temperature must be positive");
  const GibbsSpectrum g = gibbs_spectrum(h, 1.0 / temperature, cap);
  ThermalSummary s;
  s.free_energy = g.ground_energy - temperature * g.log_partition_shifted;
  s.energy = g.weights.dot(g.eigen.values);
  s.entropy = entropy_of_spectrum(g.weights);
  return s;
}

/// F(rho) = Tr(rho H) - T S(rho).
inline double free_energy(const DensityMatrix& rho, const LocalHamiltonian& h,
                          double temperature) {
  if (rho.dims() != h.site_dims()) {
    throw UsageError("free_energy: state dims " + dims_to_string(rho.dims()) +
                     " do not match Hamiltonian sites " + dims_to_string(h.site_dims()));
  }
  if (!(temperature > 0.0)) throw UsageError("temperature must be positive");
  const double e = (rho.matrix() * h.dense()).trace().real();
  return e - temperature * von_neumann_entropy(rho);
}

// ---------------------------------------------------------------------------
// CMI decay
// ---------------------------------------------------------------------------

struct DecayRow {
  std::size_t ell = 0;
  double delta = 0.0;
};

struct LogLinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

struct DecayScan {
  std::size_t a_pos = 0;
  std::vector<DecayRow> rows;
  std::optional<LogLinearFit> fit;

  std::string to_csv() const {
    std::ostringstream out;
    out << "ell,delta\n";
    for (const auto& r : rows) out << r.ell << "," << format_decimal(r.delta) << "\n";
    return out.str();
  }
};

/// Least-squares fit of ln(delta) against ell over rows with delta > 1e-12.
inline std::optional<LogLinearFit> fit_log_linear(const std::vector<DecayRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (r.delta > 1e-12) pts.emplace_back(static_cast<double>(r.ell), std::log(r.delta));
  }
  if (pts.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  LogLinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

/// I(A:C|B) of the Gibbs state for A = sites [0, a_pos), B the next ell
/// sites and C the rest, for ell = 1..ell_max.
inline DecayScan cmi_decay_scan(const LocalHamiltonian& h, double beta, std::size_t a_pos,
                                std::size_t ell_max, std::size_t cap = kDenseCap) {
  const std::size_t n = h.sites();
  if (a_pos < 1 || ell_max < 1 || a_pos + ell_max >= n) {
    throw UsageError("cmi_decay_scan: need 1 <= a and a + ell_max < n");
  }
  const DensityMatrix rho = gibbs_state(h, beta, cap);
  DecayScan scan;
  scan.a_pos = a_pos;
  for (std::size_t ell = 1; ell <= ell_max; ++ell) {
    Tripartition split;
    for (std::size_t s = 0; s < n; ++s) {
      (s < a_pos ? split.a : s < a_pos + ell ? split.b : split.c).push_back(s);
    }
    scan.rows.push_back({ell, cmi(rho, split)});
  }
  scan.fit = fit_log_linear(scan.rows);
  return scan;
}

// ---------------------------------------------------------------------------
// Petz recovery
// ---------------------------------------------------------------------------

inline constexpr double kSpectralFloor = 1e-12;

/// Petz transpose channel B -> B (x) C of a bipartite state on (B, C):
///   X -> rho_BC^{1/2} (rho_B^{-1/2} X rho_B^{-1/2} (x) I_C) rho_BC^{1/2},
/// completed on ker(rho_B) by X -> Tr(P_ker X) rho_BC. It satisfies
/// Phi(rho_B) = rho_BC.
inline QuantumChannel petz_recovery(const DensityMatrix& rho_bc, double tol = kCptpTol) {
  if (rho_bc.subsystems() != 2) {
    throw UsageError("petz_recovery: state must have exactly two subsystems (B, C)");
  }
  const std::size_t db = rho_bc.dims()[0];
  const std::size_t dc = rho_bc.dims()[1];
  const DensityMatrix rho_b = partial_trace(rho_bc, {0});

  const HermitianEigen eb = hermitian_eigen(rho_b.matrix());
  RealVector inv_sqrt(eb.values.size()), kernel(eb.values.size());
  for (Eigen::Index i = 0; i < eb.values.size(); ++i) {
    const bool in_kernel = eb.values(i) <= kSpectralFloor;
    inv_sqrt(i) = in_kernel ? 0.0 : 1.0 / std::sqrt(eb.values(i));
    kernel(i) = in_kernel ? 1.0 : 0.0;
  }
  const ComplexMatrix a = eb.vectors * inv_sqrt.asDiagonal() * eb.vectors.adjoint();
  const ComplexMatrix p_ker = eb.vectors * kernel.asDiagonal() * eb.vectors.adjoint();
  const ComplexMatrix root = hermitian_function(
      rho_bc.matrix(), [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });

  // K = (I_in (x) root) (v (x) I_C) with v = sum_i |i> (x) a|i>, so that
  // K K^dagger is the Choi matrix of the Petz map on supp(rho_B).
  using Idx = Eigen::Index;
  const Idx bc = static_cast<Idx>(db * dc);
  ComplexMatrix lifted = ComplexMatrix::Zero(static_cast<Idx>(db) * bc, static_cast<Idx>(dc));
  for (std::size_t i = 0; i < db; ++i) {
    for (std::size_t b = 0; b < db; ++b) {
      for (std::size_t c = 0; c < dc; ++c) {
        lifted(static_cast<Idx>(i) * bc + static_cast<Idx>(b * dc + c), static_cast<Idx>(c)) =
            a(static_cast<Idx>(b), static_cast<Idx>(i));
      }
    }
  }
  const ComplexMatrix k = kron(identity_matrix(db), root) * lifted;
  ComplexMatrix choi = k * k.adjoint() + kron(p_ker.transpose(), rho_bc.matrix());
  QuantumChannel ch = QuantumChannel::unvalidated(std::move(choi), db, Dims{db, dc});
  if (!ch.defects().within(tol)) {
    throw NumericError("petz_recovery: channel fails CPTP validation (CP defect " +
                       std::to_string(ch.defects().cp) + ", TP defect " +
                       std::to_string(ch.defects().tp) + ")");
  }
  return ch;
}

// ---------------------------------------------------------------------------
// Witness construction
// ---------------------------------------------------------------------------

struct Witness {
  MarkovianMpdo mpdo;
  BlockingPlan plan;
};

/// Blocks the chain into sites of `block_length` original sites and builds
/// the Petz chain of the exact Gibbs marginals: initial = rho^{0},
/// channel b = petz_recovery(rho^{b,b+1}). The running single-site
/// marginals of the result equal the blocked Gibbs marginals.
inline Witness build_witness(const LocalHamiltonian& h, double beta, std::size_t block_length,
                             std::size_t cap = kDenseCap) {
  const DensityMatrix gibbs = gibbs_state(h, beta, cap);
  BlockingPlan plan = make_blocking(h.site_dims(), block_length);
  const DensityMatrix blocked = gibbs.regrouped(plan.blocked_dims);
  const std::size_t m = plan.blocks();

  DensityMatrix initial = m == 1 ? blocked : partial_trace(blocked, {0});
  std::vector<QuantumChannel> channels;
  for (std::size_t b = 0; b + 1 < m; ++b) {
    const std::size_t keep[] = {b, b + 1};
    channels.push_back(petz_recovery(partial_trace(blocked, keep)));
  }
  return {MarkovianMpdo(std::move(initial), std::move(channels)), std::move(plan)};
}

// ---------------------------------------------------------------------------
// Local Markov certificate and recovery diagnostics
// ---------------------------------------------------------------------------

struct LocalMarkovCheck {
  double epsilon = 0.0;  // ||sigma_AB - rho_AB||_1
  double lhs = 0.0;      // I(A:C|B) of rho_ABC
  double rhs = 0.0;      // 4 eps ln d_A + 2 H_b(2 eps)
  bool hypothesis_holds = false;  // eps <= 1/2
  bool ok = false;                // hypothesis_holds && lhs <= rhs + 1e-8
};

/// Evaluates the local certificate for rho_ABC = (I_A (x) Phi)(sigma_AB),
/// where Phi maps B to (B, C).
inline LocalMarkovCheck local_markov_check(const DensityMatrix& sigma_ab,
                                           const QuantumChannel& phi) {
  if (sigma_ab.subsystems() != 2) {
    throw UsageError("local_markov_check: sigma must live on two subsystems (A, B)");
  }
  if (phi.out_dims().size() < 2 || phi.out_dims()[0] != phi.d_in()) {
    throw UsageError("local_markov_check: channel must map B to (B, C)");
  }
  const std::size_t da = sigma_ab.dims()[0];
  const std::size_t db = phi.d_in();
  const std::size_t dc = phi.d_out() / db;
  const DensityMatrix rho = apply(phi, sigma_ab, 1).regrouped(Dims{da, db, dc});
  const DensityMatrix rho_ab = partial_trace(rho, {0, 1});

  LocalMarkovCheck out;
  out.epsilon = trace_norm(sigma_ab.matrix() - rho_ab.matrix(), kAppliedStateTol.herm);
  out.lhs = cmi(rho, Tripartition{{0}, {1}, {2}});
  out.hypothesis_holds = out.epsilon <= 0.5;
  if (out.hypothesis_holds) {
    out.rhs = 4.0 * out.epsilon * std::log(static_cast<double>(da)) +
              2.0 * binary_entropy(2.0 * out.epsilon);
    out.ok = out.lhs <= out.rhs + 1e-8;
  }
  return out;
}

struct RecoveryDiagnostic {
  double trace_dist = 0.0;  // ||rho - (I_A (x) Phi)(rho_AB)||_1
  double cmi_value = 0.0;   // I(A:C|B)
  /// 2 sqrt(I(A:C|B)); guaranteed for rotated Petz maps, reported only.
  double fr_bound = 0.0;
};

/// Recovers rho_ABC from rho_AB with the Petz map of rho_BC. A, B, C must
/// be consecutive contiguous ranges of sites, in that order; A or C may be
/// empty.
inline RecoveryDiagnostic recovery_diagnostic(const DensityMatrix& rho, const Tripartition& split) {
  auto contiguous = [](const std::vector<std::size_t>& s) {
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i] != s[i - 1] + 1) return false;
    }
    return true;
  };
  if (split.b.empty()) throw UsageError("recovery_diagnostic: B is empty");
  if (!contiguous(split.a) || !contiguous(split.b) || !contiguous(split.c) ||
      (!split.a.empty() && split.a.back() + 1 != split.b.front()) ||
      (!split.c.empty() && split.b.back() + 1 != split.c.front()) ||
      (!split.c.empty() && split.c.back() >= rho.subsystems())) {
    throw UsageError("recovery_diagnostic: A, B, C must be consecutive contiguous ranges");
  }
  const std::size_t first = split.a.empty() ? split.b.front() : split.a.front();
  const std::size_t last = split.c.empty() ? split.b.back() : split.c.back();
  const DensityMatrix window = marginal(rho, first, last);

  auto prod = [&](const std::vector<std::size_t>& s) {
    std::size_t p = 1;
    for (std::size_t x : s) p *= rho.dims()[x];
    return p;
  };
  const Dims grouped{prod(split.a), prod(split.b), prod(split.c)};
  const DensityMatrix abc = window.regrouped(grouped);
  const QuantumChannel phi = petz_recovery(partial_trace(abc, {1, 2}));
  const DensityMatrix recovered = apply(phi, partial_trace(abc, {0, 1}), 1);

  RecoveryDiagnostic out;
  out.trace_dist = trace_norm(abc.matrix() - recovered.matrix(), kAppliedStateTol.herm);
  out.cmi_value = cmi(abc, Tripartition{{0}, {1}, {2}});
  out.fr_bound = 2.0 * std::sqrt(std::max(0.0, out.cmi_value));
  return out;
}

}  // namespace mmpdo
