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

// Markovian matrix product density operators.
//
// A chain is an initial state on site 0 followed by channels
// Phi_k : B(H_k) -> B(H_k (x) H_{k+1}), k = 0..n-2. The state is
//   rho = (I (x) Phi_{n-2}) o ... o (I (x) Phi_1) o Phi_0 (initial).
// Everything here runs on objects of at most a few sites, so the cost is
// polynomial in the number of sites and the site dimension. `contract`
// is the exception and is capped.
//
// Site indices are 0-based throughout the C++ API.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mmpdo/channels.hpp"
#include "mmpdo/errors.hpp"
#include "mmpdo/hamiltonian.hpp"
#include "mmpdo/spectra.hpp"

namespace mmpdo {

inline constexpr std::size_t kWindowCap = 6;

class MarkovianMpdo {
 public:
  /// Checks that the channels chain dimensionally: channel k maps site k
  /// to (site k, site k+1). CPTP validity is not enforced here; see
  /// `worst_defects` and the verifier.
  MarkovianMpdo(DensityMatrix initial, std::vector<QuantumChannel> channels)
      : initial_(initial.regrouped(Dims{initial.dim()})), channels_(std::move(channels)) {
    site_dims_.push_back(initial_.dim());
    for (std::size_t k = 0; k < channels_.size(); ++k) {
      const QuantumChannel& ch = channels_[k];
      if (ch.d_in() != site_dims_[k]) {
        throw UsageError("channel for site " + std::to_string(k + 1) + " has d_in " +
                         std::to_string(ch.d_in()) + " but the site has dimension " +
                         std::to_string(site_dims_[k]));
      }
      if (ch.out_dims().size() != 2 || ch.out_dims()[0] != site_dims_[k]) {
        throw UsageError("channel for site " + std::to_string(k + 1) +
                         " must have out_dims (" + std::to_string(site_dims_[k]) +
                         ", d_next), got " + dims_to_string(ch.out_dims()));
      }
      site_dims_.push_back(ch.out_dims()[1]);
    }
  }

  std::size_t sites() const { return site_dims_.size(); }
  const Dims& site_dims() const { return site_dims_; }
  std::size_t max_site_dim() const {
    return *std::max_element(site_dims_.begin(), site_dims_.end());
  }
  const DensityMatrix& initial() const { return initial_; }
  const std::vector<QuantumChannel>& channels() const { return channels_; }

  ChannelDefects worst_defects() const {
    ChannelDefects w;
    for (const auto& ch : channels_) {
      w.hermiticity = std::max(w.hermiticity, ch.defects().hermiticity);
      w.cp = std::max(w.cp, ch.defects().cp);
      w.tp = std::max(w.tp, ch.defects().tp);
    }
    return w;
  }

 private:
  DensityMatrix initial_;
  std::vector<QuantumChannel> channels_;
  Dims site_dims_;
};

struct MarkovReport {
  std::vector<double> epsilons;  // one per interior site, in site order
  double epsilon_max = 0.0;
  double entropy_estimate = 0.0;
  double entropy_error_bound = 0.0;
  /// False when epsilon_max > 1/2, where the error bound does not apply.
  bool certified = true;
};

namespace detail {

/// Forward data for every site: extended[k] = Phi_k(rho~_k) and the
/// corrected pair marginals of the final state.
struct ChainMarginals {
  std::vector<DensityMatrix> forward;   // rho~_k, k = 0..n-1
  std::vector<DensityMatrix> extended;  // on (k, k+1), k = 0..n-2
  std::vector<DensityMatrix> pairs;     // final-state marginal on (k, k+1)
};

inline ChainMarginals chain_marginals(const MarkovianMpdo& m) {
  ChainMarginals out;
  out.forward.push_back(m.initial());
  const auto& chs = m.channels();
  for (std::size_t k = 0; k < chs.size(); ++k) {
    out.extended.push_back(apply(chs[k], out.forward.back(), 0));
    out.forward.push_back(partial_trace(out.extended.back(), {1}));
  }
  for (std::size_t k = 0; k < chs.size(); ++k) {
    if (k + 1 < chs.size()) {
      const DensityMatrix three = apply(chs[k + 1], out.extended[k], 1);
      out.pairs.push_back(partial_trace(three, {0, 1}));
    } else {
      out.pairs.push_back(out.extended[k]);
    }
  }
  return out;
}

inline std::vector<double> epsilons_from(const ChainMarginals& cm) {
  std::vector<double> eps;
  for (std::size_t k = 0; k + 1 < cm.pairs.size(); ++k) {
    eps.push_back(trace_norm(cm.extended[k].matrix() - cm.pairs[k].matrix(),
                             kAppliedStateTol.herm));
  }
  return eps;
}

}  // namespace detail

/// (n-2) (4 eps ln d + 2 H_b(2 eps)), with H_b's argument clamped at 1.
inline double entropy_error_bound(std::size_t sites, double epsilon, std::size_t d) {
  if (sites <= 2) return 0.0;
  const double e = std::clamp(epsilon, 0.0, 0.5);
  return static_cast<double>(sites - 2) *
         (4.0 * epsilon * std::log(static_cast<double>(d)) + 2.0 * binary_entropy(2.0 * e));
}

/// rho~_k for every site: the running single-site marginal obtained by
/// pushing the initial state through Tr_k o Phi_k.
inline std::vector<DensityMatrix> single_site_marginals(const MarkovianMpdo& m) {
  std::vector<DensityMatrix> out{m.initial()};
  for (const auto& ch : m.channels()) {
    out.push_back(apply(compose_then_trace(ch, {0}), out.back(), 0));
  }
  return out;
}

/// Two-site marginals of the final state, entry k on sites (k, k+1).
inline std::vector<DensityMatrix> pair_marginals(const MarkovianMpdo& m) {
  if (m.sites() < 2) throw UsageError("pair_marginals: chain has fewer than 2 sites");
  return detail::chain_marginals(m).pairs;
}

/// Markov defects of the interior sites; the entropy fields are left at 0.
inline MarkovReport markov_epsilons(const MarkovianMpdo& m) {
  MarkovReport r;
  if (m.sites() <= 2) return r;
  r.epsilons = detail::epsilons_from(detail::chain_marginals(m));
  r.epsilon_max = *std::max_element(r.epsilons.begin(), r.epsilons.end());
  r.certified = r.epsilon_max <= 0.5;
  return r;
}

/// sum_k S(rho_{k,k+1}) - sum_{interior k} S(rho_k), together with the
/// certified error bound on its distance to the global entropy.
inline MarkovReport entropy_estimate(const MarkovianMpdo& m) {
  MarkovReport r;
  if (m.sites() == 1) {
    r.entropy_estimate = von_neumann_entropy(m.initial());
    return r;
  }
  const detail::ChainMarginals cm = detail::chain_marginals(m);
  double s = 0.0;
  for (const auto& p : cm.pairs) s += von_neumann_entropy(p);
  for (std::size_t k = 0; k + 1 < cm.pairs.size(); ++k) {
    // Site k+1 of the final state, read off the corrected pair (k, k+1).
    s -= von_neumann_entropy(partial_trace(cm.pairs[k], {1}));
  }
  r.entropy_estimate = s;
  if (m.sites() > 2) {
    r.epsilons = detail::epsilons_from(cm);
    r.epsilon_max = *std::max_element(r.epsilons.begin(), r.epsilons.end());
    r.certified = r.epsilon_max <= 0.5;
    r.entropy_error_bound = entropy_error_bound(m.sites(), r.epsilon_max, m.max_site_dim());
  }
  return r;
}

/// Exact marginal of the final state on sites [first, last].
inline DensityMatrix window_marginal(const MarkovianMpdo& m, std::size_t first,
                                     std::size_t last, std::size_t cap = kWindowCap) {
  if (first > last || last >= m.sites()) {
    throw UsageError("window_marginal: bad window [" + std::to_string(first) + ", " +
                     std::to_string(last) + "]");
  }
  if (last - first + 1 > cap) {
    throw ResourceError("window of " + std::to_string(last - first + 1) +
                        " sites exceeds cap " + std::to_string(cap));
  }
  const auto& chs = m.channels();
  DensityMatrix state = m.initial();
  for (std::size_t k = 0; k < first; ++k) {
    state = apply(compose_then_trace(chs[k], {0}), state, 0);
  }
  for (std::size_t k = first; k < last; ++k) {
    state = apply(chs[k], state, state.subsystems() - 1);
  }
  if (last + 1 < m.sites()) {
    // Later channels act trivially on the window except for Tr_{last+1} o Phi_last.
    state = apply(compose_then_trace(chs[last], {1}), state, state.subsystems() - 1);
  }
  return state;
}

inline double energy(const MarkovianMpdo& m, const LocalHamiltonian& h,
                     std::size_t cap = kWindowCap) {
  if (h.site_dims() != m.site_dims()) {
    throw UsageError("energy: Hamiltonian sites " + dims_to_string(h.site_dims()) +
                     " do not match chain sites " + dims_to_string(m.site_dims()));
  }
  double e = 0.0;
  for (const auto& t : h.terms()) {
    const DensityMatrix w = window_marginal(m, t.start, t.start + t.width - 1, cap);
    e += (w.matrix() * t.op).trace().real();
  }
  return e;
}

struct FreeEnergyBound {
  double value = 0.0;
  double energy = 0.0;
  MarkovReport report;
};

/// energy - T * estimate + T * error_bound. An upper bound on the minimum
/// free energy whenever the channels are CPTP and report.certified holds.
inline FreeEnergyBound free_energy_upper_bound(const MarkovianMpdo& m, const LocalHamiltonian& h,
                                               double temperature) {
  if (!(temperature > 0.0)) throw UsageError("temperature must be positive");
  FreeEnergyBound out;
  out.energy = energy(m, h);
  out.report = entropy_estimate(m);
  out.value = out.energy - temperature * out.report.entropy_estimate +
              temperature * out.report.entropy_error_bound;
  return out;
}

/// Dense state on all sites.
inline DensityMatrix contract(const MarkovianMpdo& m, std::size_t cap = kDenseCap) {
  const std::size_t total = dims_product(m.site_dims());
  if (total > cap) {
    throw ResourceError("contract: dimension " + std::to_string(total) + " exceeds cap " +
                        std::to_string(cap));
  }
  DensityMatrix state = m.initial();
  for (std::size_t k = 0; k < m.channels().size(); ++k) {
    state = apply(m.channels()[k], state, k);
  }
  return state;
}

/// The chain on sites 1..n-1: initial state rho~_1, channels 1..n-2.
inline MarkovianMpdo drop_first_site(const MarkovianMpdo& m) {
  if (m.sites() < 2) throw UsageError("drop_first_site: chain has a single site");
  DensityMatrix next = apply(compose_then_trace(m.channels()[0], {0}), m.initial(), 0);
  std::vector<QuantumChannel> rest(m.channels().begin() + 1, m.channels().end());
  return MarkovianMpdo(std::move(next), std::move(rest));
}

}  // namespace mmpdo
