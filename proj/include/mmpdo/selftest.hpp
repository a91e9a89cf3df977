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

// Quick oracle suite behind the `selftest` command.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "mmpdo/channels.hpp"
#include "mmpdo/errors.hpp"
#include "mmpdo/mpdo.hpp"
#include "mmpdo/oracle.hpp"
#include "mmpdo/spectra.hpp"
#include "mmpdo/spinchain.hpp"

namespace mmpdo {

struct SelftestCheck {
  std::string name;
  std::function<double()> worst;  // largest violation; <= 0 passes
};

inline std::vector<SelftestCheck> selftest_checks() {
  using namespace oracle;
  std::vector<SelftestCheck> checks;

  checks.push_back({"random states are valid", [] {
    double worst = -1.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const DensityMatrix rho = random_density_matrix(Dims{4}, s);
      const double lo = hermitian_eigenvalues(rho.matrix())(0);
      worst = std::max({worst, -lo - 1e-12, std::abs(rho.matrix().trace().real() - 1) - 1e-12});
    }
    return worst;
  }});

  checks.push_back({"random channels are CPTP", [] {
    double worst = -1.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const QuantumChannel ch = random_channel(3, Dims{3, 2}, s);
      worst = std::max({worst, ch.defects().cp - 1e-10, ch.defects().tp - 1e-10});
    }
    return worst;
  }});

  checks.push_back({"classical chain entropy matches chain rule", [] {
    double worst = -1.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      Rng rng(s);
      std::vector<RealMatrix> ts;
      for (int k = 0; k < 4; ++k) ts.push_back(random_stochastic(3, 3, rng));
      const Eigen::VectorXd p0 = random_distribution(3, rng);
      const MarkovReport r = entropy_estimate(classical_markov_mpdo(ts, p0));
      worst = std::max({worst, r.epsilon_max - 1e-9,
                        std::abs(r.entropy_estimate - classical_chain_entropy(ts, p0)) - 1e-8});
    }
    return worst;
  }});

  checks.push_back({"entropy error bound holds on noisy Petz chains", [] {
    double worst = -1.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const MarkovianMpdo m = random_markov_chain(Dims(4, 2), s, 0.2, 2);
      const MarkovReport r = entropy_estimate(m);
      if (!r.certified) continue;
      const EntropyDecomposition dec = entropy_decomposition_oracle(m);
      worst = std::max(worst, std::abs(r.entropy_estimate - dec.exact) -
                                  r.entropy_error_bound - 1e-8);
    }
    return worst;
  }});

  checks.push_back({"Petz recovery fixes the marginal", [] {
    double worst = -1.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const DensityMatrix rho = random_density_matrix(Dims{3, 2}, s);
      const QuantumChannel petz = petz_recovery(rho);
      const DensityMatrix back = apply(petz, partial_trace(rho, {0}), 0);
      worst = std::max(worst, trace_norm(back.matrix() - rho.matrix(), 1e-8) - 1e-8);
    }
    return worst;
  }});

  checks.push_back({"rounding stays within 5 d^2 2^-bits", [] {
    double worst = -1.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const DensityMatrix rho = random_density_matrix(Dims{3}, s);
      const DensityMatrix r = round_density_matrix(rho, 12);
      worst = std::max(worst, trace_norm(rho.matrix() - r.matrix(), 1e-9) -
                                  5.0 * 9.0 * std::ldexp(1.0, -12));
    }
    return worst;
  }});

  return checks;
}

/// Runs every check, printing one PASS/FAIL line each; true if all pass.
inline bool run_selftest(std::ostream& os) {
  bool ok = true;
  for (const auto& c : selftest_checks()) {
    double worst = 0.0;
    std::string error;
    try {
      worst = c.worst();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const bool pass = error.empty() && worst <= 0.0;
    ok = ok && pass;
    os << (pass ? "PASS  " : "FAIL  ") << c.name;
    if (!error.empty()) os << "  (error: " << error << ")";
    os << "\n";
  }
  return ok;
}

}  // namespace mmpdo
