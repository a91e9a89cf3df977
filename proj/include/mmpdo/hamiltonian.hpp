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

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmpdo/errors.hpp"
#include "mmpdo/spectra.hpp"

namespace mmpdo {

struct HamiltonianTerm {
  std::size_t start = 0;  // first site, 0-based
  std::size_t width = 1;  // number of contiguous sites
  ComplexMatrix op;
};

/// Qudit chain Hamiltonian H = sum of Hermitian terms on contiguous windows.
class LocalHamiltonian {
 public:
  LocalHamiltonian() = default;

  explicit LocalHamiltonian(Dims site_dims) : site_dims_(std::move(site_dims)) {
    if (site_dims_.empty()) throw UsageError("Hamiltonian needs at least one site");
    for (std::size_t d : site_dims_) {
      if (d == 0) throw UsageError("site dimension must be positive");
    }
  }

  void add_term(std::size_t start, std::size_t width, ComplexMatrix op) {
    const std::size_t index = terms_.size();
    if (width == 0 || start + width > site_dims_.size()) {
      throw UsageError("term " + std::to_string(index) + ": window [" +
                       std::to_string(start) + ", " + std::to_string(start + width) +
                       ") does not fit in a chain of " + std::to_string(site_dims_.size()) +
                       " sites");
    }
    const std::size_t side = dims_product(std::span(site_dims_).subspan(start, width));
    if (op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != side) {
      throw UsageError("term " + std::to_string(index) + ": operator side " +
                       std::to_string(op.rows()) + " does not match window dimension " +
                       std::to_string(side));
    }
    if (!(hermiticity_defect(op) <= kHermTol)) {
      throw ContractViolation("term " + std::to_string(index) + " is not Hermitian");
    }
    const double norm = operator_norm(op);
    if (norm > 1.0 + 1e-12) {
      warnings_.push_back("term " + std::to_string(index) + " has operator norm " +
                          std::to_string(norm) + " > 1");
    }
    terms_.push_back({start, width, std::move(op)});
  }

  const Dims& site_dims() const { return site_dims_; }
  const std::vector<HamiltonianTerm>& terms() const { return terms_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::size_t sites() const { return site_dims_.size(); }
  std::size_t total_dim() const { return dims_product(site_dims_); }

  ComplexMatrix dense(std::size_t cap = kDenseCap) const {
    const std::size_t d = total_dim();
    if (d > cap) {
      throw ResourceError("dense Hamiltonian of dimension " + std::to_string(d) +
                          " exceeds cap " + std::to_string(cap));
    }
    ComplexMatrix h = ComplexMatrix::Zero(static_cast<Eigen::Index>(d),
                                          static_cast<Eigen::Index>(d));
    for (const auto& t : terms_) h += embed_operator(t.op, site_dims_, t.start, t.width);
    return h;
  }

  /// Sum of the terms' operator norms; bounds ||H||_op from above.
  double local_norm_sum() const {
    double s = 0.0;
    for (const auto& t : terms_) s += operator_norm(t.op);
    return s;
  }

 private:
  Dims site_dims_;
  std::vector<HamiltonianTerm> terms_;
  std::vector<std::string> warnings_;
};

namespace pauli {

inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace pauli

/// H = -J sum Z_i Z_{i+1} - g sum X_i on an open chain of n qubits.
inline LocalHamiltonian transverse_field_ising(std::size_t n, double coupling = 1.0,
                                               double field = 1.0) {
  LocalHamiltonian h(Dims(n, 2));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h.add_term(i, 2, -coupling * kron(pauli::z(), pauli::z()));
  }
  for (std::size_t i = 0; i < n; ++i) h.add_term(i, 1, -field * pauli::x());
  return h;
}

// ---------------------------------------------------------------------------
// Blocking
// ---------------------------------------------------------------------------

/// Groups consecutive sites into blocks of `block_length`; the trailing
/// remainder becomes the last, shorter block.
struct BlockingPlan {
  std::size_t block_length = 1;
  std::vector<std::size_t> group_sizes;  // original sites per block
  Dims blocked_dims;

  std::size_t blocks() const { return group_sizes.size(); }

  /// First original site of block b.
  std::size_t first_site(std::size_t b) const {
    std::size_t s = 0;
    for (std::size_t k = 0; k < b; ++k) s += group_sizes[k];
    return s;
  }

  std::size_t block_of(std::size_t site) const {
    std::size_t s = 0;
    for (std::size_t b = 0; b < group_sizes.size(); ++b) {
      s += group_sizes[b];
      if (site < s) return b;
    }
    throw UsageError("block_of: site out of range");
  }
};

inline BlockingPlan make_blocking(const Dims& site_dims, std::size_t block_length) {
  if (block_length == 0) throw UsageError("block length must be positive");
  BlockingPlan plan;
  plan.block_length = block_length;
  std::size_t s = 0;
  while (s < site_dims.size()) {
    const std::size_t len = std::min(block_length, site_dims.size() - s);
    plan.group_sizes.push_back(len);
    plan.blocked_dims.push_back(
        dims_product(std::span(site_dims).subspan(s, len)));
    s += len;
  }
  return plan;
}

/// Finds the consecutive grouping of `site_dims` whose products equal
/// `blocked_dims`; throws if none exists.
inline BlockingPlan infer_blocking(const Dims& site_dims, const Dims& blocked_dims) {
  BlockingPlan plan;
  std::size_t s = 0;
  for (std::size_t b = 0; b < blocked_dims.size(); ++b) {
    std::size_t prod = 1, len = 0;
    while (s < site_dims.size() && prod < blocked_dims[b]) {
      prod *= site_dims[s++];
      ++len;
    }
    if (prod != blocked_dims[b] || len == 0) {
      throw UsageError("site " + std::to_string(b + 1) + " has dimension " +
                       std::to_string(blocked_dims[b]) +
                       " which is not a product of consecutive chain sites");
    }
    plan.group_sizes.push_back(len);
    plan.blocked_dims.push_back(prod);
    plan.block_length = std::max(plan.block_length, len);
  }
  if (s != site_dims.size()) {
    throw UsageError("blocked dims " + dims_to_string(blocked_dims) +
                     " do not cover the chain " + dims_to_string(site_dims));
  }
  return plan;
}

/// Rewrites H over blocked sites; each term is padded with identities up
/// to the boundaries of the blocks it touches.
inline LocalHamiltonian block_hamiltonian(const LocalHamiltonian& h, const BlockingPlan& plan) {
  LocalHamiltonian out(plan.blocked_dims);
  for (const auto& t : h.terms()) {
    const std::size_t b0 = plan.block_of(t.start);
    const std::size_t b1 = plan.block_of(t.start + t.width - 1);
    const std::size_t first = plan.first_site(b0);
    const std::size_t last = plan.first_site(b1) + plan.group_sizes[b1];  // exclusive
    const Dims& dims = h.site_dims();
    const std::size_t left = dims_product(std::span(dims).subspan(first, t.start - first));
    const std::size_t right =
        dims_product(std::span(dims).subspan(t.start + t.width, last - t.start - t.width));
    out.add_term(b0, b1 - b0 + 1,
                 kron(kron(identity_matrix(left), t.op), identity_matrix(right)));
  }
  return out;
}

}  // namespace mmpdo
