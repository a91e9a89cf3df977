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

// Dense Hermitian kernel: eigendecompositions, Schatten norms, partial
// traces, entropies and the continuity bounds built on them.
//
// Subsystem convention: for a composite of dims (d_1, ..., d_k) the flat
// index is row-major over the multi-index, i.e. the leftmost subsystem
// varies slowest. Every routine in the library assumes this layout.
//
// Entropies are in nats.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmpdo/errors.hpp"

namespace mmpdo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<std::size_t>;

inline constexpr double kHermTol = 1e-10;
inline constexpr double kPsdFloor = 1e-10;
inline constexpr double kTraceTol = 1e-10;
/// Eigenvalues at or below this contribute nothing to entropies.
inline constexpr double kEigenFloor = 1e-12;
inline constexpr std::size_t kDenseCap = 4096;

inline std::size_t dims_product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

inline std::string dims_to_string(std::span<const std::size_t> dims) {
  std::string out = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(dims[i]);
  }
  return out + "]";
}

inline ComplexMatrix identity_matrix(std::size_t d) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(d),
                                 static_cast<Eigen::Index>(d));
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Largest entry of |M - M^dagger|; zero for exactly Hermitian input.
inline double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Returns (M + M^dagger)/2, or throws if M drifts from Hermitian by more
/// than `tol` entrywise.
inline ComplexMatrix hermitian_part(const ComplexMatrix& m, double tol = kHermTol) {
  if (m.rows() != m.cols()) {
    throw ContractViolation("matrix is not square: " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()));
  }
  const double drift = hermiticity_defect(m);
  if (!(drift <= tol)) {
    throw ContractViolation("matrix is not Hermitian (max |M - M^dagger| = " +
                            std::to_string(drift) + ")");
  }
  return (m + m.adjoint()) * 0.5;
}

struct HermitianEigen {
  RealVector values;     // ascending
  ComplexMatrix vectors; // columns are eigenvectors
};

inline HermitianEigen hermitian_eigen(const ComplexMatrix& m, double tol = kHermTol) {
  ComplexMatrix h = hermitian_part(m, tol);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericError("Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector hermitian_eigenvalues(const ComplexMatrix& m, double tol = kHermTol) {
  ComplexMatrix h = hermitian_part(m, tol);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues();
}

/// f(M) for Hermitian M, applied through the spectrum.
template <typename F>
ComplexMatrix hermitian_function(const ComplexMatrix& m, F&& f, double tol = kHermTol) {
  const HermitianEigen eig = hermitian_eigen(m, tol);
  RealVector mapped(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) mapped(i) = f(eig.values(i));
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

struct SchattenNorms {
  double trace_norm = 0.0;
  double operator_norm = 0.0;
};

inline SchattenNorms schatten_norms(const ComplexMatrix& a, double tol = kHermTol) {
  const RealVector values = hermitian_eigenvalues(a, tol);
  SchattenNorms out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out.trace_norm += std::abs(values(i));
    out.operator_norm = std::max(out.operator_norm, std::abs(values(i)));
  }
  return out;
}

inline double trace_norm(const ComplexMatrix& a, double tol = kHermTol) {
  return schatten_norms(a, tol).trace_norm;
}

inline double operator_norm(const ComplexMatrix& a, double tol = kHermTol) {
  return schatten_norms(a, tol).operator_norm;
}

/// |A| = V |D| V^dagger for Hermitian A.
inline ComplexMatrix hermitian_abs(const ComplexMatrix& a, double tol = kHermTol) {
  return hermitian_function(a, [](double x) { return std::abs(x); }, tol);
}

// ---------------------------------------------------------------------------
// Partial trace on raw matrices
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<bool> keep_mask(const Dims& dims, std::span<const std::size_t> keep) {
  if (keep.empty()) throw UsageError("partial_trace: keep set is empty");
  std::vector<bool> mask(dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= dims.size()) {
      throw UsageError("partial_trace: subsystem index " + std::to_string(k) +
                       " out of range for " + std::to_string(dims.size()) +
                       " subsystems");
    }
    if (mask[k]) {
      throw UsageError("partial_trace: subsystem " + std::to_string(k) +
                       " listed twice");
    }
    mask[k] = true;
  }
  return mask;
}

}  // namespace detail

/// Reduced operator on the subsystems flagged in `keep` (0-based). Kept
/// subsystems appear in their original order.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const Dims& dims,
                                   std::span<const std::size_t> keep) {
  const std::size_t total = dims_product(dims);
  if (static_cast<std::size_t>(m.rows()) != total ||
      static_cast<std::size_t>(m.cols()) != total) {
    throw UsageError("partial_trace: matrix side " + std::to_string(m.rows()) +
                     " does not match dims " + dims_to_string(dims));
  }
  const std::vector<bool> mask = detail::keep_mask(dims, keep);
  std::size_t kept_dim = 1;
  std::size_t traced_dim = 1;
  for (std::size_t s = 0; s < dims.size(); ++s) {
    (mask[s] ? kept_dim : traced_dim) *= dims[s];
  }

  // Split every flat index into (kept, traced) parts.
  std::vector<std::size_t> kept_of(total), traced_of(total);
  for (std::size_t x = 0; x < total; ++x) {
    std::size_t rem = x;
    std::size_t kept = 0, traced = 0, kept_stride = 1, traced_stride = 1;
    for (std::size_t s = dims.size(); s-- > 0;) {
      const std::size_t digit = rem % dims[s];
      rem /= dims[s];
      if (mask[s]) {
        kept += digit * kept_stride;
        kept_stride *= dims[s];
      } else {
        traced += digit * traced_stride;
        traced_stride *= dims[s];
      }
    }
    kept_of[x] = kept;
    traced_of[x] = traced;
  }
  std::vector<std::vector<std::size_t>> groups(traced_dim);
  for (std::size_t x = 0; x < total; ++x) groups[traced_of[x]].push_back(x);

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(kept_dim),
                                          static_cast<Eigen::Index>(kept_dim));
  for (const auto& group : groups) {
    for (std::size_t x : group) {
      for (std::size_t y : group) {
        out(static_cast<Eigen::Index>(kept_of[x]), static_cast<Eigen::Index>(kept_of[y])) +=
            m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      }
    }
  }
  return out;
}

/// Embeds `op`, acting on `width` contiguous subsystems starting at `start`,
/// into the full space by identity padding.
inline ComplexMatrix embed_operator(const ComplexMatrix& op, const Dims& dims,
                                    std::size_t start, std::size_t width) {
  if (width == 0 || start + width > dims.size()) {
    throw UsageError("embed_operator: window does not fit in the chain");
  }
  const std::size_t left = dims_product(std::span(dims).subspan(0, start));
  const std::size_t mid = dims_product(std::span(dims).subspan(start, width));
  const std::size_t right = dims_product(std::span(dims).subspan(start + width));
  if (static_cast<std::size_t>(op.rows()) != mid || op.rows() != op.cols()) {
    throw UsageError("embed_operator: operator side does not match window dims");
  }
  return kron(kron(identity_matrix(left), op), identity_matrix(right));
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

struct DensityTolerances {
  double herm = kHermTol;
  double psd_floor = kPsdFloor;
  double trace = kTraceTol;
};

/// Hermitian, positive semidefinite, unit-trace operator on a composite
/// system. Construction validates and symmetrizes.
class DensityMatrix {
 public:
  DensityMatrix() : dims_{1}, matrix_(ComplexMatrix::Ones(1, 1)) {}

  static DensityMatrix from_matrix(const ComplexMatrix& m, Dims dims,
                                   const DensityTolerances& tol = {}) {
    validate_dims(dims, m);
    ComplexMatrix h = hermitian_part(m, tol.herm);
    const double tr = h.trace().real();
    if (!(std::abs(tr - 1.0) <= tol.trace)) {
      throw ContractViolation("density matrix trace is " + std::to_string(tr));
    }
    const RealVector values = hermitian_eigenvalues(h, tol.herm);
    if (values.size() > 0 && !(values(0) >= -tol.psd_floor)) {
      throw ContractViolation("density matrix has eigenvalue " +
                              std::to_string(values(0)));
    }
    return DensityMatrix(std::move(dims), std::move(h));
  }

  static DensityMatrix from_matrix(const ComplexMatrix& m) {
    return from_matrix(m, Dims{static_cast<std::size_t>(m.rows())});
  }

  /// Skips the positivity and trace checks; used by constructions whose
  /// output is valid by construction and by the verifier, which reports
  /// defects itself.
  static DensityMatrix trusted(ComplexMatrix m, Dims dims) {
    validate_dims(dims, m);
    return DensityMatrix(std::move(dims), (m + m.adjoint()) * 0.5);
  }

  static DensityMatrix maximally_mixed(Dims dims) {
    const std::size_t d = dims_product(dims);
    return DensityMatrix(std::move(dims),
                         identity_matrix(d) / static_cast<double>(d));
  }

  static DensityMatrix pure(const Eigen::VectorXcd& psi, Dims dims) {
    const Eigen::VectorXcd v = psi / psi.norm();
    return from_matrix(v * v.adjoint(), std::move(dims));
  }

  const Dims& dims() const { return dims_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t subsystems() const { return dims_.size(); }

  DensityMatrix tensor(const DensityMatrix& other) const {
    Dims dims = dims_;
    dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
    return DensityMatrix(std::move(dims), kron(matrix_, other.matrix_));
  }

  /// Same operator, different subsystem grouping; products must agree on
  /// contiguous groups.
  DensityMatrix regrouped(Dims dims) const {
    validate_dims(dims, matrix_);
    return DensityMatrix(std::move(dims), matrix_);
  }

 private:
  DensityMatrix(Dims dims, ComplexMatrix m) : dims_(std::move(dims)), matrix_(std::move(m)) {}

  static void validate_dims(const Dims& dims, const ComplexMatrix& m) {
    if (dims.empty()) throw UsageError("density matrix needs at least one subsystem");
    for (std::size_t d : dims) {
      if (d == 0) throw UsageError("subsystem dimension must be positive");
    }
    if (m.rows() != m.cols() ||
        static_cast<std::size_t>(m.rows()) != dims_product(dims)) {
      throw UsageError("matrix side " + std::to_string(m.rows()) +
                       " does not match dims " + dims_to_string(dims));
    }
  }

  Dims dims_;
  ComplexMatrix matrix_;
};

inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   std::span<const std::size_t> keep) {
  ComplexMatrix reduced = partial_trace(rho.matrix(), rho.dims(), keep);
  Dims dims;
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k : sorted) dims.push_back(rho.dims()[k]);
  return DensityMatrix::trusted(std::move(reduced), std::move(dims));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   std::initializer_list<std::size_t> keep) {
  return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

/// Marginal on the contiguous subsystem range [first, last].
inline DensityMatrix marginal(const DensityMatrix& rho, std::size_t first, std::size_t last) {
  if (first > last || last >= rho.subsystems()) {
    throw UsageError("marginal: bad subsystem range");
  }
  if (first == 0 && last + 1 == rho.subsystems()) return rho;
  std::vector<std::size_t> keep(last - first + 1);
  std::iota(keep.begin(), keep.end(), first);
  return partial_trace(rho, keep);
}

// ---------------------------------------------------------------------------
// Entropies
// ---------------------------------------------------------------------------

inline double entropy_of_spectrum(const RealVector& values) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double p = values(i);
    if (p > kEigenFloor) s -= p * std::log(p);
  }
  return s;
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
  if (rho.dim() == 1) return 0.0;
  return entropy_of_spectrum(hermitian_eigenvalues(rho.matrix()));
}

inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw UsageError("binary_entropy: p = " + std::to_string(p) + " outside [0,1]");
  }
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

/// Contiguous or not, the three sets must be disjoint; A and C may be empty.
struct Tripartition {
  std::vector<std::size_t> a;
  std::vector<std::size_t> b;
  std::vector<std::size_t> c;
};

namespace detail {

inline double entropy_on(const DensityMatrix& rho, std::vector<std::size_t> keep) {
  if (keep.empty()) return 0.0;
  std::sort(keep.begin(), keep.end());
  if (keep.size() == rho.subsystems()) return von_neumann_entropy(rho);
  return von_neumann_entropy(partial_trace(rho, keep));
}

inline std::vector<std::size_t> join(const std::vector<std::size_t>& x,
                                     const std::vector<std::size_t>& y) {
  std::vector<std::size_t> out = x;
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

}  // namespace detail

/// I(A:C|B) = S(AB) + S(BC) - S(B) - S(ABC).
inline double cmi(const DensityMatrix& rho, const Tripartition& split) {
  if (split.b.empty()) throw UsageError("cmi: conditioning set B is empty");
  std::vector<bool> seen(rho.subsystems(), false);
  for (const auto* part : {&split.a, &split.b, &split.c}) {
    for (std::size_t s : *part) {
      if (s >= rho.subsystems()) throw UsageError("cmi: subsystem index out of range");
      if (seen[s]) throw UsageError("cmi: sets overlap at subsystem " + std::to_string(s));
      seen[s] = true;
    }
  }
  const auto ab = detail::join(split.a, split.b);
  const auto bc = detail::join(split.b, split.c);
  const auto abc = detail::join(ab, split.c);
  return detail::entropy_on(rho, ab) + detail::entropy_on(rho, bc) -
         detail::entropy_on(rho, split.b) - detail::entropy_on(rho, abc);
}

/// Fannes-type continuity bound 2*delta*ln(total_dim) - 2*delta*ln(2*delta)
/// on |S(rho) - S(sigma)| for ||rho - sigma||_1 <= delta.
inline double entropy_continuity_bound(double delta, std::size_t total_dim) {
  if (!(delta > 0.0 && delta <= 0.5)) {
    throw UsageError("entropy_continuity_bound: delta must lie in (0, 1/2]");
  }
  return 2.0 * delta * std::log(static_cast<double>(total_dim)) -
         2.0 * delta * std::log(2.0 * delta);
}

}  // namespace mmpdo
