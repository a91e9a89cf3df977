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

// Element-wise reference implementations for tests. These loop over
// explicit multi-indices and share no code with the library kernels.

#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmpdo/spectra.hpp"

namespace brute {

using mmpdo::ComplexMatrix;
using mmpdo::Dims;

inline std::vector<std::size_t> digits(std::size_t index, const Dims& dims) {
  std::vector<std::size_t> out(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = index % dims[k];
    index /= dims[k];
  }
  return out;
}

inline std::size_t compose(const std::vector<std::size_t>& digs, const Dims& dims) {
  std::size_t index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + digs[k];
  return index;
}

/// Sum over all (row, col) pairs whose traced digits agree.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const Dims& dims,
                                   const std::vector<std::size_t>& keep) {
  std::vector<bool> kept(dims.size(), false);
  Dims kdims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    for (std::size_t q : keep) kept[k] = kept[k] || q == k;
    if (kept[k]) kdims.push_back(dims[k]);
  }
  std::size_t side = 1;
  for (std::size_t d : kdims) side *= d;
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(side),
                                          static_cast<Eigen::Index>(side));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto rd = digits(static_cast<std::size_t>(r), dims);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto cd = digits(static_cast<std::size_t>(c), dims);
      bool match = true;
      std::vector<std::size_t> rk, ck;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (kept[k]) {
          rk.push_back(rd[k]);
          ck.push_back(cd[k]);
        } else if (rd[k] != cd[k]) {
          match = false;
        }
      }
      if (match) {
        out(static_cast<Eigen::Index>(compose(rk, kdims)),
            static_cast<Eigen::Index>(compose(ck, kdims))) += m(r, c);
      }
    }
  }
  return out;
}

/// (I (x) Phi (x) I)(rho) on subsystem `site`, with Phi(|i><j|) read off
/// the (i, j) block of the Choi matrix.
inline ComplexMatrix apply_choi(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out,
                                const ComplexMatrix& rho, const Dims& dims, std::size_t site) {
  if (dims[site] != d_in) throw std::invalid_argument("apply_choi: d_in does not match the site");
  Dims out_dims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (k == site) {
      out_dims.push_back(d_out);
    } else {
      out_dims.push_back(dims[k]);
    }
  }
  std::size_t side = 1;
  for (std::size_t d : out_dims) side *= d;
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(side),
                                          static_cast<Eigen::Index>(side));
  for (Eigen::Index r = 0; r < rho.rows(); ++r) {
    const auto rd = digits(static_cast<std::size_t>(r), dims);
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      if (rho(r, c) == mmpdo::Complex(0, 0)) continue;
      const auto cd = digits(static_cast<std::size_t>(c), dims);
      const std::size_t i = rd[site], j = cd[site];
      for (std::size_t o = 0; o < d_out; ++o) {
        for (std::size_t p = 0; p < d_out; ++p) {
          auto ro = rd;
          auto co = cd;
          ro[site] = o;
          co[site] = p;
          const mmpdo::Complex w = choi(static_cast<Eigen::Index>(i * d_out + o),
                                        static_cast<Eigen::Index>(j * d_out + p));
          out(static_cast<Eigen::Index>(compose(ro, out_dims)),
              static_cast<Eigen::Index>(compose(co, out_dims))) += rho(r, c) * w;
        }
      }
    }
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace brute
