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

// Witness and instance documents, the verifier, and witness rounding.
//
// Documents are UTF-8 JSON in a canonical layout: keys sorted, reals as
// shortest round-trip decimal strings, complex entries as ["re", "im"],
// matrices row-major with one row per line. Site indices in documents are
// 1-based.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmpdo/channels.hpp"
#include "mmpdo/decimal.hpp"
#include "mmpdo/errors.hpp"
#include "mmpdo/hamiltonian.hpp"
#include "mmpdo/mpdo.hpp"
#include "mmpdo/spectra.hpp"
#include "mmpdo/spinchain.hpp"

namespace mmpdo {

using Json = nlohmann::json;

inline constexpr std::string_view kWitnessVersion = "mmpdo-witness/1";

// ---------------------------------------------------------------------------
// Canonical text
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t json_depth(const Json& j) {
  if (!j.is_array()) return 0;
  std::size_t d = 0;
  for (const auto& x : j) d = std::max(d, json_depth(x));
  return d + 1;
}

inline bool contains_object(const Json& j) {
  if (j.is_object()) return true;
  if (j.is_array()) {
    for (const auto& x : j) {
      if (contains_object(x)) return true;
    }
  }
  return false;
}

inline void write_inline(const Json& j, std::string& out) {
  if (!j.is_array()) {
    out += j.dump(-1, ' ', false, Json::error_handler_t::strict);
    return;
  }
  out += "[";
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (i > 0) out += ", ";
    write_inline(j[i], out);
  }
  out += "]";
}

inline void write_json(const Json& j, std::size_t indent, std::string& out) {
  const std::string pad(indent, ' ');
  const std::string inner(indent + 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += inner + Json(it.key()).dump() + ": ";
      write_json(it.value(), indent + 2, out);
    }
    out += "\n" + pad + "}";
  } else if (j.is_array()) {
    if (j.empty() || (!contains_object(j) && json_depth(j) <= 2)) {
      write_inline(j, out);
      return;
    }
    out += "[\n";
    bool first = true;
    for (const auto& x : j) {
      if (!first) out += ",\n";
      first = false;
      out += inner;
      write_json(x, indent + 2, out);
    }
    out += "\n" + pad + "]";
  } else {
    out += j.dump(-1, ' ', false, Json::error_handler_t::strict);
  }
}

}  // namespace detail

/// Canonical rendering: objects one key per line, arrays of depth <= 2
/// without objects inline, trailing newline.
inline std::string canonical_json(const Json& j) {
  std::string out;
  detail::write_json(j, 0, out);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Field access with error locus
// ---------------------------------------------------------------------------

namespace detail {

inline Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw FormatError("syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
}

inline void expect_keys(const Json& obj, std::initializer_list<std::string_view> required,
                        std::initializer_list<std::string_view> optional,
                        const std::string& path) {
  if (!obj.is_object()) throw FormatError(path + ": expected an object");
  for (auto key : required) {
    if (!obj.contains(std::string(key))) {
      throw FormatError("missing field '" + path + "." + std::string(key) + "'");
    }
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known =
        std::find(required.begin(), required.end(), it.key()) != required.end() ||
        std::find(optional.begin(), optional.end(), it.key()) != optional.end();
    if (!known) throw FormatError("unknown field '" + path + "." + it.key() + "'");
  }
}

inline std::size_t read_count(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned()) {
    throw FormatError(path + ": expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

/// A finite real, written as a decimal string or a JSON number.
inline double read_real(const Json& j, const std::string& path) {
  if (j.is_string()) {
    const auto x = parse_decimal(j.get_ref<const std::string&>());
    if (!x) throw FormatError(path + ": not a finite decimal: " + j.dump());
    return *x;
  }
  if (j.is_number()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw FormatError(path + ": not finite");
    return x;
  }
  throw FormatError(path + ": expected a real number");
}

inline Dims read_dims(const Json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path + ": expected an array of dimensions");
  Dims out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::size_t d = read_count(j[i], path + "[" + std::to_string(i) + "]");
    if (d == 0) throw FormatError(path + "[" + std::to_string(i) + "]: dimension is zero");
    out.push_back(d);
  }
  return out;
}

/// Entries are ["re", "im"] pairs, or bare reals.
inline ComplexMatrix read_matrix(const Json& j, std::size_t side, const std::string& path) {
  if (!j.is_array() || j.size() != side) {
    throw FormatError(path + ": expected " + std::to_string(side) + " rows");
  }
  const auto n = static_cast<Eigen::Index>(side);
  ComplexMatrix m(n, n);
  for (std::size_t r = 0; r < side; ++r) {
    const Json& row = j[r];
    const std::string rpath = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != side) {
      throw FormatError(rpath + ": expected " + std::to_string(side) + " entries");
    }
    for (std::size_t c = 0; c < side; ++c) {
      const Json& e = row[c];
      const std::string epath = rpath + "[" + std::to_string(c) + "]";
      Complex z;
      if (e.is_array()) {
        if (e.size() != 2) throw FormatError(epath + ": complex entry needs [re, im]");
        z = Complex(read_real(e[0], epath + "[0]"), read_real(e[1], epath + "[1]"));
      } else {
        z = Complex(read_real(e, epath), 0.0);
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = z;
    }
  }
  return m;
}

inline Json real_json(double x) { return Json(format_decimal(x)); }

inline Json matrix_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(Json::array({real_json(m(r, c).real()), real_json(m(r, c).imag())}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json dims_json(const Dims& dims) {
  Json out = Json::array();
  for (std::size_t d : dims) out.push_back(d);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Witness documents
// ---------------------------------------------------------------------------

struct WitnessDocument {
  MarkovianMpdo mpdo;
  std::optional<double> declared_epsilon;
};

/// Parses a witness. Structure and dimensions are checked; CPTP validity
/// and the initial state's positivity are left to `verify`.
inline WitnessDocument parse_witness(std::string_view text) {
  using namespace detail;
  const Json doc = parse_json_text(text);
  expect_keys(doc, {"version", "n_sites", "site_dims", "initial", "channels"},
              {"declared_epsilon"}, "witness");
  const Json& version = doc["version"];
  if (!version.is_string() || version.get<std::string>() != kWitnessVersion) {
    throw FormatError("witness.version: expected \"" + std::string(kWitnessVersion) + "\"");
  }
  const std::size_t n = read_count(doc["n_sites"], "witness.n_sites");
  const Dims site_dims = read_dims(doc["site_dims"], "witness.site_dims");
  if (n == 0) throw FormatError("witness.n_sites: must be positive");
  if (site_dims.size() != n) {
    throw FormatError("witness.site_dims: has " + std::to_string(site_dims.size()) +
                      " entries but n_sites is " + std::to_string(n));
  }

  const Json& init = doc["initial"];
  expect_keys(init, {"dim", "matrix"}, {}, "witness.initial");
  const std::size_t dim = read_count(init["dim"], "witness.initial.dim");
  if (dim != site_dims[0]) {
    throw FormatError("witness.initial.dim: " + std::to_string(dim) +
                      " but site 1 has dimension " + std::to_string(site_dims[0]));
  }
  ComplexMatrix rho = read_matrix(init["matrix"], dim, "witness.initial.matrix");

  const Json& chans = doc["channels"];
  if (!chans.is_array()) throw FormatError("witness.channels: expected an array");
  if (chans.size() != n - 1) {
    throw FormatError("witness.channels: expected " + std::to_string(n - 1) +
                      " channels, got " + std::to_string(chans.size()));
  }
  std::vector<QuantumChannel> channels;
  for (std::size_t k = 0; k < chans.size(); ++k) {
    const std::string path = "witness.channels[" + std::to_string(k) + "]";
    const Json& c = chans[k];
    expect_keys(c, {"site", "d_in", "out_dims", "choi_matrix"}, {}, path);
    const std::size_t site = read_count(c["site"], path + ".site");
    if (site != k + 1) {
      throw FormatError(path + ".site: expected " + std::to_string(k + 1) + ", got " +
                        std::to_string(site));
    }
    const std::size_t d_in = read_count(c["d_in"], path + ".d_in");
    if (d_in != site_dims[k]) {
      throw FormatError("dimension mismatch at site " + std::to_string(site) +
                        ": channel d_in is " + std::to_string(d_in) +
                        " but the site has dimension " + std::to_string(site_dims[k]));
    }
    const Dims out_dims = read_dims(c["out_dims"], path + ".out_dims");
    const Dims expected{site_dims[k], site_dims[k + 1]};
    if (out_dims != expected) {
      throw FormatError("dimension mismatch at site " + std::to_string(site) +
                        ": channel out_dims " + dims_to_string(out_dims) + " but expected " +
                        dims_to_string(expected));
    }
    ComplexMatrix choi =
        read_matrix(c["choi_matrix"], d_in * site_dims[k] * site_dims[k + 1],
                    path + ".choi_matrix");
    channels.push_back(QuantumChannel::unvalidated(std::move(choi), d_in, out_dims));
  }

  std::optional<double> declared;
  if (doc.contains("declared_epsilon")) {
    declared = read_real(doc["declared_epsilon"], "witness.declared_epsilon");
  }
  return {MarkovianMpdo(DensityMatrix::trusted(std::move(rho), Dims{dim}), std::move(channels)),
          declared};
}

inline std::string serialize_witness(const MarkovianMpdo& m,
                                     std::optional<double> declared_epsilon = std::nullopt) {
  using namespace detail;
  Json doc;
  doc["version"] = std::string(kWitnessVersion);
  doc["n_sites"] = m.sites();
  doc["site_dims"] = dims_json(m.site_dims());
  doc["initial"] = {{"dim", m.initial().dim()}, {"matrix", matrix_json(m.initial().matrix())}};
  Json chans = Json::array();
  for (std::size_t k = 0; k < m.channels().size(); ++k) {
    const QuantumChannel& ch = m.channels()[k];
    chans.push_back({{"site", k + 1},
                     {"d_in", ch.d_in()},
                     {"out_dims", dims_json(ch.out_dims())},
                     {"choi_matrix", matrix_json(ch.choi())}});
  }
  doc["channels"] = std::move(chans);
  if (declared_epsilon) doc["declared_epsilon"] = real_json(*declared_epsilon);
  return canonical_json(doc);
}

inline std::string serialize_witness(const WitnessDocument& w) {
  return serialize_witness(w.mpdo, w.declared_epsilon);
}

// ---------------------------------------------------------------------------
// Instance documents
// ---------------------------------------------------------------------------

/// Parses and validates an instance: every term must be Hermitian and fit
/// the chain, the temperature positive and beta > alpha.
inline FreeEnergyInstance parse_instance(std::string_view text) {
  using namespace detail;
  const Json doc = parse_json_text(text);
  expect_keys(doc, {"site_dims", "terms", "temperature", "alpha", "beta"}, {}, "instance");
  FreeEnergyInstance inst;
  const Dims site_dims = read_dims(doc["site_dims"], "instance.site_dims");
  if (site_dims.empty()) throw FormatError("instance.site_dims: empty chain");
  inst.hamiltonian = LocalHamiltonian(site_dims);
  const Json& terms = doc["terms"];
  if (!terms.is_array()) throw FormatError("instance.terms: expected an array");
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::string path = "instance.terms[" + std::to_string(k) + "]";
    const Json& t = terms[k];
    expect_keys(t, {"start", "window", "matrix"}, {}, path);
    const std::size_t start = read_count(t["start"], path + ".start");
    const std::size_t window = read_count(t["window"], path + ".window");
    if (start == 0 || window == 0 || start - 1 + window > site_dims.size()) {
      throw FormatError(path + ": window of " + std::to_string(window) + " sites at site " +
                        std::to_string(start) + " does not fit in " +
                        std::to_string(site_dims.size()) + " sites");
    }
    const std::size_t side = dims_product(std::span(site_dims).subspan(start - 1, window));
    ComplexMatrix op = read_matrix(t["matrix"], side, path + ".matrix");
    if (!(hermiticity_defect(op) <= kHermTol)) {
      throw ContractViolation("term " + std::to_string(k) + " (" + path +
                              ") is not Hermitian");
    }
    inst.hamiltonian.add_term(start - 1, window, std::move(op));
  }
  inst.temperature = read_real(doc["temperature"], "instance.temperature");
  inst.alpha = read_real(doc["alpha"], "instance.alpha");
  inst.beta_threshold = read_real(doc["beta"], "instance.beta");
  inst.validate();
  return inst;
}

inline std::string serialize_instance(const FreeEnergyInstance& inst) {
  using namespace detail;
  Json doc;
  doc["site_dims"] = dims_json(inst.hamiltonian.site_dims());
  Json terms = Json::array();
  for (const auto& t : inst.hamiltonian.terms()) {
    terms.push_back({{"start", t.start + 1}, {"window", t.width}, {"matrix", matrix_json(t.op)}});
  }
  doc["terms"] = std::move(terms);
  doc["temperature"] = real_json(inst.temperature);
  doc["alpha"] = real_json(inst.alpha);
  doc["beta"] = real_json(inst.beta_threshold);
  return canonical_json(doc);
}

// ---------------------------------------------------------------------------
// Verifier
// ---------------------------------------------------------------------------

enum class DecisionPolicy { sound, midpoint };

inline std::string_view policy_name(DecisionPolicy p) {
  return p == DecisionPolicy::sound ? "sound" : "midpoint";
}

inline DecisionPolicy parse_policy(std::string_view s) {
  if (s == "sound") return DecisionPolicy::sound;
  if (s == "midpoint") return DecisionPolicy::midpoint;
  throw UsageError("unknown policy '" + std::string(s) + "' (expected sound or midpoint)");
}

/// Trusted verifier configuration; never read from the witness.
struct VerifierConfig {
  double tol_cptp = kCptpTol;
  DecisionPolicy policy = DecisionPolicy::sound;
};

struct Verdict {
  bool wellformed = false;
  std::optional<double> epsilon_max;
  /// Absent when the witness is malformed or epsilon_max > 1/2.
  std::optional<double> free_energy_upper;
  std::optional<double> energy;
  std::optional<double> entropy_estimate;
  std::optional<double> entropy_error_bound;
  double threshold_used = 0.0;
  double alpha = 0.0;
  double beta_threshold = 0.0;
  DecisionPolicy policy = DecisionPolicy::sound;
  double tol_cptp = kCptpTol;
  bool accepted = false;
  std::vector<std::string> diagnostics;
};

inline std::string serialize_verdict(const Verdict& v) {
  using detail::real_json;
  auto opt = [](const std::optional<double>& x) { return x ? real_json(*x) : Json(nullptr); };
  Json doc;
  doc["wellformed"] = v.wellformed;
  doc["accepted"] = v.accepted;
  doc["epsilon_max"] = opt(v.epsilon_max);
  doc["free_energy_upper"] = opt(v.free_energy_upper);
  doc["energy"] = opt(v.energy);
  doc["entropy_estimate"] = opt(v.entropy_estimate);
  doc["entropy_error_bound"] = opt(v.entropy_error_bound);
  doc["threshold_used"] = real_json(v.threshold_used);
  doc["alpha"] = real_json(v.alpha);
  doc["beta"] = real_json(v.beta_threshold);
  doc["policy"] = std::string(policy_name(v.policy));
  doc["tol_cptp"] = real_json(v.tol_cptp);
  doc["diagnostics"] = v.diagnostics;
  return canonical_json(doc);
}

namespace detail {

inline std::optional<std::string> state_defect(const DensityMatrix& rho, double tol) {
  const ComplexMatrix& m = rho.matrix();
  const double herm = hermiticity_defect(m);
  const RealVector values = hermitian_eigenvalues((m + m.adjoint()) * 0.5, 1.0);
  const double psd = std::max(0.0, -values(0));
  const double tr = std::abs(m.trace() - Complex(1.0, 0.0));
  if (herm <= tol && psd <= tol && tr <= tol) return std::nullopt;
  return "initial state invalid: hermiticity defect " + format_decimal(herm) +
         ", PSD defect " + format_decimal(psd) + ", trace defect " + format_decimal(tr);
}

/// Hermitian part with negative eigenvalues clipped, at unit trace.
inline DensityMatrix repair_state(const DensityMatrix& rho) {
  HermitianEigen eig = hermitian_eigen((rho.matrix() + rho.matrix().adjoint()) * 0.5, 1.0);
  eig.values = eig.values.cwiseMax(0.0);
  eig.values /= eig.values.sum();
  return DensityMatrix::trusted(eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint(),
                                rho.dims());
}

/// The witness with every component that is valid only at a tolerance
/// looser than kCptpTol moved back onto the exact CPTP set.
inline MarkovianMpdo repair_witness(const MarkovianMpdo& m, std::vector<std::string>& notes) {
  DensityMatrix initial = m.initial();
  if (state_defect(initial, kCptpTol)) {
    initial = repair_state(initial);
    notes.push_back("initial state repaired before evaluation");
  }
  std::vector<QuantumChannel> channels;
  for (std::size_t k = 0; k < m.channels().size(); ++k) {
    const QuantumChannel& ch = m.channels()[k];
    if (ch.defects().within(kCptpTol)) {
      channels.push_back(ch);
      continue;
    }
    channels.push_back(QuantumChannel::unvalidated(
        restore_cptp(ch.choi(), ch.choi_dims(), kCptpTol), ch.d_in(), ch.out_dims()));
    notes.push_back("channel for site " + std::to_string(k + 1) +
                    " repaired before evaluation");
  }
  return MarkovianMpdo(std::move(initial), std::move(channels));
}

}  // namespace detail

/// Checks the witness at cfg.tol_cptp, computes its certified free-energy
/// upper bound on the instance and applies the decision rule. Witness
/// defects never throw; they yield wellformed = false with diagnostics.
/// Components accepted only because cfg.tol_cptp is looser than kCptpTol
/// are repaired before evaluation. Witness sites may be blocks of
/// consecutive instance sites.
inline Verdict verify(const FreeEnergyInstance& instance, const MarkovianMpdo& witness,
                      const VerifierConfig& cfg = {}) {
  instance.validate();
  if (!(cfg.tol_cptp > 0.0) || !std::isfinite(cfg.tol_cptp)) {
    throw UsageError("tol_cptp must be a positive finite number");
  }
  Verdict v;
  v.alpha = instance.alpha;
  v.beta_threshold = instance.beta_threshold;
  v.policy = cfg.policy;
  v.tol_cptp = cfg.tol_cptp;
  v.threshold_used = cfg.policy == DecisionPolicy::sound
                         ? instance.beta_threshold
                         : 0.5 * (instance.alpha + instance.beta_threshold);

  v.wellformed = true;
  std::optional<LocalHamiltonian> blocked;
  try {
    const BlockingPlan plan = infer_blocking(instance.hamiltonian.site_dims(), witness.site_dims());
    blocked = block_hamiltonian(instance.hamiltonian, plan);
  } catch (const Error& e) {
    v.wellformed = false;
    v.diagnostics.push_back(std::string("witness sites do not match the instance: ") + e.what());
  }
  if (auto d = detail::state_defect(witness.initial(), cfg.tol_cptp)) {
    v.wellformed = false;
    v.diagnostics.push_back(*d);
  }
  for (std::size_t k = 0; k < witness.channels().size(); ++k) {
    const ChannelDefects& d = witness.channels()[k].defects();
    if (!d.within(cfg.tol_cptp)) {
      v.wellformed = false;
      v.diagnostics.push_back("channel for site " + std::to_string(k + 1) +
                              " is not CPTP: CP defect " + format_decimal(d.cp) +
                              ", TP defect " + format_decimal(d.tp) +
                              ", hermiticity defect " + format_decimal(d.hermiticity));
    }
  }
  if (!v.wellformed) return v;

  try {
    const MarkovianMpdo evaluated = detail::repair_witness(witness, v.diagnostics);
    const FreeEnergyBound fb =
        free_energy_upper_bound(evaluated, *blocked, instance.temperature);
    v.epsilon_max = fb.report.epsilon_max;
    v.energy = fb.energy;
    v.entropy_estimate = fb.report.entropy_estimate;
    if (!fb.report.certified) {
      v.diagnostics.push_back("epsilon_max " + format_decimal(fb.report.epsilon_max) +
                              " exceeds 1/2; no certified entropy bound");
    } else {
      v.entropy_error_bound = fb.report.entropy_error_bound;
      v.free_energy_upper = fb.value;
    }
  } catch (const Error& e) {
    v.wellformed = false;
    v.diagnostics.push_back(std::string("evaluation failed: ") + e.what());
    return v;
  }
  v.accepted = v.free_energy_upper.has_value() && *v.free_energy_upper <= v.threshold_used;
  if (v.free_energy_upper && !v.accepted) {
    v.diagnostics.push_back("free energy upper bound " + format_decimal(*v.free_energy_upper) +
                            " exceeds threshold " + format_decimal(v.threshold_used));
  }
  return v;
}

/// verify on document bytes. Parse errors propagate as FormatError.
inline Verdict verify_documents(std::string_view instance_text, std::string_view witness_text,
                                const VerifierConfig& cfg = {}) {
  const FreeEnergyInstance inst = parse_instance(instance_text);
  const WitnessDocument w = parse_witness(witness_text);
  return verify(inst, w.mpdo, cfg);
}

// ---------------------------------------------------------------------------
// Witness rounding
// ---------------------------------------------------------------------------

struct RoundedWitness {
  MarkovianMpdo mpdo;
  /// ||rho1 - rho1~||_1 + sum_k d_in ||J_k - J_k~||_1; bounds the trace
  /// distance between the dense states before and after rounding.
  double budget = 0.0;
};

inline RoundedWitness round_witness(const MarkovianMpdo& m, int bits, double tol = kCptpTol) {
  if (bits < 8) throw UsageError("round_witness: bits must be >= 8");
  const DensityMatrix initial = round_density_matrix(m.initial(), bits, tol);
  double budget = trace_norm(m.initial().matrix() - initial.matrix(), 1e-9);
  std::vector<QuantumChannel> channels;
  for (const auto& ch : m.channels()) {
    RoundedChannel r = round_channel(ch, bits, tol);
    budget += r.distance_bound;
    channels.push_back(std::move(r.channel));
  }
  return {MarkovianMpdo(initial, std::move(channels)), budget};
}

}  // namespace mmpdo
