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

// Command-line front end. Exit codes: 0 accepted or success, 1 rejected,
// 2 invalid input.

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmpdo/certify.hpp"
#include "mmpdo/mpdo.hpp"
#include "mmpdo/selftest.hpp"
#include "mmpdo/spinchain.hpp"

namespace {

constexpr int kSuccess = 0;
constexpr int kRejected = 1;
constexpr int kInvalid = 2;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed for " + path);
}

using mmpdo::Json;
using mmpdo::detail::real_json;

int cmd_verify(const std::string& instance_path, const std::vector<std::string>& witnesses,
               const std::string& policy, double tol) {
  mmpdo::VerifierConfig cfg;
  cfg.policy = mmpdo::parse_policy(policy);
  cfg.tol_cptp = tol;
  const std::string instance = read_file(instance_path);
  bool all = true;
  for (const auto& w : witnesses) {
    const mmpdo::Verdict v = mmpdo::verify_documents(instance, read_file(w), cfg);
    std::cout << mmpdo::serialize_verdict(v);
    all = all && v.accepted;
  }
  return all ? kSuccess : kRejected;
}

int cmd_entropy(const std::string& path) {
  const mmpdo::WitnessDocument w = mmpdo::parse_witness(read_file(path));
  const mmpdo::MarkovReport r = mmpdo::entropy_estimate(w.mpdo);
  Json doc;
  Json eps = Json::array();
  for (double e : r.epsilons) eps.push_back(real_json(e));
  doc["epsilons"] = std::move(eps);
  doc["epsilon_max"] = real_json(r.epsilon_max);
  doc["entropy_estimate"] = real_json(r.entropy_estimate);
  doc["entropy_error_bound"] = real_json(r.entropy_error_bound);
  doc["certified"] = r.certified;
  std::cout << mmpdo::canonical_json(doc);
  return kSuccess;
}

int cmd_build(const std::string& instance_path, double beta, std::size_t block,
              const std::string& out) {
  const mmpdo::FreeEnergyInstance inst = mmpdo::parse_instance(read_file(instance_path));
  const mmpdo::Witness w = mmpdo::build_witness(inst.hamiltonian, beta, block);
  const mmpdo::MarkovReport r = mmpdo::markov_epsilons(w.mpdo);
  write_file(out, mmpdo::serialize_witness(w.mpdo, r.epsilon_max));
  Json doc;
  doc["blocked_dims"] = mmpdo::detail::dims_json(w.plan.blocked_dims);
  doc["epsilon_max"] = real_json(r.epsilon_max);
  doc["out"] = out;
  std::cout << mmpdo::canonical_json(doc);
  return kSuccess;
}

int cmd_gibbs(const std::string& instance_path, double beta) {
  if (!(beta > 0.0)) throw mmpdo::UsageError("gibbs: --beta must be positive");
  const mmpdo::FreeEnergyInstance inst = mmpdo::parse_instance(read_file(instance_path));
  const mmpdo::ThermalSummary s = mmpdo::thermal_summary(inst.hamiltonian, 1.0 / beta);
  Json doc;
  doc["beta"] = real_json(beta);
  doc["free_energy"] = real_json(s.free_energy);
  doc["entropy"] = real_json(s.entropy);
  doc["energy"] = real_json(s.energy);
  std::cout << mmpdo::canonical_json(doc);
  return kSuccess;
}

int cmd_cmi_scan(const std::string& instance_path, double beta, std::size_t a, std::size_t lmax,
                 const std::string& csv) {
  const mmpdo::FreeEnergyInstance inst = mmpdo::parse_instance(read_file(instance_path));
  const mmpdo::DecayScan scan = mmpdo::cmi_decay_scan(inst.hamiltonian, beta, a, lmax);
  if (csv.empty()) {
    std::cout << scan.to_csv();
    return kSuccess;
  }
  write_file(csv, scan.to_csv());
  Json doc;
  Json rows = Json::array();
  for (const auto& r : scan.rows) rows.push_back({{"ell", r.ell}, {"delta", real_json(r.delta)}});
  doc["rows"] = std::move(rows);
  doc["a"] = scan.a_pos;
  doc["fit"] = scan.fit ? Json{{"slope", real_json(scan.fit->slope)},
                               {"intercept", real_json(scan.fit->intercept)}}
                        : Json(nullptr);
  doc["csv"] = csv;
  std::cout << mmpdo::canonical_json(doc);
  return kSuccess;
}

int cmd_round(const std::string& in, int bits, const std::string& out) {
  const mmpdo::WitnessDocument w = mmpdo::parse_witness(read_file(in));
  const mmpdo::RoundedWitness r = mmpdo::round_witness(w.mpdo, bits);
  write_file(out, mmpdo::serialize_witness(r.mpdo));
  Json doc;
  doc["bits"] = bits;
  doc["budget"] = real_json(r.budget);
  doc["out"] = out;
  std::cout << mmpdo::canonical_json(doc);
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markovian MPDO entropy estimates, free-energy certificates and witness tools"};
  app.require_subcommand(1);

  std::string instance, witness_in, out, policy = "sound", csv;
  std::vector<std::string> witnesses;
  double tol = mmpdo::kCptpTol, beta = 1.0;
  std::size_t block = 1, a = 1, lmax = 1;
  int bits = 32;

  auto* verify = app.add_subcommand("verify", "Verify a witness against an instance");
  verify->add_option("--instance", instance, "Instance file")->required();
  verify->add_option("--witness", witnesses, "Witness file (repeatable)")->required();
  verify->add_option("--policy", policy, "Decision policy")
      ->check(CLI::IsMember({"sound", "midpoint"}));
  verify->add_option("--tol-cptp", tol, "CPTP tolerance");

  auto* entropy = app.add_subcommand("entropy", "Entropy estimate and error bound of a witness");
  entropy->add_option("--witness", witness_in, "Witness file")->required();

  auto* build = app.add_subcommand("build", "Build a Petz-chain witness from the Gibbs state");
  build->add_option("--instance", instance, "Instance file")->required();
  build->add_option("--beta", beta, "Inverse temperature")->required();
  build->add_option("--block", block, "Block length")->required();
  build->add_option("--out", out, "Output witness file")->required();

  auto* gibbs = app.add_subcommand("gibbs", "Exact thermal free energy, entropy and energy");
  gibbs->add_option("--instance", instance, "Instance file")->required();
  gibbs->add_option("--beta", beta, "Inverse temperature")->required();

  auto* scan = app.add_subcommand("cmi-scan", "Conditional mutual information decay scan");
  scan->add_option("--instance", instance, "Instance file")->required();
  scan->add_option("--beta", beta, "Inverse temperature")->required();
  scan->add_option("--a", a, "Number of sites in A")->required();
  scan->add_option("--lmax", lmax, "Largest B width")->required();
  scan->add_option("--csv", csv, "Write rows to this CSV file");

  auto* round = app.add_subcommand("round", "Round a witness to finite precision");
  round->add_option("--witness", witness_in, "Input witness file")->required();
  round->add_option("--bits", bits, "Fractional bits")->required();
  round->add_option("--out", out, "Output witness file")->required();

  auto* selftest = app.add_subcommand("selftest", "Run the oracle self-test suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*verify) return cmd_verify(instance, witnesses, policy, tol);
    if (*entropy) return cmd_entropy(witness_in);
    if (*build) return cmd_build(instance, beta, block, out);
    if (*gibbs) return cmd_gibbs(instance, beta);
    if (*scan) return cmd_cmi_scan(instance, beta, a, lmax, csv);
    if (*round) return cmd_round(witness_in, bits, out);
    if (*selftest) return mmpdo::run_selftest(std::cout) ? kSuccess : kRejected;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
