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

#include <cmath>
#include <string>

#include "brute.hpp"
#include "catch_amalgamated.hpp"
#include "mmpdo/certify.hpp"
#include "mmpdo/oracle.hpp"

using namespace mmpdo;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

std::string fixture(const std::string& name) {
  return brute::read_file(std::string(MMPDO_FIXTURES) + "/" + name);
}

FreeEnergyInstance tfim4(double alpha, double beta) {
  FreeEnergyInstance inst;
  inst.hamiltonian = transverse_field_ising(4);
  inst.temperature = 1.0;
  inst.alpha = alpha;
  inst.beta_threshold = beta;
  return inst;
}

double exact_f4() { return thermal_summary(transverse_field_ising(4), 1.0).free_energy; }

// Two blocked sites: the witness is the Gibbs state itself.
MarkovianMpdo honest_witness4() { return build_witness(transverse_field_ising(4), 1.0, 2).mpdo; }

MarkovianMpdo with_choi(const MarkovianMpdo& m, std::size_t k, const ComplexMatrix& choi) {
  std::vector<QuantumChannel> chs = m.channels();
  chs[k] = QuantumChannel::unvalidated(choi, chs[k].d_in(), chs[k].out_dims());
  return MarkovianMpdo(m.initial(), std::move(chs));
}

}  // namespace

TEST_CASE("witness documents round-trip") {
  for (const char* name : {"tfim4_witness.json", "tfim8_witness.json", "product_witness.json",
                           "nontp_witness.json"}) {
    const std::string text = fixture(name);
    CHECK(serialize_witness(parse_witness(text)) == text);
  }
  const MarkovianMpdo m = oracle::random_channel_chain(Dims{2, 3, 2}, 4u);
  const WitnessDocument back = parse_witness(serialize_witness(m, 0.25));
  CHECK(back.declared_epsilon == 0.25);
  CHECK(back.mpdo.initial().matrix() == m.initial().matrix());
  for (std::size_t k = 0; k < m.channels().size(); ++k) {
    CHECK(back.mpdo.channels()[k].choi() == m.channels()[k].choi());
  }
}

TEST_CASE("witness parse errors") {
  SECTION("truncated file is a syntax error with a position") {
    CHECK_THROWS_MATCHES(
        parse_witness(fixture("truncated_witness.json")), FormatError,
        Catch::Matchers::MessageMatches(ContainsSubstring("syntax error at line")));
  }
  SECTION("missing field is named") {
    Json doc = Json::parse(fixture("product_witness.json"));
    doc["channels"][1].erase("choi_matrix");
    CHECK_THROWS_MATCHES(parse_witness(doc.dump()), FormatError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("witness.channels[1].choi_matrix")));
  }
  SECTION("d_in mismatch names the site") {
    CHECK_THROWS_MATCHES(parse_witness(fixture("bad_din_witness.json")), FormatError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("dimension mismatch at site 2")));
  }
  SECTION("a witness cannot declare its own tolerance") {
    Json doc = Json::parse(fixture("product_witness.json"));
    doc["tol_cptp"] = "1";
    CHECK_THROWS_MATCHES(parse_witness(doc.dump()), FormatError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("tol_cptp")));
  }
  SECTION("wrong version, site index and channel count") {
    Json doc = Json::parse(fixture("product_witness.json"));
    Json v = doc;
    v["version"] = "mmpdo-witness/0";
    CHECK_THROWS_AS(parse_witness(v.dump()), FormatError);
    Json s = doc;
    s["channels"][0]["site"] = 2;
    CHECK_THROWS_AS(parse_witness(s.dump()), FormatError);
    Json c = doc;
    c["channels"].erase(1);
    CHECK_THROWS_AS(parse_witness(c.dump()), FormatError);
    Json r = doc;
    r["initial"]["matrix"][0][0] = "abc";
    CHECK_THROWS_AS(parse_witness(r.dump()), FormatError);
  }
}

TEST_CASE("instance documents") {
  SECTION("the 2-local TFIM fixture parses to the reference Hamiltonian") {
    const FreeEnergyInstance inst = parse_instance(fixture("tfim4_instance.json"));
    CHECK(inst.hamiltonian.site_dims() == Dims(4, 2));
    CHECK(inst.hamiltonian.terms().size() == 7);
    CHECK(brute::max_abs(inst.hamiltonian.dense() - transverse_field_ising(4).dense()) < 1e-15);
    CHECK(inst.temperature == 1.0);
    CHECK(inst.alpha < inst.beta_threshold);
    CHECK(serialize_instance(inst) == fixture("tfim4_instance.json"));
  }
  SECTION("alpha >= beta is a contract violation") {
    Json doc = Json::parse(fixture("tfim4_instance.json"));
    doc["alpha"] = doc["beta"];
    CHECK_THROWS_AS(parse_instance(doc.dump()), ContractViolation);
  }
  SECTION("non-Hermitian term names its index") {
    Json doc = Json::parse(fixture("tfim4_instance.json"));
    doc["terms"][2]["matrix"][0][1] = Json::array({"0.5", "0"});
    CHECK_THROWS_MATCHES(parse_instance(doc.dump()), ContractViolation,
                         Catch::Matchers::MessageMatches(ContainsSubstring("term 2")));
  }
  SECTION("window outside the chain") {
    Json doc = Json::parse(fixture("tfim4_instance.json"));
    doc["terms"][0]["start"] = 4;
    CHECK_THROWS_AS(parse_instance(doc.dump()), FormatError);
  }
  SECTION("non-positive temperature") {
    Json doc = Json::parse(fixture("tfim4_instance.json"));
    doc["temperature"] = "0";
    CHECK_THROWS_AS(parse_instance(doc.dump()), ContractViolation);
  }
}

TEST_CASE("verifier decisions") {
  const double f = exact_f4();
  const FreeEnergyInstance inst = tfim4(f + 0.01, f + 0.01 + 0.05 * std::abs(f));
  const MarkovianMpdo honest = honest_witness4();

  SECTION("honest witness is accepted") {
    const Verdict v = verify(inst, honest);
    CHECK(v.wellformed);
    CHECK(v.accepted);
    REQUIRE(v.free_energy_upper);
    CHECK(*v.free_energy_upper >= f - 1e-8);
    CHECK(*v.free_energy_upper <= inst.beta_threshold);
    CHECK(v.threshold_used == inst.beta_threshold);
    CHECK(v.diagnostics.empty());
  }
  SECTION("zeroing a Choi entry makes the witness malformed") {
    ComplexMatrix choi = honest.channels()[0].choi();
    choi(0, 0) = 0.0;
    const Verdict v = verify(inst, with_choi(honest, 0, choi));
    CHECK_FALSE(v.wellformed);
    CHECK_FALSE(v.accepted);
    CHECK_FALSE(v.free_energy_upper);
    REQUIRE(v.diagnostics.size() == 1);
    CHECK_THAT(v.diagnostics[0], ContainsSubstring("channel for site 1 is not CPTP"));
  }
  SECTION("loose-tolerance components are repaired before evaluation") {
    ComplexMatrix choi = honest.channels()[0].choi();
    choi(0, 0) += 1e-5;
    VerifierConfig cfg;
    cfg.tol_cptp = 1e-4;
    const Verdict v = verify(inst, with_choi(honest, 0, choi), cfg);
    CHECK(v.wellformed);
    REQUIRE(v.free_energy_upper);
    CHECK(*v.free_energy_upper >= f - 1e-8);
    CHECK_THAT(v.diagnostics[0], ContainsSubstring("repaired before evaluation"));
  }
  SECTION("a threshold below the true free energy rejects a wellformed witness") {
    const Verdict v = verify(tfim4(f - 1.0, f - 0.5), honest);
    CHECK(v.wellformed);
    CHECK_FALSE(v.accepted);
    CHECK_THAT(v.diagnostics.back(), ContainsSubstring("exceeds threshold"));
  }
  SECTION("midpoint policy uses the centre of the promise gap") {
    VerifierConfig cfg;
    cfg.policy = DecisionPolicy::midpoint;
    const Verdict v = verify(inst, honest, cfg);
    CHECK_THAT(v.threshold_used, WithinAbs(0.5 * (inst.alpha + inst.beta_threshold), 1e-15));
    CHECK(v.accepted == (*v.free_energy_upper <= v.threshold_used));
  }
  SECTION("the exact two-site witness meets the free energy") {
    CHECK_THAT(*verify(inst, honest).free_energy_upper, WithinAbs(f, 1e-9));
  }
  SECTION("unblocked witnesses stay above the free energy") {
    const Witness w = build_witness(inst.hamiltonian, 1.0, 1);
    const Verdict v = verify(inst, w.mpdo);
    CHECK(v.wellformed);
    REQUIRE(v.free_energy_upper);
    CHECK(*v.free_energy_upper >= f - 1e-8);
  }
  SECTION("incompatible site dimensions are malformed, not an exception") {
    const MarkovianMpdo m = oracle::random_channel_chain(Dims{3, 3}, 1u);
    const Verdict v = verify(inst, m);
    CHECK_FALSE(v.wellformed);
    CHECK_THAT(v.diagnostics[0], ContainsSubstring("do not match the instance"));
  }
  SECTION("invalid initial state is reported") {
    ComplexMatrix rho = honest.initial().matrix();
    rho(0, 0) += 0.01;
    const MarkovianMpdo m(DensityMatrix::trusted(rho, Dims{4}), honest.channels());
    const Verdict v = verify(inst, m);
    CHECK_FALSE(v.wellformed);
    CHECK_THAT(v.diagnostics[0], ContainsSubstring("initial state invalid"));
  }
  SECTION("epsilon above one half gives no bound") {
    const MarkovianMpdo far = oracle::random_channel_chain(Dims(4, 2), 8u);
    const MarkovReport r = markov_epsilons(far);
    if (r.epsilon_max > 0.5) {
      const Verdict v = verify(inst, far);
      CHECK(v.wellformed);
      CHECK_FALSE(v.free_energy_upper);
      CHECK_FALSE(v.accepted);
    }
  }
  SECTION("bad tolerance is a usage error") {
    VerifierConfig cfg;
    cfg.tol_cptp = 0.0;
    CHECK_THROWS_AS(verify(inst, honest, cfg), UsageError);
    CHECK_THROWS_AS(parse_policy("strict"), UsageError);
  }
}

TEST_CASE("tolerance sweep is monotone") {
  const FreeEnergyInstance inst = tfim4(exact_f4() + 0.01, exact_f4() + 0.3);
  const MarkovianMpdo honest = honest_witness4();
  ComplexMatrix choi = honest.channels()[0].choi();
  choi(0, 0) += 1e-5;
  const MarkovianMpdo perturbed = with_choi(honest, 0, choi);
  bool seen_wellformed = false;
  for (double tol = 1e-12; tol <= 1e-2; tol *= 10.0) {
    VerifierConfig cfg;
    cfg.tol_cptp = tol;
    const bool wf = verify(inst, perturbed, cfg).wellformed;
    if (seen_wellformed) CHECK(wf);
    seen_wellformed = seen_wellformed || wf;
  }
  CHECK(seen_wellformed);
  VerifierConfig strict;
  strict.tol_cptp = 1e-8;
  CHECK_FALSE(verify(inst, perturbed, strict).wellformed);
}

TEST_CASE("verdicts are deterministic") {
  const std::string inst = fixture("tfim4_instance.json");
  const std::string wit = fixture("tfim4_witness.json");
  const std::string a = serialize_verdict(verify_documents(inst, wit));
  const std::string b = serialize_verdict(verify_documents(inst, wit));
  CHECK(a == b);
  CHECK_THAT(a, ContainsSubstring("\"accepted\": true"));
}

TEST_CASE("witness rounding") {
  SECTION("budget bounds the dense distance at 48 bits") {
    const MarkovianMpdo m = oracle::random_markov_chain(Dims{2, 2, 2}, 3u, 0.2);
    const RoundedWitness r = round_witness(m, 48);
    const double dist =
        trace_norm(oracle::dense_state(m).matrix() - oracle::dense_state(r.mpdo).matrix(), 1e-9);
    CHECK(dist <= r.budget + 1e-12);
    CHECK(r.budget < 1e-9);
  }
  SECTION("rounding twice at 48 bits is idempotent") {
    const MarkovianMpdo m = oracle::random_channel_chain(Dims{2, 3, 2}, 5u);
    const RoundedWitness once = round_witness(m, 48);
    const RoundedWitness twice = round_witness(once.mpdo, 48);
    CHECK(brute::max_abs(once.mpdo.initial().matrix() - twice.mpdo.initial().matrix()) <= 1e-12);
    for (std::size_t k = 0; k < m.channels().size(); ++k) {
      CHECK(brute::max_abs(once.mpdo.channels()[k].choi() - twice.mpdo.channels()[k].choi()) <=
            1e-12);
    }
  }
  SECTION("dyadic product chain is unchanged at 48 bits") {
    const WitnessDocument w = parse_witness(fixture("product_witness.json"));
    const RoundedWitness r = round_witness(w.mpdo, 48);
    CHECK(r.budget <= 1e-12);
    CHECK(brute::max_abs(r.mpdo.initial().matrix() - w.mpdo.initial().matrix()) <= 1e-12);
    for (std::size_t k = 0; k < w.mpdo.channels().size(); ++k) {
      CHECK(brute::max_abs(r.mpdo.channels()[k].choi() - w.mpdo.channels()[k].choi()) <= 1e-12);
    }
  }
  SECTION("coarse rounding of rank-deficient channels stays CPTP") {
    const WitnessDocument w = parse_witness(fixture("tfim8_witness.json"));
    for (int bits : {10, 16, 24}) {
      const RoundedWitness r = round_witness(w.mpdo, bits);
      for (const auto& ch : r.mpdo.channels()) CHECK(ch.defects().within(kCptpTol));
      CHECK(trace_norm(contract(w.mpdo).matrix() - contract(r.mpdo).matrix(), 1e-8) <=
            r.budget);
    }
  }
  SECTION("fewer than 8 bits is a usage error") {
    CHECK_THROWS_AS(round_witness(honest_witness4(), 7), UsageError);
  }
}

TEST_CASE("canonical printer") {
  Json doc;
  doc["b"] = Json::array({"1", "2"});
  doc["a"] = {{"z", 1}, {"y", Json::array({Json::array({"0", "1"})})}};
  doc["c"] = Json::array({Json{{"k", true}}});
  const std::string expected =
      "{\n"
      "  \"a\": {\n"
      "    \"y\": [[\"0\", \"1\"]],\n"
      "    \"z\": 1\n"
      "  },\n"
      "  \"b\": [\"1\", \"2\"],\n"
      "  \"c\": [\n"
      "    {\n"
      "      \"k\": true\n"
      "    }\n"
      "  ]\n"
      "}\n";
  CHECK(canonical_json(doc) == expected);
  CHECK(canonical_json(Json::parse(expected)) == expected);
}
