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
#include <cstdint>
#include <vector>

#include "brute.hpp"
#include "catch_amalgamated.hpp"
#include "mmpdo/channels.hpp"
#include "mmpdo/oracle.hpp"

using namespace mmpdo;
using Catch::Matchers::WithinAbs;

namespace {

ComplexMatrix dyadic_diag(std::initializer_list<double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("channel_from_choi validation") {
  SECTION("identity channel on a qubit has zero defects") {
    ComplexMatrix c = ComplexMatrix::Zero(4, 4);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) c(i * 2 + i, j * 2 + j) = 1.0;
    }
    const QuantumChannel ch = channel_from_choi(c, 2, Dims{2});
    CHECK(ch.defects().cp < 1e-14);
    CHECK(ch.defects().tp < 1e-14);
  }
  SECTION("shifting one eigenvalue negative is rejected with both defects") {
    const QuantumChannel good = oracle::random_channel(2, Dims{2}, 3u);
    const HermitianEigen eig = hermitian_eigen(good.choi());
    const Eigen::VectorXcd v = eig.vectors.col(0);
    const ComplexMatrix bad = good.choi() - (eig.values(0) + 0.1) * (v * v.adjoint());
    try {
      (void)channel_from_choi(bad, 2, Dims{2});
      FAIL("expected InvalidChannelError");
    } catch (const InvalidChannelError& e) {
      CHECK_THAT(e.cp_defect(), WithinAbs(0.1, 1e-9));
      CHECK(e.tp_defect() > 0.0);
    }
  }
  SECTION("trace-and-replace Choi is valid") {
    const DensityMatrix tau = oracle::random_density_matrix(Dims{3}, 4u);
    const QuantumChannel ch = channel_from_choi(kron(identity_matrix(2), tau.matrix()), 2,
                                                Dims{3});
    CHECK(ch.defects().within(1e-12));
  }
  SECTION("side mismatch is a usage error") {
    CHECK_THROWS_AS(channel_from_choi(identity_matrix(5), 2, Dims{2}), UsageError);
    CHECK_THROWS_AS(channel_from_choi(identity_matrix(4), 0, Dims{4}), UsageError);
  }
  SECTION("TP violation alone is rejected") {
    CHECK_THROWS_AS(channel_from_choi(1.01 * identity_channel(2).choi(), 2, Dims{2}),
                    InvalidChannelError);
  }
}

TEST_CASE("apply") {
  const DensityMatrix rho = oracle::random_density_matrix(Dims{2, 3}, 11u);
  SECTION("identity channel leaves the state unchanged") {
    const DensityMatrix out = apply(identity_channel(3), rho, 1);
    CHECK(brute::max_abs(out.matrix() - rho.matrix()) < 1e-12);
  }
  SECTION("replacement channel on a single site returns tau") {
    const DensityMatrix tau = oracle::random_density_matrix(Dims{2}, 12u);
    const DensityMatrix single = oracle::random_density_matrix(Dims{3}, 13u);
    const DensityMatrix out = apply(replacement_channel(3, tau), single, 0);
    CHECK(brute::max_abs(out.matrix() - tau.matrix()) < 1e-12);
  }
  SECTION("random channel matches Kraus application and element-wise oracle") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const QuantumChannel ch = oracle::random_channel(3, Dims{2, 2}, s);
      const DensityMatrix out = apply(ch, rho, 1);
      const auto kraus = oracle::kraus_operators(ch);
      const ComplexMatrix ref = oracle::apply_kraus(rho.matrix(), rho.dims(), 1, kraus);
      CHECK(brute::max_abs(out.matrix() - ref) < 1e-12);
      const ComplexMatrix ref2 = brute::apply_choi(ch.choi(), 3, 4, rho.matrix(), rho.dims(), 1);
      CHECK(brute::max_abs(out.matrix() - ref2) < 1e-12);
      CHECK(out.dims() == Dims{2, 2, 2});
    }
  }
  SECTION("dimension mismatch and bad site are usage errors") {
    CHECK_THROWS_AS(apply(identity_channel(2), rho, 1), UsageError);
    CHECK_THROWS_AS(apply(identity_channel(2), rho, 2), UsageError);
  }
  SECTION("output trace is preserved") {
    const DensityMatrix out = apply(oracle::random_channel(2, Dims{4}, 5u), rho, 0);
    CHECK(std::abs(out.matrix().trace().real() - 1.0) < 1e-9);
  }
}

TEST_CASE("compose_then_trace") {
  SECTION("tracing the prepared factor of X -> X (x) tau gives the identity") {
    const DensityMatrix tau = oracle::random_density_matrix(Dims{3}, 21u);
    const QuantumChannel ch = compose_then_trace(append_channel(2, tau), {1});
    CHECK(brute::max_abs(ch.choi() - identity_channel(2).choi()) < 1e-12);
  }
  SECTION("random channels stay TP and commute with partial trace") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const QuantumChannel phi = oracle::random_channel(2, Dims{2, 3}, 100 + s);
      for (std::size_t t = 0; t < 2; ++t) {
        const QuantumChannel reduced = compose_then_trace(phi, {t});
        CHECK(reduced.defects().tp <= 1e-9);
        CHECK(reduced.defects().cp <= 1e-9);
        oracle::Rng rng(200 + s);
        for (int k = 0; k < 20; ++k) {
          const DensityMatrix x = oracle::random_density_matrix(Dims{2}, rng);
          const DensityMatrix lhs = apply(reduced, x, 0);
          const DensityMatrix rhs = partial_trace(apply(phi, x, 0), {1 - t});
          CHECK(brute::max_abs(lhs.matrix() - rhs.matrix()) < 1e-9);
        }
      }
    }
  }
  SECTION("tracing every output is a usage error") {
    const QuantumChannel phi = oracle::random_channel(2, Dims{2, 2}, 7u);
    CHECK_THROWS_AS(compose_then_trace(phi, {0, 1}), UsageError);
    CHECK_THROWS_AS(compose_then_trace(phi, {2}), UsageError);
  }
}

TEST_CASE("compose_on_site matches sequential application") {
  const QuantumChannel inner = oracle::random_channel(2, Dims{2, 3}, 31u);
  const QuantumChannel outer = oracle::random_channel(3, Dims{2}, 32u);
  const QuantumChannel both = compose_on_site(inner, outer, 1);
  CHECK(both.out_dims() == Dims{2, 2});
  const DensityMatrix x = oracle::random_density_matrix(Dims{2}, 33u);
  const DensityMatrix seq = apply(outer, apply(inner, x, 0), 1);
  CHECK(brute::max_abs(apply(both, x, 0).matrix() - seq.matrix()) < 1e-12);
  CHECK_THROWS_AS(compose_on_site(inner, outer, 0), UsageError);
}

TEST_CASE("Jamiolkowski states") {
  SECTION("identity gives the maximally entangled state") {
    const JamiolkowskiState j = jamiolkowski_state(identity_channel(2));
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
    CHECK(brute::max_abs(j.state.matrix() - psi * psi.adjoint()) < 1e-15);
  }
  SECTION("replacement by tau gives I/d (x) tau") {
    const DensityMatrix tau = oracle::random_density_matrix(Dims{2}, 41u);
    const JamiolkowskiState j = jamiolkowski_state(replacement_channel(3, tau));
    CHECK(brute::max_abs(j.state.matrix() - kron(identity_matrix(3) / 3.0, tau.matrix())) <
          1e-15);
  }
  SECTION("random channels give states and round-trip") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const QuantumChannel phi = oracle::random_channel(3, Dims{2}, 50 + s);
      const JamiolkowskiState j = jamiolkowski_state(phi);
      CHECK(std::abs(j.state.matrix().trace().real() - 1.0) < 1e-12);
      CHECK(hermitian_eigenvalues(j.state.matrix())(0) > -1e-12);
      const QuantumChannel back = channel_from_jamiolkowski(j, 3);
      CHECK(brute::max_abs(back.choi() - phi.choi()) < 1e-12);
    }
  }
}

TEST_CASE("channel distance bounds") {
  SECTION("equal channels are at distance zero") {
    const QuantumChannel phi = oracle::random_channel(2, Dims{3}, 61u);
    const ChannelDistance d = channel_distance_bound(phi, phi);
    CHECK(d.sharp == 0.0);
    CHECK(d.loose == 0.0);
  }
  SECTION("replacement channels are at distance ||tau1 - tau2||_1") {
    const DensityMatrix t1 = oracle::random_density_matrix(Dims{2}, 62u);
    const DensityMatrix t2 = oracle::random_density_matrix(Dims{2}, 63u);
    const double expected = trace_norm(t1.matrix() - t2.matrix());
    const ChannelDistance d =
        channel_distance_bound(replacement_channel(3, t1), replacement_channel(3, t2));
    CHECK_THAT(d.sharp, WithinAbs(expected, 1e-9));
    CHECK_THAT(d.loose, WithinAbs(3.0 * expected, 1e-9));
  }
  SECTION("sharp bound dominates the output distance on product inputs") {
    oracle::Rng rng(64);
    for (int k = 0; k < 20; ++k) {
      const QuantumChannel a = oracle::random_channel(2, Dims{2}, rng);
      const QuantumChannel b = oracle::random_channel(2, Dims{2}, rng);
      const ChannelDistance d = channel_distance_bound(a, b);
      CHECK(d.sharp <= d.loose + 1e-9);
      const DensityMatrix x = oracle::random_density_matrix(Dims{3, 2}, rng);
      const double out = trace_norm(apply(a, x, 1).matrix() - apply(b, x, 1).matrix(), 1e-9);
      CHECK(out <= d.sharp + 1e-9);
    }
  }
  SECTION("dimension mismatch is a usage error") {
    CHECK_THROWS_AS(channel_distance_bound(identity_channel(2), identity_channel(3)),
                    UsageError);
  }
}

TEST_CASE("round_density_matrix") {
  SECTION("dyadic diagonal state is a fixed point") {
    const DensityMatrix rho = DensityMatrix::from_matrix(dyadic_diag({0.5, 0.25, 0.125, 0.125}));
    const DensityMatrix r = round_density_matrix(rho, 40);
    CHECK(brute::max_abs(r.matrix() - rho.matrix()) < 1e-12);
  }
  SECTION("random d=4 state at 20 bits obeys 5 d^2 2^-bits") {
    const DensityMatrix rho = oracle::random_density_matrix(Dims{4}, 71u);
    const DensityMatrix r = round_density_matrix(rho, 20);
    CHECK(trace_norm(rho.matrix() - r.matrix(), 1e-9) <= 5.0 * 16.0 * std::ldexp(1.0, -20));
  }
  SECTION("maximally mixed qubit at 8 bits has unit trace") {
    const DensityMatrix r = round_density_matrix(DensityMatrix::maximally_mixed(Dims{2}), 8);
    CHECK_THAT(r.matrix().trace().real(), WithinAbs(1.0, 1e-15));
  }
  SECTION("truncated entries lie on the bit grid") {
    const double x = truncate_bits(0.123456789, 10);
    CHECK(std::ldexp(x, 10) == std::trunc(std::ldexp(x, 10)));
    CHECK(truncate_bits(-0.75, 1) == -0.5);
    CHECK(truncate_bits(0.75, 1) == 0.5);
  }
  SECTION("bits below 4 are a usage error") {
    CHECK_THROWS_AS(round_density_matrix(DensityMatrix::maximally_mixed(Dims{2}), 3),
                    UsageError);
  }
  SECTION("leading eigenvector below the bit grid is a precision error") {
    // Every amplitude of the uniform superposition on 400 levels is 0.05 < 2^-4.
    const Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(400);
    CHECK_THROWS_AS(round_density_matrix(DensityMatrix::pure(psi, Dims{400}), 4),
                    PrecisionError);
  }
  SECTION("bound holds on random states of d = 2, 3, 4") {
    for (std::size_t d : {2u, 3u, 4u}) {
      for (std::uint64_t s = 0; s < 100; ++s) {
        const DensityMatrix rho = oracle::random_density_matrix(Dims{d}, 1000 * d + s);
        const DensityMatrix r = round_density_matrix(rho, 16);
        CHECK(trace_norm(rho.matrix() - r.matrix(), 1e-9) <=
              5.0 * static_cast<double>(d * d) * std::ldexp(1.0, -16));
      }
    }
  }
}

TEST_CASE("round_channel") {
  SECTION("identity at 30 bits stays within the chained bound") {
    const RoundedChannel r = round_channel(identity_channel(2), 30);
    CHECK(r.distance_bound <= 5.0 * 2.0 * 16.0 * std::ldexp(1.0, -30));
    CHECK(r.channel.defects().within(kCptpTol));
  }
  SECTION("replacement with dyadic tau is unchanged") {
    const DensityMatrix tau = DensityMatrix::from_matrix(dyadic_diag({0.75, 0.25}));
    const QuantumChannel phi = replacement_channel(2, tau);
    const RoundedChannel r = round_channel(phi, 40);
    CHECK(brute::max_abs(r.channel.choi() - phi.choi()) < 1e-10);
  }
  SECTION("random channels at 24 bits pass CPTP validation") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const QuantumChannel phi = oracle::random_channel(2, Dims{2, 2}, 80 + s);
      const RoundedChannel r = round_channel(phi, 24);
      CHECK(r.channel.defects().within(kCptpTol));
      CHECK(r.channel.defects().tp < 1e-12);
      const ChannelDistance d = channel_distance_bound(phi, r.channel);
      CHECK_THAT(r.distance_bound, WithinAbs(d.loose, 1e-12));
    }
  }
  SECTION("rank-deficient channels at coarse precision pass CPTP validation") {
    oracle::Rng rng(5);
    for (int bits : {6, 10, 16}) {
      const QuantumChannel app = append_channel(3, oracle::random_density_matrix(Dims{2}, rng));
      const RoundedChannel r = round_channel(app, bits);
      CHECK(r.channel.defects().within(kCptpTol));
      CHECK(r.channel.defects().tp < 1e-12);
    }
  }
  SECTION("bits below 4 are a usage error") {
    CHECK_THROWS_AS(round_channel(identity_channel(2), 2), UsageError);
  }
}

TEST_CASE("restore_cptp") {
  oracle::Rng rng(6);
  SECTION("CPTP input is unchanged") {
    const QuantumChannel phi = oracle::random_channel(2, Dims{3}, rng);
    const ComplexMatrix c = detail::restore_cptp(phi.choi(), phi.choi_dims(), kCptpTol);
    CHECK(brute::max_abs(c - phi.choi()) < 1e-12);
  }
  SECTION("perturbed kernel directions are restored") {
    const QuantumChannel phi = identity_channel(3);
    for (int t = 0; t < 10; ++t) {
      const ComplexMatrix noise = oracle::random_hermitian(9, rng) * 1e-4;
      const ComplexMatrix c = detail::restore_cptp(phi.choi() + noise, phi.choi_dims(), kCptpTol);
      const QuantumChannel out = QuantumChannel::unvalidated(c, 3, Dims{3});
      CHECK(out.defects().within(kCptpTol));
      CHECK(trace_norm(c - phi.choi(), 1e-8) < 1e-2);
    }
  }
}

TEST_CASE("channel properties on random inputs") {
  oracle::Rng rng(99);
  for (int k = 0; k < 25; ++k) {
    const QuantumChannel phi = oracle::random_channel(3, Dims{2}, rng);
    const DensityMatrix rho = oracle::random_density_matrix(Dims{3}, rng);
    const DensityMatrix sigma = oracle::random_density_matrix(Dims{3}, rng);
    CHECK(trace_norm(apply(phi, rho, 0).matrix() - apply(phi, sigma, 0).matrix(), 1e-9) <=
          trace_norm(rho.matrix() - sigma.matrix()) + 1e-9);
  }
  SECTION("mixtures of CPTP maps are CPTP") {
    const QuantumChannel m = mix_channels(oracle::random_channel(2, Dims{2}, rng),
                                          depolarizing_channel(2, 0.3), 0.4);
    CHECK(m.defects().within(1e-10));
  }
  SECTION("unitary environment gives a unitary channel") {
    const QuantumChannel u = oracle::random_channel(3, Dims{3}, rng, 1);
    const auto kraus = oracle::kraus_operators(u);
    REQUIRE(kraus.size() == 1);
    CHECK(brute::max_abs(kraus[0].adjoint() * kraus[0] - identity_matrix(3)) < 1e-10);
  }
}
