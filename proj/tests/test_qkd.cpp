#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qcomm/error.hpp"
#include "qcomm/qkd.hpp"

namespace {

using namespace qcomm::qkd;

BitString bits(std::string_view s) {
  BitString b;
  for (char c : s) b.push_back(static_cast<std::uint8_t>(c - '0'));
  return b;
}

double sd_fraction(double p, double n) { return std::sqrt(p * (1 - p) / n); }

TEST(Encoding, FourStates) {
  const double r = 1.0 / std::numbers::sqrt2;
  const auto h = encode_qubit(0, 0).amplitudes();
  EXPECT_NEAR(std::abs(h[0]), 1.0, 1e-15);
  const auto v = encode_qubit(1, 0).amplitudes();
  EXPECT_NEAR(std::abs(v[1]), 1.0, 1e-15);
  const auto d = encode_qubit(0, 1).amplitudes();
  EXPECT_NEAR(d[0].real(), r, 1e-15);
  EXPECT_NEAR(d[1].real(), r, 1e-15);
  const auto a = encode_qubit(1, 1).amplitudes();
  EXPECT_NEAR(a[0].real(), r, 1e-15);
  EXPECT_NEAR(a[1].real(), -r, 1e-15);
}

TEST(Encoding, PairwiseOverlaps) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const auto a = encode_qubit(i & 1, i >> 1).amplitudes();
      const auto b = encode_qubit(j & 1, j >> 1).amplitudes();
      EXPECT_NEAR(a.norm(), 1.0, 1e-15);
      const double o = std::norm(a.dot(b));
      const double want = i == j ? 1.0 : ((i >> 1) == (j >> 1) ? 0.0 : 0.5);
      EXPECT_NEAR(o, want, 1e-15);
    }
}

TEST(Measurement, EigenstatesDeterministic) {
  qcomm::Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    EXPECT_EQ(measure_qubit(encode_qubit(0, 0), 0, rng), 0);
    EXPECT_EQ(measure_qubit(encode_qubit(1, 0), 0, rng), 1);
    EXPECT_EQ(measure_qubit(encode_qubit(0, 1), 1, rng), 0);
    EXPECT_EQ(measure_qubit(encode_qubit(1, 1), 1, rng), 1);
  }
}

TEST(Measurement, ConjugateBasisIsUnbiased) {
  qcomm::Rng rng(2);
  const int n = 100000;
  int ones = 0;
  for (int k = 0; k < n; ++k) ones += measure_qubit(encode_qubit(0, 0), 1, rng);
  EXPECT_NEAR(ones / double(n), 0.5, 3 * sd_fraction(0.5, n));
}

TEST(Channel, Validation) {
  EXPECT_THROW((ChannelSpec{1.5, 0.0}.validate()), qcomm::ValidationError);
  EXPECT_THROW((ChannelSpec{0.0, -0.1}.validate()), qcomm::ValidationError);
  EXPECT_EQ(parse_eve("none"), EveStrategy::None);
  EXPECT_EQ(parse_eve("intercept"), EveStrategy::InterceptResend);
  EXPECT_EQ(parse_eve("intercept-resend"), EveStrategy::InterceptResend);
  EXPECT_THROW(parse_eve("photon-number-splitting"), qcomm::ValidationError);
}

TEST(Bb84, IdealChannelNoErrors) {
  const std::uint64_t n = 100000;
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const auto r = bb84_run(n, {}, EveStrategy::None, seed);
    EXPECT_EQ(r.qber, 0.0);
    EXPECT_EQ(r.sifted_alice, r.sifted_bob);
    EXPECT_EQ(r.n_received, n);
    EXPECT_EQ(r.n_sifted, r.sifted_alice.size());
    EXPECT_NEAR(r.n_sifted / double(n), 0.5, 0.01);
  }
}

TEST(Bb84, InterceptResendQuarterErrors) {
  const auto r = bb84_run(100000, {}, EveStrategy::InterceptResend, 5);
  EXPECT_NEAR(r.qber, 0.25, 0.01);
}

TEST(Bb84, InterceptResendEnumeration) {
  // 16 equally likely (x, y, Eve basis, Eve outcome branch) cases with Bob in basis y.
  double err = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int e = 0; e < 2; ++e) {
        if (e == y) continue;  // right basis: Eve resends x, no error
        err += 0.5;            // wrong basis: Eve's state gives Bob a coin flip
      }
  EXPECT_DOUBLE_EQ(err / 8.0, 0.25);
}

TEST(Bb84, DepolarizingGivesHalfP) {
  for (double p : {0.1, 0.3}) {
    const auto r = bb84_run(100000, {0.0, p}, EveStrategy::None, 8);
    const double want = p / 2;
    EXPECT_NEAR(r.qber, want, 3 * sd_fraction(want, r.n_sifted)) << p;
  }
}

TEST(Bb84, LossReducesReceivedButNotQber) {
  const double loss = 0.6;
  const auto r = bb84_run(100000, {loss, 0.2}, EveStrategy::None, 9);
  EXPECT_NEAR(r.n_received / 1e5, 1 - loss, 3 * sd_fraction(1 - loss, 1e5));
  EXPECT_NEAR(r.n_sifted / double(r.n_received), 0.5, 3 * sd_fraction(0.5, r.n_received));
  EXPECT_NEAR(r.qber, 0.1, 3 * sd_fraction(0.1, r.n_sifted));
}

TEST(Bb84, DeterministicPerSeed) {
  const auto a = bb84_run(5000, {0.1, 0.1}, EveStrategy::InterceptResend, 3);
  const auto b = bb84_run(5000, {0.1, 0.1}, EveStrategy::InterceptResend, 3);
  EXPECT_EQ(a.sifted_alice, b.sifted_alice);
  EXPECT_EQ(a.sifted_bob, b.sifted_bob);
}

TEST(Bb84, TableReplayMatchedPositions) {
  const auto x = bits("1110011011");
  const auto y = bits("1010100110");
  const auto yp = bits("1100111010");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = bb84_exchange(x, y, yp, {}, EveStrategy::None, seed);
    // One-based positions 1, 4, 5, 9 with Bob's listed states A, H, D, A.
    const std::pair<int, int> expect[] = {{1, 1}, {4, 0}, {5, 0}, {9, 1}};
    for (auto [pos, bit] : expect) {
      ASSERT_EQ(y[pos - 1], yp[pos - 1]);
      EXPECT_EQ(t.bob[pos - 1], bit) << pos;
    }
  }
}

TEST(Sift, Cases) {
  const auto ones = bits("1111");
  EXPECT_EQ(sift(bits("0101"), bits("0101"), ones), (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(sift(bits("0101"), bits("0101"), bits("1010")), (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(sift(bits("0101"), bits("1010"), ones).empty());
  EXPECT_THROW(sift(bits("01"), bits("010"), bits("111")), qcomm::ValidationError);
  qcomm::Rng rng(4);
  const std::size_t n = 100000;
  const auto s = sift(random_bits(n, rng), random_bits(n, rng), BitString(n, 1));
  EXPECT_NEAR(s.size() / double(n), 0.5, 3 * sd_fraction(0.5, n));
}

TEST(Qber, Cases) {
  EXPECT_EQ(qber({}, {}), 0.0);
  EXPECT_EQ(qber(bits("0110"), bits("0110")), 0.0);
  EXPECT_EQ(qber(bits("0110"), bits("1001")), 1.0);
  EXPECT_DOUBLE_EQ(qber(bits("000000000000"), bits("100100000100")), 0.25);
  EXPECT_THROW(qber(bits("0"), bits("01")), qcomm::ValidationError);
}

TEST(Relay, BasicCases) {
  const auto ka = bits("10110");
  EXPECT_EQ(relay_encode(ka, bits("00000")), ka);
  EXPECT_EQ(relay_encode(ka, ka), bits("00000"));
  EXPECT_EQ(relay_decode(ka, bits("00000")), ka);
  EXPECT_THROW(relay_encode(ka, bits("1")), qcomm::ValidationError);
}

TEST(Relay, ExhaustiveRoundTripUpTo10Bits) {
  for (std::size_t len = 1; len <= 10; ++len)
    for (std::uint32_t a = 0; a < (1u << len); ++a)
      for (std::uint32_t b = 0; b < (1u << len); ++b) {
        BitString ka(len), kb(len);
        for (std::size_t i = 0; i < len; ++i) {
          ka[i] = (a >> i) & 1;
          kb[i] = (b >> i) & 1;
        }
        ASSERT_EQ(relay_decode(relay_encode(ka, kb), kb), ka);
      }
}

TEST(Relay, RandomizedRoundTripLongerKeys) {
  qcomm::Rng rng(10);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t len = 11 + static_cast<std::size_t>(rng() % 500);
    const auto ka = random_bits(len, rng), kb = random_bits(len, rng);
    ASSERT_EQ(relay_decode(relay_encode(ka, kb), kb), ka);
  }
}

TEST(Relay, FourPartySharedSecret) {
  // Ground A and satellite share k_a; ground B and satellite share k_b.
  const auto a = bb84_run(4000, {}, EveStrategy::None, 21);
  const auto b = bb84_run(4000, {}, EveStrategy::None, 22);
  const std::size_t n = std::min(a.n_sifted, b.n_sifted);
  const BitString ka_ground(a.sifted_alice.begin(), a.sifted_alice.begin() + n);
  const BitString ka_sat(a.sifted_bob.begin(), a.sifted_bob.begin() + n);
  const BitString kb_ground(b.sifted_alice.begin(), b.sifted_alice.begin() + n);
  const BitString kb_sat(b.sifted_bob.begin(), b.sifted_bob.begin() + n);
  const auto k_ab = relay_encode(ka_sat, kb_sat);  // broadcast
  EXPECT_EQ(relay_decode(k_ab, kb_ground), ka_ground);
}

TEST(Hex, RoundTripAndPadding) {
  EXPECT_EQ(to_hex(bits("10100101")), "a5");
  EXPECT_EQ(to_hex(bits("101")), "a");
  EXPECT_EQ(from_hex("a5", 8), bits("10100101"));
  qcomm::Rng rng(3);
  for (std::size_t len : {1u, 7u, 64u, 257u}) {
    const auto b = random_bits(len, rng);
    EXPECT_EQ(from_hex(to_hex(b), len), b);
  }
}

TEST(SessionJson, Fields) {
  const auto r = bb84_run(1000, {}, EveStrategy::None, 1);
  const auto j = to_json(r);
  EXPECT_EQ(j.at("n_sent").get<std::uint64_t>(), 1000u);
  EXPECT_EQ(j.at("n_sifted").get<std::uint64_t>(), r.n_sifted);
  EXPECT_EQ(j.at("qber").get<double>(), 0.0);
}

}  // namespace
