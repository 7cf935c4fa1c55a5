#pragma once

// BB84 over a lossy, depolarizing channel with an optional intercept-resend
// eavesdropper, plus the trusted-node key relay.
//
// Encoding: (x, y) = (bit, basis); basis 0 is rectilinear (H = 0, V = 1),
// basis 1 is diagonal (D = 0, A = 1).

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qcomm/quantum_state.hpp"
#include "qcomm/random.hpp"

namespace qcomm::qkd {

// One bit per element, values 0 or 1.
using BitString = std::vector<std::uint8_t>;

qstate::PureState encode_qubit(int bit, int basis);

// Born-rule outcome of measuring a single-qubit state in the given basis.
int measure_qubit(const qstate::PureState& state, int basis, Rng& rng);

struct ChannelSpec {
  double loss_probability = 0.0;
  double depolarizing_probability = 0.0;  // qubit replaced by I/2

  void validate() const;
};

enum class EveStrategy { None, InterceptResend };
std::string_view to_string(EveStrategy eve);
EveStrategy parse_eve(std::string_view name);

// Per-round record of one exchange. bob is meaningful only where received.
struct Transcript {
  BitString x;
  BitString y;
  BitString y_prime;
  BitString received;
  BitString bob;
};

struct SessionResult {
  std::uint64_t n_sent = 0;
  std::uint64_t n_received = 0;
  std::uint64_t n_sifted = 0;
  BitString sifted_alice;
  BitString sifted_bob;
  double qber = 0.0;
};

// Sends Alice's (x, y) through Eve and the channel and measures in y_prime.
// Deterministic per seed.
Transcript bb84_exchange(const BitString& x, const BitString& y, const BitString& y_prime,
                         const ChannelSpec& channel, EveStrategy eve, std::uint64_t seed);

SessionResult sift_session(const Transcript& t);

// Random x, y, y_prime, then bb84_exchange and sifting.
SessionResult bb84_run(std::uint64_t n, const ChannelSpec& channel, EveStrategy eve,
                       std::uint64_t seed);

// Indices with received[i] set and y[i] == y_prime[i].
std::vector<std::size_t> sift(const BitString& y, const BitString& y_prime,
                              const BitString& received_mask);

// Hamming distance over length; 0 for empty keys.
double qber(const BitString& a, const BitString& b);

// k_AB = k_A xor k_B.
BitString relay_encode(const BitString& k_a, const BitString& k_b);
BitString relay_decode(const BitString& k_ab, const BitString& k_b);

// Most significant bit first; a partial final nibble is zero-padded.
std::string to_hex(const BitString& bits);
BitString from_hex(std::string_view hex, std::size_t n_bits);

BitString random_bits(std::size_t n, Rng& rng);

nlohmann::json to_json(const SessionResult& r);

}  // namespace qcomm::qkd
