#include "qcomm/qkd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qcomm/error.hpp"

namespace qcomm::qkd {

namespace {

constexpr std::uint64_t kBasisStream = 0x62623834;    // Alice's bits and both basis strings
constexpr std::uint64_t kExchangeStream = 0x65786368;  // Eve, channel and Bob's outcomes

void require_bit(int b, const char* what) {
  require(b == 0 || b == 1, std::string(what) + " must be 0 or 1");
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  require(a == b, std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                      std::to_string(b) + ")");
}

int flip(Rng& rng) { return static_cast<int>(rng() >> 63); }

}  // namespace

qstate::PureState encode_qubit(int bit, int basis) {
  require_bit(bit, "bit");
  require_bit(basis, "basis");
  const double s = 1.0 / std::numbers::sqrt2;
  qstate::Vector v(2);
  if (basis == 0)
    v << (bit == 0 ? 1.0 : 0.0), (bit == 0 ? 0.0 : 1.0);
  else
    v << s, (bit == 0 ? s : -s);
  return qstate::PureState(std::move(v));
}

int measure_qubit(const qstate::PureState& state, int basis, Rng& rng) {
  require(state.qubits() == 1, "measure_qubit needs a single-qubit state");
  require_bit(basis, "basis");
  const auto& a = state.amplitudes();
  const qstate::Complex amp0 = basis == 0 ? a[0] : (a[0] + a[1]) / std::numbers::sqrt2;
  const double p0 = std::clamp(std::norm(amp0), 0.0, 1.0);
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p0 ? 0 : 1;
}

void ChannelSpec::validate() const {
  require(loss_probability >= 0.0 && loss_probability <= 1.0, "loss probability must lie in [0, 1]");
  require(depolarizing_probability >= 0.0 && depolarizing_probability <= 1.0,
          "depolarizing probability must lie in [0, 1]");
}

std::string_view to_string(EveStrategy eve) {
  return eve == EveStrategy::None ? "none" : "intercept";
}

EveStrategy parse_eve(std::string_view name) {
  if (name == "none") return EveStrategy::None;
  if (name == "intercept" || name == "intercept-resend") return EveStrategy::InterceptResend;
  throw ValidationError("unknown eavesdropper strategy '" + std::string(name) +
                        "' (expected none or intercept)");
}

Transcript bb84_exchange(const BitString& x, const BitString& y, const BitString& y_prime,
                         const ChannelSpec& channel, EveStrategy eve, std::uint64_t seed) {
  channel.validate();
  require_same_length(x.size(), y.size(), "bb84_exchange x/y");
  require_same_length(x.size(), y_prime.size(), "bb84_exchange x/y'");
  Transcript t{x, y, y_prime, BitString(x.size(), 0), BitString(x.size(), 0)};
  Rng rng = make_rng(seed, kExchangeStream);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    qstate::PureState q = encode_qubit(x[i], y[i]);
    if (eve == EveStrategy::InterceptResend) {
      const int eve_basis = flip(rng);
      q = encode_qubit(measure_qubit(q, eve_basis, rng), eve_basis);
    }
    // Both draws happen every round so loss does not shift later outcomes.
    const bool lost = u(rng) < channel.loss_probability;
    const bool mixed = u(rng) < channel.depolarizing_probability;
    const int outcome = mixed ? flip(rng) : measure_qubit(q, y_prime[i], rng);
    if (lost) continue;
    t.received[i] = 1;
    t.bob[i] = static_cast<std::uint8_t>(outcome);
  }
  return t;
}

SessionResult sift_session(const Transcript& t) {
  SessionResult r;
  r.n_sent = t.x.size();
  r.n_received = static_cast<std::uint64_t>(std::count(t.received.begin(), t.received.end(), 1));
  for (std::size_t i : sift(t.y, t.y_prime, t.received)) {
    r.sifted_alice.push_back(t.x[i]);
    r.sifted_bob.push_back(t.bob[i]);
  }
  r.n_sifted = r.sifted_alice.size();
  r.qber = qber(r.sifted_alice, r.sifted_bob);
  return r;
}

SessionResult bb84_run(std::uint64_t n, const ChannelSpec& channel, EveStrategy eve,
                       std::uint64_t seed) {
  require(n > 0, "number of qubits must be positive");
  Rng rng = make_rng(seed, kBasisStream);
  const BitString x = random_bits(n, rng);
  const BitString y = random_bits(n, rng);
  const BitString y_prime = random_bits(n, rng);
  return sift_session(bb84_exchange(x, y, y_prime, channel, eve, seed));
}

std::vector<std::size_t> sift(const BitString& y, const BitString& y_prime,
                              const BitString& received_mask) {
  require_same_length(y.size(), y_prime.size(), "sift y/y'");
  require_same_length(y.size(), received_mask.size(), "sift y/mask");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (received_mask[i] && y[i] == y_prime[i]) out.push_back(i);
  return out;
}

double qber(const BitString& a, const BitString& b) {
  require_same_length(a.size(), b.size(), "qber");
  if (a.empty()) return 0.0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < a.size(); ++i) errors += (a[i] != b[i]);
  return static_cast<double>(errors) / static_cast<double>(a.size());
}

BitString relay_encode(const BitString& k_a, const BitString& k_b) {
  require_same_length(k_a.size(), k_b.size(), "relay_encode");
  BitString out(k_a.size());
  for (std::size_t i = 0; i < k_a.size(); ++i) out[i] = (k_a[i] ^ k_b[i]) & 1u;
  return out;
}

BitString relay_decode(const BitString& k_ab, const BitString& k_b) {
  require_same_length(k_ab.size(), k_b.size(), "relay_decode");
  return relay_encode(k_ab, k_b);
}

std::string to_hex(const BitString& bits) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    unsigned nibble = 0;
    for (std::size_t k = 0; k < 4; ++k)
      nibble = (nibble << 1) | (i + k < bits.size() ? (bits[i + k] & 1u) : 0u);
    out.push_back(digits[nibble]);
  }
  return out;
}

BitString from_hex(std::string_view hex, std::size_t n_bits) {
  require(hex.size() * 4 >= n_bits && hex.size() * 4 < n_bits + 4,
          "hex string length does not match " + std::to_string(n_bits) + " bits");
  BitString out;
  for (char c : hex) {
    int v = -1;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    require(v >= 0, std::string("invalid hex digit '") + c + "'");
    for (int k = 3; k >= 0; --k) out.push_back(static_cast<std::uint8_t>((v >> k) & 1));
  }
  for (std::size_t i = n_bits; i < out.size(); ++i)
    require(out[i] == 0, "hex padding bits must be zero");
  out.resize(n_bits);
  return out;
}

BitString random_bits(std::size_t n, Rng& rng) {
  BitString out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(flip(rng));
  return out;
}

nlohmann::json to_json(const SessionResult& r) {
  return {{"n_sent", r.n_sent},
          {"n_received", r.n_received},
          {"n_sifted", r.n_sifted},
          {"qber", r.qber},
          {"sift_fraction", r.n_sent ? static_cast<double>(r.n_sifted) / r.n_sent : 0.0},
          {"sifted_alice_hex", to_hex(r.sifted_alice)},
          {"sifted_bob_hex", to_hex(r.sifted_bob)}};
}

}  // namespace qcomm::qkd
