#include <memory>
#include <sstream>

#include "cli_internal.hpp"
#include "qcomm/ciphers.hpp"
#include "qcomm/error.hpp"
#include "qcomm/qkd.hpp"
#include "qcomm/random.hpp"
#include "qcomm/stego.hpp"

namespace qcomm::cli {

namespace {

using nlohmann::json;

// Sifted-key error rate above which the demo reports the link as compromised.
constexpr double kCompromiseQber = 0.11;

void add_qkd(CLI::App& app, Context& ctx) {
  auto* q = app.add_subcommand("qkd", "BB84 sessions and trusted-node key relay");
  q->require_subcommand(1);
  {
    struct Opts { std::uint64_t n = 0, seed = 0; double loss = 0, depol = 0; std::string eve = "none", out; };
    auto o = std::make_shared<Opts>();
    auto* c = q->add_subcommand("bb84", "Run one BB84 session");
    c->add_option("--n", o->n, "Qubits sent")->required();
    c->add_option("--loss", o->loss, "Channel loss probability")->capture_default_str();
    c->add_option("--depol", o->depol, "Depolarizing probability")->capture_default_str();
    c->add_option("--eve", o->eve, "none or intercept")->capture_default_str();
    c->add_option("--seed", o->seed, "RNG seed")->required();
    c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
    c->callback([&ctx, o] {
      const auto r = qkd::bb84_run(o->n, {o->loss, o->depol}, qkd::parse_eve(o->eve), o->seed);
      json j = qkd::to_json(r);
      j["eve"] = qkd::to_string(qkd::parse_eve(o->eve));
      emit_json(ctx, o->out, j);
    });
  }
  {
    struct Opts { std::string key_a, key_b, out; std::size_t bits = 0; };
    auto o = std::make_shared<Opts>();
    auto* c = q->add_subcommand("relay", "k_AB = k_A xor k_B and its decoding with k_B");
    c->add_option("--key-a", o->key_a, "k_A, hex")->required();
    c->add_option("--key-b", o->key_b, "k_B, hex")->required();
    c->add_option("--bits", o->bits, "Key length in bits (default: 4 per hex digit)");
    c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
    c->callback([&ctx, o] {
      const std::size_t n = o->bits ? o->bits : 4 * o->key_a.size();
      const auto ka = qkd::from_hex(o->key_a, n);
      const auto kb = qkd::from_hex(o->key_b, n);
      const auto kab = qkd::relay_encode(ka, kb);
      const auto decoded = qkd::relay_decode(kab, kb);
      emit_json(ctx, o->out, {{"bits", n}, {"k_ab_hex", qkd::to_hex(kab)},
                              {"decoded_hex", qkd::to_hex(decoded)}, {"round_trip", decoded == ka}});
    });
  }
}

void add_cipher(CLI::App& app, Context& ctx) {
  struct Opts {
    std::string name, action, key, table, text, in, out;
    int rails = 3, shift = 3;
  };
  auto o = std::make_shared<Opts>();
  auto* c = app.add_subcommand("cipher", "Classical ciphers");
  c->add_option("name", o->name, "railfence, caesar, rot13, vigenere, playfair or homophonic")
      ->required()
      ->check(CLI::IsMember({"railfence", "caesar", "rot13", "vigenere", "playfair", "homophonic"}));
  c->add_option("action", o->action, "encrypt or decrypt")->required()->check(CLI::IsMember({"encrypt", "decrypt"}));
  c->add_option("--key", o->key, "Vigenere key");
  c->add_option("--rails", o->rails, "Rail fence rails")->capture_default_str();
  c->add_option("--shift", o->shift, "Caesar shift")->capture_default_str();
  c->add_option("--table", o->table, "Playfair table, 25 letters row-major (default: reference table)");
  c->add_option("--text", o->text, "Input text");
  c->add_option("--in", o->in, "Input file")->check(CLI::ExistingFile);
  c->add_option("--out", o->out, "Output file (stdout if omitted)");
  c->callback([&ctx, o] {
    const std::string m = text_input(o->text, o->in);
    const bool enc = o->action == "encrypt";
    std::string r;
    if (o->name == "railfence") {
      r = enc ? cipher::rail_fence_encrypt(m, o->rails) : cipher::rail_fence_decrypt(m, o->rails);
    } else if (o->name == "caesar") {
      r = cipher::caesar(m, enc ? o->shift : -o->shift);
    } else if (o->name == "rot13") {
      r = cipher::rot13(m);
    } else if (o->name == "vigenere") {
      r = enc ? cipher::vigenere_encrypt(m, o->key) : cipher::vigenere_decrypt(m, o->key);
    } else if (o->name == "playfair") {
      const auto table = o->table.empty() ? cipher::PlayfairTable::reference() : cipher::PlayfairTable(o->table);
      r = enc ? cipher::playfair_encrypt(m, table) : cipher::playfair_decrypt(m, table);
    } else {
      r = enc ? cipher::homophonic_encrypt(m) : cipher::homophonic_decrypt(m);
    }
    emit(ctx, "--out", o->out, r + "\n");
  });
}

void add_stego(CLI::App& app, Context& ctx) {
  auto* s = app.add_subcommand("stego", "Two-bit LSB steganography on PPM images");
  s->require_subcommand(1);
  {
    struct Opts { std::string image, payload, bits, text, out; bool ascii = false; };
    auto o = std::make_shared<Opts>();
    auto* c = s->add_subcommand("embed", "Hide a payload in an image");
    c->add_option("--image", o->image, "Cover image (PPM P3/P6)")->required()->check(CLI::ExistingFile);
    auto* p = c->add_option("--payload", o->payload, "Payload file; its bytes are embedded")->check(CLI::ExistingFile);
    auto* b = c->add_option("--bits", o->bits, "Payload as a 0/1 string");
    auto* t = c->add_option("--text", o->text, "Payload as ASCII text");
    p->excludes(b)->excludes(t);
    b->excludes(t);
    c->add_flag("--ascii-ppm", o->ascii, "Write P3 instead of P6");
    c->add_option("--out", o->out, "Stego image")->required();
    c->callback([&ctx, o] {
      cipher::BitSequence bits;
      if (!o->bits.empty()) bits = cipher::bits_from_string(o->bits);
      else if (!o->text.empty()) bits = cipher::ascii_to_bits(o->text);
      else {
        require(!o->payload.empty(), "give one of --payload, --bits or --text");
        for (unsigned char ch : read_text_file(o->payload))
          for (int k = 7; k >= 0; --k) bits.push_back(static_cast<std::uint8_t>((ch >> k) & 1u));
      }
      const auto img = stego::lsb_embed(stego::read_ppm_file(o->image), bits);
      std::ostringstream buf(std::ios::binary | std::ios::out);
      stego::write_ppm(buf, img, o->ascii ? stego::PpmFormat::Ascii : stego::PpmFormat::Binary);
      emit(ctx, "--out", o->out, buf.str());
      ctx.err << "embedded " << bits.size() << " bits\n";
    });
  }
  {
    struct Opts { std::string image, out; std::size_t n = 0; bool as_text = false; };
    auto o = std::make_shared<Opts>();
    auto* c = s->add_subcommand("extract", "Read payload bits from an image");
    c->add_option("--image", o->image, "Stego image")->required()->check(CLI::ExistingFile);
    c->add_option("--n-bits", o->n, "Number of payload bits")->required();
    c->add_flag("--as-text", o->as_text, "Decode the bits as ASCII");
    c->add_option("--out", o->out, "Output file (stdout if omitted)");
    c->callback([&ctx, o] {
      const auto bits = stego::lsb_extract(stego::read_ppm_file(o->image), o->n);
      emit(ctx, "--out", o->out, (o->as_text ? cipher::bits_to_ascii(bits) : cipher::bits_to_string(bits)) + "\n");
    });
  }
}

void add_crack(CLI::App& app, Context& ctx) {
  auto* cr = app.add_subcommand("crack", "Frequency-analysis attacks");
  cr->require_subcommand(1);
  struct Opts { std::string text, in, profile = "en", out; };
  auto o = std::make_shared<Opts>();
  auto* c = cr->add_subcommand("caesar", "Recover a Caesar shift by chi-square against a language profile");
  c->add_option("--text", o->text, "Ciphertext");
  c->add_option("--in", o->in, "Ciphertext file")->check(CLI::ExistingFile);
  c->add_option("--profile", o->profile, "Language profile")->capture_default_str();
  c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
  c->callback([&ctx, o] {
    const std::string m = text_input(o->text, o->in);
    const auto r = cipher::crack_caesar(m, cipher::language_profile(o->profile));
    emit_json(ctx, o->out, {{"shift", r.shift}, {"confident", r.confident},
                            {"chi_square", r.chi_square}, {"plaintext", cipher::caesar(m, -r.shift)}});
  });
}

// Bytes of the bit string as text; non-ASCII bytes shown as '?'.
std::string render_bits(const cipher::BitSequence& bits) {
  std::string out;
  for (std::size_t i = 0; i + 8 <= bits.size(); i += 8) {
    unsigned v = 0;
    for (std::size_t k = 0; k < 8; ++k) v = (v << 1) | bits[i + k];
    out.push_back(v >= 32 && v < 127 ? static_cast<char>(v) : '?');
  }
  return out;
}

void add_demo(CLI::App& app, Context& ctx) {
  struct Opts {
    std::uint64_t seed = 0, n = 4096;
    double loss = 0, depol = 0;
    std::string message = "PHYSICS IS FUN", eve = "none", out;
  };
  auto o = std::make_shared<Opts>();
  auto* c = app.add_subcommand("demo-e2e", "BB84 keys, satellite relay and one-time-pad message exchange");
  c->add_option("--seed", o->seed, "RNG seed")->required();
  c->add_option("--n", o->n, "Qubits per BB84 link")->capture_default_str();
  c->add_option("--message", o->message, "ASCII message")->capture_default_str();
  c->add_option("--eve", o->eve, "Eavesdropper on both links: none or intercept")->capture_default_str();
  c->add_option("--loss", o->loss, "Channel loss probability")->capture_default_str();
  c->add_option("--depol", o->depol, "Depolarizing probability")->capture_default_str();
  c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
  c->callback([&ctx, o] {
    const qkd::ChannelSpec channel{o->loss, o->depol};
    const auto eve = qkd::parse_eve(o->eve);
    // Ground station A (Alice role) and B each run BB84 with the satellite.
    const auto link_a = qkd::bb84_run(o->n, channel, eve, derive_seed(o->seed, 1));
    const auto link_b = qkd::bb84_run(o->n, channel, eve, derive_seed(o->seed, 2));
    const auto message = cipher::ascii_to_bits(o->message);
    const std::size_t need = message.size();
    if (link_a.n_sifted < need || link_b.n_sifted < need)
      throw ValidationError("insufficient sifted key: message needs " + std::to_string(need) +
                            " bits, links sifted " + std::to_string(link_a.n_sifted) + " and " +
                            std::to_string(link_b.n_sifted) + "; increase --n");
    const auto head = [need](const qkd::BitString& k) { return qkd::BitString(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(need)); };
    const auto ground_a = head(link_a.sifted_alice), sat_a = head(link_a.sifted_bob);
    const auto ground_b = head(link_b.sifted_alice), sat_b = head(link_b.sifted_bob);

    const auto k_ab = qkd::relay_encode(sat_a, sat_b);           // broadcast by the satellite
    const auto k_a_at_b = qkd::relay_decode(k_ab, ground_b);     // ground B recovers k_A
    const auto ciphertext = cipher::otp_xor(ground_a, message);  // sent A -> B
    const auto recovered = cipher::otp_xor(k_a_at_b, ciphertext);

    const bool compromised = link_a.qber > kCompromiseQber || link_b.qber > kCompromiseQber;
    const bool ok = recovered == message;
    json j = {{"message", o->message},
              {"link_a", qkd::to_json(link_a)},
              {"link_b", qkd::to_json(link_b)},
              {"key_bits_used", need},
              {"k_ab_hex", qkd::to_hex(k_ab)},
              {"ciphertext_hex", qkd::to_hex(ciphertext)},
              {"recovered_text", render_bits(recovered)},
              {"recovered", ok},
              {"compromise_threshold_qber", kCompromiseQber},
              {"compromised", compromised}};
    j["link_a"].erase("sifted_alice_hex");
    j["link_a"].erase("sifted_bob_hex");
    j["link_b"].erase("sifted_alice_hex");
    j["link_b"].erase("sifted_bob_hex");
    emit_json(ctx, o->out, j);
    if (!ok && !compromised) {
      ctx.err << "error: plaintext not recovered although QBER is below the compromise threshold\n";
      ctx.exit_code = 1;
    }
  });
}

}  // namespace

void add_crypto_commands(CLI::App& app, Context& ctx) {
  add_qkd(app, ctx);
  add_cipher(app, ctx);
  add_stego(app, ctx);
  add_crack(app, ctx);
  add_demo(app, ctx);
}

}  // namespace qcomm::cli
