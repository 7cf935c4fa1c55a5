// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qcomm/ciphers.hpp"
#include "qcomm/gaussian_fit.hpp"
#include "qcomm/photon_stats.hpp"
#include "qcomm/qkd.hpp"
#include "qcomm/quantum_state.hpp"
#include "qcomm/spdc.hpp"
#include "qcomm/stego.hpp"
#include "qcomm/tomography.hpp"

namespace {

using namespace qcomm;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double sd_fraction(double p, double n) { return std::sqrt(p * (1 - p) / n); }

Outcome energy_conservation() {
  Outcome o;
  const double li = spdc::idler_wavelength({396.1, 0}, {532.0, 0}).value;
  o.check(li >= 1549.5 && li <= 1551.5, "lambda_i = " + fmt("%.4f", li) + " nm");
  return o;
}

Outcome snr_constant() {
  Outcome o;
  photon::GaussianFit f;
  f.a = 1.0;
  f.b = 1.0;
  const double s = photon::snr(f);
  o.check(std::abs(s - 0.5224) <= 0.0005, "snr(a/b=1) = " + fmt("%.6f", s));
  return o;
}

Outcome snr_pipeline() {
  Outcome o;
  const double b = 10.0, a = 1966.5 * b, sigma = 86.0;
  auto h = photon::make_histogram(16, 2000);
  std::mt19937_64 rng(1);
  for (std::size_t k = 0; k < h.bins(); ++k)
    h.counts[k] = std::poisson_distribution<std::uint64_t>(photon::gaussian_peak(h.bin_center(k), a, b, 0.0, sigma))(rng);
  const auto fit = photon::fit_gaussian(h, photon::initial_guess(h));
  const double s = photon::snr(fit);
  o.check(fit.converged, "fit converged");
  o.check(std::abs(s - 1027.0) <= 0.10 * 1027.0,
          "SNR = " + fmt("%.1f", s) + " (a = " + fmt("%.0f", fit.a) + ", b = " + fmt("%.2f", fit.b) + ")");
  return o;
}

Outcome klyshko() {
  Outcome o;
  const auto c = photon::simulate_pair_thinning(100000, 0.64, 0.5, 2024);
  const auto e = photon::klyshko_calibrate(c.n_s, c.n_i, c.n_c);
  const double sd = sd_fraction(0.64, static_cast<double>(c.n_i));
  o.check(std::abs(e.signal - 0.64) <= 2 * sd,
          "eta_s = " + fmt("%.5f", e.signal) + ", 2 sigma = " + fmt("%.5f", 2 * sd));
  return o;
}

Outcome g2_scaling() {
  Outcome o;
  auto train = [](double mu, std::uint64_t n) {
    photon::PulseTrainSpec p;
    p.mean_pairs_per_pulse = mu;
    p.n_pulses = n;
    return p;
  };
  const photon::HeraldSetup setup{0.9, 0.9, photon::LightSource::Spdc};
  const double g_lo = photon::heralded_g2(photon::simulate_heralded_counts(train(0.05, 1000000), setup, 1));
  const double g_hi = photon::heralded_g2(photon::simulate_heralded_counts(train(0.10, 1000000), setup, 2));
  const double ratio = g_hi / g_lo;
  o.check(std::abs(ratio - 2.0) <= 0.4, "g2(0.10)/g2(0.05) = " + fmt("%.3f", ratio));
  const double g_weak = photon::heralded_g2(photon::simulate_heralded_counts(train(1e-3, 10000000), setup, 3));
  o.check(g_weak <= 5e-3, "g2(mu=1e-3) = " + fmt("%.2e", g_weak));
  return o;
}

Outcome bb84() {
  Outcome o;
  const std::uint64_t n = 100000;
  const auto ideal = qkd::bb84_run(n, {}, qkd::EveStrategy::None, 7);
  o.check(ideal.qber == 0.0, "ideal QBER = " + fmt("%g", ideal.qber));
  const double frac = static_cast<double>(ideal.n_sifted) / static_cast<double>(n);
  o.check(std::abs(frac - 0.5) <= 0.01, "sift fraction = " + fmt("%.4f", frac));
  const auto eve = qkd::bb84_run(n, {}, qkd::EveStrategy::InterceptResend, 7);
  o.check(std::abs(eve.qber - 0.25) <= 0.01, "intercept-resend QBER = " + fmt("%.4f", eve.qber));

  auto bits = [](std::string_view s) {
    qkd::BitString b;
    for (char c : s) b.push_back(static_cast<std::uint8_t>(c - '0'));
    return b;
  };
  const auto t = qkd::bb84_exchange(bits("1110011011"), bits("1010100110"), bits("1100111010"), {},
                                    qkd::EveStrategy::None, 7);
  const bool replay = t.bob[0] == 1 && t.bob[3] == 0 && t.bob[4] == 0 && t.bob[8] == 1;
  o.check(replay, "table positions 1,4,5,9 replayed");
  return o;
}

Outcome relay() {
  Outcome o;
  Rng rng(11);
  int bad = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto ka = qkd::random_bits(256, rng), kb = qkd::random_bits(256, rng);
    bad += qkd::relay_decode(qkd::relay_encode(ka, kb), kb) != ka;
  }
  o.check(bad == 0, std::to_string(bad) + " of 10000 round trips failed");
  return o;
}

Outcome swapping() {
  Outcome o;
  const int runs = 10000;
  std::array<int, 4> hist{};
  double worst_after = 0.0, worst_before = 0.0;
  for (int s = 0; s < runs; ++s) {
    const auto r = qstate::entanglement_swap_demo(static_cast<std::uint64_t>(s));
    worst_after = std::max(worst_after, std::abs(r.concurrence_after - 1.0));
    worst_before = std::max(worst_before, std::abs(r.concurrence_before));
    ++hist[static_cast<int>(r.outcome)];
  }
  const auto phi = qstate::bell_state(qstate::BellLabel::PhiPlus);
  const auto input = phi.tensor(phi);
  for (auto b : {qstate::BellLabel::PhiPlus, qstate::BellLabel::PhiMinus, qstate::BellLabel::PsiPlus,
                 qstate::BellLabel::PsiMinus})
    worst_after = std::max(worst_after, std::abs(qstate::concurrence(qstate::bell_project(input, {1, 2}, b).remainder) - 1.0));
  o.check(worst_after <= 1e-9, "max |C_after - 1| = " + fmt("%.1e", worst_after));
  o.check(worst_before <= 1e-9, "max C_before = " + fmt("%.1e", worst_before));
  const double sd = std::sqrt(runs * 0.25 * 0.75);
  bool uniform = true;
  std::string counts;
  for (int c : hist) {
    uniform = uniform && std::abs(c - runs / 4.0) <= 3 * sd;
    counts += (counts.empty() ? "" : "/") + std::to_string(c);
  }
  o.check(uniform, "outcomes " + counts);
  return o;
}

Outcome tomography() {
  Outcome o;
  const auto phi = qstate::bell_state(qstate::BellLabel::PhiPlus);
  const auto rho = qstate::DensityMatrix::from_pure(phi);
  const double f0 = qstate::fidelity(qstate::mle_reconstruct(qstate::noiseless_tomography(rho, 10000)).rho, phi);
  o.check(f0 >= 0.999, "noiseless F = " + fmt("%.5f", f0));

  double f_min = 1.0, f_sum = 0.0;
  int below = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const double f = qstate::fidelity(qstate::mle_reconstruct(qstate::simulate_tomography(rho, 10000, seed)).rho, phi);
    f_min = std::min(f_min, f);
    f_sum += f;
    below += f < 0.99;
  }
  o.check(below == 0, "Poisson N=1e4, 50 seeds: min F = " + fmt("%.4f", f_min) + ", mean F = " +
                          fmt("%.4f", f_sum / 50) + ", " + std::to_string(below) + " below 0.99");

  double worst = 0.0;
  for (double p : {0.5, 0.9, 0.9855}) {
    const auto w = qstate::werner(p);
    worst = std::max({worst, std::abs(qstate::fidelity(w, phi) - (3 * p + 1) / 4),
                      std::abs(qstate::concurrence(w) - (3 * p - 1) / 2),
                      std::abs(qstate::bell_parameter(w) - 2 * std::numbers::sqrt2 * p)});
  }
  o.check(worst <= 1e-10, "Werner triple max deviation = " + fmt("%.1e", worst));
  // p carries four decimals, so B is fixed to within 2 sqrt2 * 5e-5.
  const double b = qstate::bell_parameter(qstate::werner(0.9855));
  o.check(std::abs(b - 2.78735) <= 2 * std::numbers::sqrt2 * 5e-5, "B(0.9855) = " + fmt("%.5f", b));
  return o;
}

Outcome golden_vectors() {
  Outcome o;
  using namespace cipher;
  const auto rf = rail_fence_encrypt("PHYSICS IS FUN!", 3);
  o.check(rf == "PIIUHSC SFNYS !", "rail fence '" + rf + "'");
  const auto cz = caesar("cat", -3);
  o.check(cz == "zxq", "caesar '" + cz + "'");
  const auto vg = vigenere_encrypt("PHYSICS IS FUN", "CAT");
  o.check(vg == "RHRUIVU IL HUG", "vigenere '" + vg + "'");
  const auto pf = digraphs(playfair_encrypt("PHYSICSISFUN", PlayfairTable::reference()));
  o.check(pf == "TB SY UR QY HQ NU", "playfair '" + pf + "'");
  const auto hm = homophonic_encrypt("cat");
  o.check(hm == "bdzbsu", "homophonic '" + hm + "'");
  const stego::RgbImage img{4, 1, {{255, 0, 0}, {0, 0, 255}, {0, 0, 0}, {0, 255, 0}}};
  const auto out = stego::lsb_embed(img, bits_from_string("011000100110000101110100"));
  const std::vector<stego::Pixel> want{{253, 2, 0}, {2, 1, 254}, {0, 1, 1}, {3, 253, 0}};
  o.check(out.pixels == want, "LSB pixel vector");
  return o;
}

std::string random_text(std::mt19937_64& rng, std::size_t n, std::string_view alphabet) {
  std::string s;
  for (std::size_t k = 0; k < n; ++k) s.push_back(alphabet[rng() % alphabet.size()]);
  return s;
}

Outcome property_suites() {
  Outcome o;
  using namespace cipher;
  constexpr std::string_view upper = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  constexpr std::string_view mixed = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz .,!?0123456789";
  std::mt19937_64 rng(2);
  int rf = 0, cz = 0, vg = 0, pf = 0, hm = 0, lsb = 0, otp = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto m = random_text(rng, 1 + rng() % 60, mixed);
    const int rails = 2 + static_cast<int>(rng() % 7);
    rf += rail_fence_decrypt(rail_fence_encrypt(m, rails), rails) != m;
    const int shift = static_cast<int>(rng() % 51) - 25;
    cz += caesar(caesar(m, shift), -shift) != m;
    const auto key = random_text(rng, 1 + rng() % 10, upper);
    vg += vigenere_decrypt(vigenere_encrypt(m, key), key) != m;

    std::string letters(upper);
    std::size_t drop;
    do drop = rng() % 26;
    while (letters[drop] == 'X' || letters[drop] == 'Q');
    letters.erase(drop, 1);
    std::shuffle(letters.begin(), letters.end(), rng);
    const PlayfairTable table(letters);
    const auto pm = random_text(rng, 2 * (1 + rng() % 20), letters);
    pf += playfair_decrypt(playfair_encrypt(pm, table), table) != playfair_prepare(pm, table);

    const auto lower = random_text(rng, 1 + rng() % 30, "abcdefghijklmnopqrstuvwxyz");
    hm += homophonic_decrypt(homophonic_encrypt(lower)) != lower;

    stego::RgbImage img{3, 2, {}};
    for (int p = 0; p < 6; ++p)
      img.pixels.push_back({static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng())});
    BitSequence payload(rng() % 37);
    for (auto& b : payload) b = rng() & 1;
    lsb += stego::lsb_extract(stego::lsb_embed(img, payload), payload.size()) != payload;

    BitSequence kb(payload.size());
    for (auto& b : kb) b = rng() & 1;
    otp += otp_xor(kb, otp_xor(kb, payload)) != payload;
  }
  o.check(rf + cz + vg + pf + hm + lsb + otp == 0,
          "round trips (rail/caesar/vigenere/playfair/homophonic/lsb/otp) failures " + std::to_string(rf) + "/" +
              std::to_string(cz) + "/" + std::to_string(vg) + "/" + std::to_string(pf) + "/" + std::to_string(hm) +
              "/" + std::to_string(lsb) + "/" + std::to_string(otp));

  double worst = 0.0;
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::normal_distribution<double> nrm;
  for (int k = 0; k < 100; ++k) {
    spdc::SusceptibilityTensor chi;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int g = b; g < 3; ++g) chi(a, b, g) = chi(a, g, b) = u(rng);
    std::array<Eigen::Vector3d, 3> v;
    for (auto& x : v) x = Eigen::Vector3d(nrm(rng), nrm(rng), nrm(rng)).normalized();
    double brute = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int g = 0; g < 3; ++g) brute += chi(a, b, g) * v[0][a] * v[1][b] * v[2][g];
    worst = std::max(worst, std::abs(spdc::effective_nonlinearity(spdc::reduce_tensor(chi), v[0], v[1], v[2]) - brute));
  }
  o.check(worst <= 1e-12, "d_eff vs 27-term contraction max |diff| = " + fmt("%.1e", worst));

  int hist_bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    photon::TimeTagStream a{0, {}}, b{1, {}};
    std::int64_t t = 0;
    for (std::size_t k = 0, n = 1 + rng() % 1000; k < n; ++k) a.timestamps_ps.push_back(t += 1 + static_cast<std::int64_t>(rng() % 3000));
    t = static_cast<std::int64_t>(rng() % 5000);
    for (std::size_t k = 0, n = 1 + rng() % 1000; k < n; ++k) b.timestamps_ps.push_back(t += 1 + static_cast<std::int64_t>(rng() % 3000));
    const std::int64_t bin = 1 + static_cast<std::int64_t>(rng() % 40), window = static_cast<std::int64_t>(rng() % 20000);
    const auto h = photon::build_histogram(a, b, bin, window);
    std::vector<std::uint64_t> brute(h.bins(), 0);
    for (auto ta : a.timestamps_ps)
      for (auto tb : b.timestamps_ps)
        if (std::abs(tb - ta) <= window) ++brute[static_cast<std::size_t>((tb - ta + window) / bin)];
    hist_bad += brute != h.counts;
  }
  o.check(hist_bad == 0, "histogram vs O(n^2) mismatches " + std::to_string(hist_bad) + "/20");

  qstate::MleOptions opt;
  opt.keep_trace = true;
  int drops = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = qstate::mle_reconstruct(qstate::simulate_tomography(qstate::werner(0.9), 10000, seed), opt);
    for (std::size_t k = 1; k < r.likelihood_trace.size(); ++k) drops += r.likelihood_trace[k] < r.likelihood_trace[k - 1];
  }
  o.check(drops == 0, "MLE likelihood decreases " + std::to_string(drops));
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "energy conservation", 1, energy_conservation},
      {2, "SNR constant", 1, snr_constant},
      {3, "SNR pipeline", 5, snr_pipeline},
      {4, "Klyshko calibration", 5, klyshko},
      {5, "heralded g2 scaling", 60, g2_scaling},
      {6, "BB84", 10, bb84},
      {7, "key relay", 1, relay},
      {8, "entanglement swapping", 10, swapping},
      {9, "tomography", 60, tomography},
      {10, "cipher golden vectors", 1, golden_vectors},
      {11, "property suites", 120, property_suites},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(dt <= c.budget_s, "time " + fmt("%.2f", dt) + " s of " + fmt("%.0f", c.budget_s) + " s");
    failed += !o.pass;
    std::printf("criterion %2d %-24s %s  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
