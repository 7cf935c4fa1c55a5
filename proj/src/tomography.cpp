#include "qcomm/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qcomm/error.hpp"
#include "qcomm/random.hpp"

namespace qcomm::qstate {

namespace {

constexpr std::uint64_t kTomographyStream = 0x746f6d6f;  // "tomo"

Matrix2 rotation(double angle_rad) {
  const double c = std::cos(angle_rad), s = std::sin(angle_rad);
  Matrix2 r;
  r << c, -s, s, c;
  return r;
}

Matrix2 retarder(double angle_deg, Complex slow_phase) {
  const double t = angle_deg * std::numbers::pi / 180.0;
  Matrix2 d = Matrix2::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = slow_phase;
  return rotation(t) * d * rotation(-t);
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// f(H) for Hermitian H with f applied to the eigenvalues.
template <typename F>
Matrix spectral(const Matrix& h, F f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
  Eigen::VectorXd ev = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

bool same_setting(const WaveplateSetting& a, const WaveplateSetting& b) {
  constexpr double tol = 1e-9;
  return std::abs(a.hwp1_deg - b.hwp1_deg) < tol && std::abs(a.qwp1_deg - b.qwp1_deg) < tol &&
         std::abs(a.hwp2_deg - b.hwp2_deg) < tol && std::abs(a.qwp2_deg - b.qwp2_deg) < tol;
}

void validate_setting_set(std::span<const TomographyRecord> records) {
  require(records.size() == 16, "tomography needs exactly 16 settings, got " +
                                    std::to_string(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t j = i + 1; j < records.size(); ++j)
      require(!same_setting(records[i].setting, records[j].setting),
              "duplicated waveplate setting at records " + std::to_string(i) + " and " +
                  std::to_string(j));
  Matrix map(16, 16);
  for (std::size_t j = 0; j < records.size(); ++j) {
    const Matrix p = setting_projector(records[j].setting);
    map.row(static_cast<Eigen::Index>(j)) = p.reshaped().transpose();
  }
  Eigen::FullPivLU<Matrix> lu(map);
  lu.setThreshold(1e-9);
  require(lu.rank() == 16, "waveplate settings are not informationally complete (rank " +
                               std::to_string(lu.rank()) + ")");
}

}  // namespace

Matrix2 half_wave_plate(double angle_deg) { return retarder(angle_deg, Complex(-1.0, 0.0)); }

Matrix2 quarter_wave_plate(double angle_deg) { return retarder(angle_deg, Complex(0.0, 1.0)); }

Matrix2 projector_from_waveplates(double hwp_deg, double qwp_deg) {
  const Matrix2 u = half_wave_plate(hwp_deg) * quarter_wave_plate(qwp_deg);
  const Eigen::Vector2cd psi = u.adjoint() * Eigen::Vector2cd(1.0, 0.0);
  const Matrix2 p = psi * psi.adjoint();
  return 0.5 * (p + p.adjoint());
}

std::array<WaveplateSetting, 16> canonical_settings() {
  constexpr std::array<std::pair<double, double>, 4> arm = {
      {{0.0, 0.0}, {0.0, 45.0}, {22.5, 0.0}, {22.5, 45.0}}};
  std::array<WaveplateSetting, 16> out{};
  std::size_t k = 0;
  for (const auto& [h1, q1] : arm)
    for (const auto& [h2, q2] : arm) out[k++] = {h1, q1, h2, q2};
  return out;
}

Matrix setting_projector(const WaveplateSetting& s) {
  const Matrix2 p1 = projector_from_waveplates(s.hwp1_deg, s.qwp1_deg);
  const Matrix2 p2 = projector_from_waveplates(s.hwp2_deg, s.qwp2_deg);
  Matrix out(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = p1(i, j) * p2;
  return out;
}

double expected_coincidences(const DensityMatrix& rho, const WaveplateSetting& s, double n_ref) {
  require(rho.dim() == 4, "expected_coincidences needs a two-qubit state");
  require(n_ref >= 0.0, "reference count must be non-negative");
  const double p = (setting_projector(s) * rho.matrix()).trace().real();
  return n_ref * std::max(p, 0.0);
}

std::vector<TomographyRecord> simulate_tomography(const DensityMatrix& rho, std::uint64_t n_ref,
                                                  std::uint64_t seed) {
  require(rho.dim() == 4, "simulate_tomography needs a two-qubit state");
  std::vector<TomographyRecord> out;
  const auto settings = canonical_settings();
  for (std::size_t j = 0; j < settings.size(); ++j) {
    Rng rng = make_rng(seed, kTomographyStream, j);
    const double mean = expected_coincidences(rho, settings[j], static_cast<double>(n_ref));
    std::uint64_t n = 0;
    if (mean > 0.0) n = std::poisson_distribution<std::uint64_t>(mean)(rng);
    out.push_back({settings[j], n, n_ref});
  }
  return out;
}

std::vector<TomographyRecord> noiseless_tomography(const DensityMatrix& rho, std::uint64_t n_ref) {
  require(rho.dim() == 4, "noiseless_tomography needs a two-qubit state");
  std::vector<TomographyRecord> out;
  for (const auto& s : canonical_settings()) {
    const double mean = expected_coincidences(rho, s, static_cast<double>(n_ref));
    out.push_back({s, static_cast<std::uint64_t>(std::llround(mean)), n_ref});
  }
  return out;
}

double log_likelihood(const DensityMatrix& rho, std::span<const TomographyRecord> records) {
  require(rho.dim() == 4, "log_likelihood needs a two-qubit state");
  std::vector<double> p;
  double total = 0.0;
  for (const auto& r : records) {
    p.push_back(std::max((setting_projector(r.setting) * rho.matrix()).trace().real(), 0.0));
    total += p.back();
  }
  double ll = 0.0;
  for (std::size_t j = 0; j < records.size(); ++j) {
    if (records[j].coincidences == 0) continue;
    ll += static_cast<double>(records[j].coincidences) * std::log(p[j] / total);
  }
  return ll;
}

MleResult mle_reconstruct(std::span<const TomographyRecord> records, const MleOptions& options) {
  validate_setting_set(records);
  require(options.max_iterations > 0, "max_iterations must be positive");

  double n_total = 0.0;
  for (const auto& r : records) n_total += static_cast<double>(r.coincidences);
  require(n_total > 0.0, "tomography records contain no coincidences");

  // Work with the POVM E_j = G^-1/2 P_j G^-1/2, which sums to the identity,
  // and the state tau ~ G^1/2 rho G^1/2.
  const std::size_t m = records.size();
  std::vector<Matrix> proj(m);
  Matrix g = Matrix::Zero(4, 4);
  for (std::size_t j = 0; j < m; ++j) {
    proj[j] = setting_projector(records[j].setting);
    g += proj[j];
  }
  const Matrix g_inv_sqrt = spectral(g, [](double x) { return 1.0 / std::sqrt(x); });
  std::vector<Matrix> povm(m);
  std::vector<double> freq(m);
  for (std::size_t j = 0; j < m; ++j) {
    povm[j] = hermitian_part(g_inv_sqrt * proj[j] * g_inv_sqrt);
    freq[j] = static_cast<double>(records[j].coincidences) / n_total;
  }

  const auto probabilities = [&](const Matrix& tau) {
    std::vector<double> q(m);
    for (std::size_t j = 0; j < m; ++j) q[j] = std::max((povm[j] * tau).trace().real(), 1e-300);
    return q;
  };
  const auto score = [&](const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (freq[j] > 0.0) s += freq[j] * std::log(q[j]);
    return s;
  };
  const auto step = [](const Matrix& tau, const Matrix& a) {
    Matrix next = hermitian_part(a * tau * a.adjoint());
    return Matrix(next / next.trace().real());
  };

  MleResult result{.rho = DensityMatrix::maximally_mixed(4), .likelihood_trace = {}};
  Matrix tau = Matrix::Identity(4, 4) / 4.0;
  std::vector<double> q = probabilities(tau);
  double current = score(q);
  if (options.keep_trace) result.likelihood_trace.push_back(current * n_total);

  const Matrix id = Matrix::Identity(4, 4);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    Matrix r = Matrix::Zero(4, 4);
    for (std::size_t j = 0; j < m; ++j)
      if (freq[j] > 0.0) r += (freq[j] / q[j]) * povm[j];
    r = hermitian_part(r);

    // Full R-rho-R step first, then dilute by halves until the likelihood rises.
    Matrix candidate = step(tau, r);
    std::vector<double> q_next = probabilities(candidate);
    double next = score(q_next);
    for (double eps = 1.0; next < current && eps > 1e-12; eps *= 0.5) {
      candidate = step(tau, id + eps * r);
      q_next = probabilities(candidate);
      next = score(q_next);
    }
    if (next < current) {
      result.converged = true;
      break;
    }
    const double gain = (next - current) * n_total;
    tau = std::move(candidate);
    q = std::move(q_next);
    current = next;
    if (options.keep_trace) result.likelihood_trace.push_back(current * n_total);
    if (gain < options.tolerance) {
      result.converged = true;
      ++it;
      break;
    }
  }
  result.iterations = it;
  result.log_likelihood = current * n_total;

  Matrix rho = hermitian_part(g_inv_sqrt * tau * g_inv_sqrt);
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  Eigen::VectorXd ev = es.eigenvalues();
  double clipped = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev[k] < 0.0) {
      clipped += -ev[k];
      ev[k] = 0.0;
    }
  }
  rho = hermitian_part(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint());
  const double tr = rho.trace().real();
  result.clipped_mass = clipped / (tr + clipped);
  result.rho = DensityMatrix(rho / tr);
  return result;
}

nlohmann::json to_json(std::span<const TomographyRecord> records) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records) {
    out.push_back({{"hwp1_deg", r.setting.hwp1_deg},
                   {"qwp1_deg", r.setting.qwp1_deg},
                   {"hwp2_deg", r.setting.hwp2_deg},
                   {"qwp2_deg", r.setting.qwp2_deg},
                   {"coincidences", r.coincidences},
                   {"n_ref", r.n_ref}});
  }
  return {{"records", out}};
}

std::vector<TomographyRecord> records_from_json(const nlohmann::json& j) {
  require(j.contains("records") && j["records"].is_array(), "tomography JSON needs a records array");
  std::vector<TomographyRecord> out;
  for (const auto& r : j["records"]) {
    TomographyRecord rec;
    rec.setting = {r.at("hwp1_deg").get<double>(), r.at("qwp1_deg").get<double>(),
                   r.at("hwp2_deg").get<double>(), r.at("qwp2_deg").get<double>()};
    require(r.at("coincidences").is_number_unsigned() || r.at("coincidences") == 0,
            "coincidences must be a non-negative integer");
    rec.coincidences = r.at("coincidences").get<std::uint64_t>();
    rec.n_ref = r.value("n_ref", std::uint64_t{1});
    require(rec.n_ref > 0, "n_ref must be positive");
    out.push_back(rec);
  }
  return out;
}

nlohmann::json to_json(const DensityMatrix& rho) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  const Matrix& m = rho.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array(), c = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      r.push_back(m(i, k).real());
      c.push_back(m(i, k).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"dim", m.rows()}, {"real", re}, {"imag", im}};
}

DensityMatrix density_from_json(const nlohmann::json& j) {
  const auto& re = j.at("real");
  const auto& im = j.at("imag");
  const auto d = static_cast<Eigen::Index>(re.size());
  require(d > 0 && im.size() == re.size(), "density JSON: real and imag must be matching square arrays");
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    require(re[i].size() == re.size() && im[i].size() == re.size(),
            "density JSON: rows must have length " + std::to_string(d));
    for (Eigen::Index k = 0; k < d; ++k)
      m(i, k) = Complex(re[i][k].get<double>(), im[i][k].get<double>());
  }
  return DensityMatrix(std::move(m));
}

}  // namespace qcomm::qstate
