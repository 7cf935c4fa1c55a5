#include "qcomm/quantum_state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <optional>
#include <sstream>

#include "qcomm/error.hpp"

namespace qcomm::qstate {

namespace {

constexpr double kNormTol = 1e-12;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Eigenvalues below this fraction of the largest are treated as exact zeros
// before taking square roots.
constexpr double kRankTol = 1e-13;

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Matrix sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  Eigen::VectorXd ev = es.eigenvalues();
  const double top = std::max(ev.maxCoeff(), 0.0);
  for (Eigen::Index k = 0; k < ev.size(); ++k) ev[k] = ev[k] > kRankTol * top ? std::sqrt(ev[k]) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Dominant eigenvector when rho is pure to within 1e-12 in purity.
std::optional<Vector> pure_vector(const DensityMatrix& rho) {
  if (std::abs(purity(rho) - 1.0) > 1e-12) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho.matrix()));
  return Vector(es.eigenvectors().col(es.eigenvalues().size() - 1));
}

Matrix pauli(int k) {
  Matrix p(2, 2);
  switch (k) {
    case 0: p << 0, 1, 1, 0; break;
    case 1: p << 0, Complex(0, -1), Complex(0, 1), 0; break;
    default: p << 1, 0, 0, -1; break;
  }
  return p;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void require_two_qubit(const DensityMatrix& rho) {
  require(rho.dim() == 4, "two-qubit state (dimension 4) required, got dimension " +
                              std::to_string(rho.dim()));
}

// Amplitudes (00, 01, 10, 11) of each Bell state in the measured pair's order.
std::array<Complex, 4> bell_components(BellLabel label) {
  const double s = kInvSqrt2;
  switch (label) {
    case BellLabel::PhiPlus: return {s, 0, 0, s};
    case BellLabel::PhiMinus: return {s, 0, 0, -s};
    case BellLabel::PsiPlus: return {0, s, s, 0};
    case BellLabel::PsiMinus: return {0, s, -s, 0};
  }
  return {};
}

int bit_of(std::uint64_t index, int qubit, int n) { return static_cast<int>((index >> (n - 1 - qubit)) & 1u); }

}  // namespace

PureState::PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
  const auto n = static_cast<std::uint64_t>(amps_.size());
  require(n >= 2 && std::has_single_bit(n), "state length must be a power of two >= 2");
  require(std::abs(amps_.norm() - 1.0) <= kNormTol, "state vector must have unit norm");
  qubits_ = std::countr_zero(n);
}

PureState PureState::normalized(Vector amplitudes) {
  const double norm = amplitudes.norm();
  require(norm > 0.0 && std::isfinite(norm), "cannot normalize a zero or non-finite vector");
  return PureState(amplitudes / norm);
}

PureState PureState::basis(int n_qubits, std::uint64_t index) {
  require(n_qubits >= 1 && n_qubits <= 20, "qubit count out of range");
  const auto dim = std::uint64_t{1} << n_qubits;
  require(index < dim, "basis index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return PureState(std::move(v));
}

PureState PureState::tensor(const PureState& other) const {
  Vector out(amps_.size() * other.amps_.size());
  for (Eigen::Index i = 0; i < amps_.size(); ++i)
    out.segment(i * other.amps_.size(), other.amps_.size()) = amps_[i] * other.amps_;
  return PureState::normalized(std::move(out));
}

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
  require(m_.rows() == m_.cols() && m_.rows() >= 1, "density matrix must be square");
  require(m_.allFinite(), "density matrix must be finite");
  require((m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= 1e-12, "density matrix must be Hermitian");
  require(std::abs(m_.trace() - Complex(1.0)) <= 1e-12, "density matrix must have unit trace");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m_), Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -1e-10, "density matrix must be positive semidefinite");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const Vector& v = psi.amplitudes();
  return DensityMatrix(hermitian_part(v * v.adjoint()));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  require(dim >= 1, "dimension must be positive");
  const auto d = static_cast<Eigen::Index>(dim);
  return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(dim));
}

std::string_view to_string(BellLabel label) {
  switch (label) {
    case BellLabel::PhiPlus: return "Phi+";
    case BellLabel::PhiMinus: return "Phi-";
    case BellLabel::PsiPlus: return "Psi+";
    case BellLabel::PsiMinus: return "Psi-";
  }
  return "?";
}

PureState bell_state(BellLabel label) {
  const auto c = bell_components(label);
  Vector v(4);
  v << c[0], c[1], c[2], c[3];
  return PureState::normalized(std::move(v));
}

DensityMatrix werner(double p) {
  require(p >= 0.0 && p <= 1.0, "Werner weight must lie in [0, 1]");
  const Vector phi = bell_state(BellLabel::PhiPlus).amplitudes();
  Matrix m = p * (phi * phi.adjoint()) + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
  return DensityMatrix(hermitian_part(m));
}

double fidelity(const DensityMatrix& rho, const PureState& target) {
  require(rho.dim() == target.dim(), "fidelity: dimension mismatch");
  const Vector& v = target.amplitudes();
  const double f = (v.adjoint() * rho.matrix() * v)(0, 0).real();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require(rho.dim() == sigma.dim(), "fidelity: dimension mismatch");
  if (auto v = pure_vector(sigma)) return fidelity(rho, PureState::normalized(*v));
  if (auto v = pure_vector(rho)) return fidelity(sigma, PureState::normalized(*v));
  const Matrix root = sqrt_psd(rho.matrix());
  const Matrix inner = hermitian_part(root * sigma.matrix() * root);
  Eigen::SelfAdjointEigenSolver<Matrix> es(inner, Eigen::EigenvaluesOnly);
  const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  double tr = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double e = es.eigenvalues()[k];
    if (e > kRankTol * top) tr += std::sqrt(e);
  }
  return std::clamp(tr * tr, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require(rho.dim() == sigma.dim(), "trace distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho.matrix() - sigma.matrix()),
                                           Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

double concurrence(const PureState& psi) {
  require(psi.qubits() == 2, "concurrence needs a two-qubit state");
  const Vector& a = psi.amplitudes();
  return std::min(1.0, 2.0 * std::abs(a[0] * a[3] - a[1] * a[2]));
}

double concurrence(const DensityMatrix& rho) {
  require_two_qubit(rho);
  if (auto v = pure_vector(rho)) return concurrence(PureState::normalized(*v));
  // The square roots of the eigenvalues of rho (Y rho* Y) are the singular
  // values of sqrt(rho) Y sqrt(rho)*, which is better conditioned.
  const Matrix yy = kron(pauli(1), pauli(1));
  const Matrix root = sqrt_psd(rho.matrix());
  const Matrix m = root * yy * root.conjugate();
  Eigen::JacobiSVD<Matrix> svd(m);
  const Eigen::VectorXd l = svd.singularValues();  // descending
  return std::clamp(l[0] - l[1] - l[2] - l[3], 0.0, 1.0);
}

Eigen::Matrix3d correlation_matrix(const DensityMatrix& rho) {
  require_two_qubit(rho);
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = (rho.matrix() * kron(pauli(i), pauli(j))).trace().real();
  return t;
}

double bell_parameter(const DensityMatrix& rho) {
  const Eigen::Matrix3d t = correlation_matrix(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();  // ascending
  return 2.0 * std::sqrt(std::max(ev[2] + ev[1], 0.0));
}

DensityMatrix partial_trace(const PureState& psi, std::span<const int> keep) {
  const int n = psi.qubits();
  require(!keep.empty() && std::is_sorted(keep.begin(), keep.end()) &&
              std::adjacent_find(keep.begin(), keep.end()) == keep.end(),
          "kept qubits must be distinct and ascending");
  require(keep.front() >= 0 && keep.back() < n, "kept qubit index out of range");
  const auto k = static_cast<int>(keep.size());
  const std::uint64_t dk = std::uint64_t{1} << k;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  const Vector& a = psi.amplitudes();
  auto kept_index = [&](std::uint64_t idx) {
    std::uint64_t r = 0;
    for (int q : keep) r = (r << 1) | static_cast<std::uint64_t>(bit_of(idx, q, n));
    return r;
  };
  std::uint64_t kept_mask = 0;
  for (int q : keep) kept_mask |= std::uint64_t{1} << (n - 1 - q);
  const std::uint64_t dim = psi.dim();
  for (std::uint64_t i = 0; i < dim; ++i)
    for (std::uint64_t j = 0; j < dim; ++j) {
      if ((i & ~kept_mask) != (j & ~kept_mask)) continue;
      out(static_cast<Eigen::Index>(kept_index(i)), static_cast<Eigen::Index>(kept_index(j))) +=
          a[static_cast<Eigen::Index>(i)] * std::conj(a[static_cast<Eigen::Index>(j)]);
    }
  return DensityMatrix(hermitian_part(out));
}

Matrix2 random_unitary(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix2 z;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix2> qr(z);
  Matrix2 q = qr.householderQ();
  const Matrix2 r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < 2; ++k) q.col(k) *= r(k, k) / std::abs(r(k, k));
  return q;
}

BsmResult bell_project(const PureState& state, std::pair<int, int> pair, BellLabel outcome) {
  require(state.qubits() == 4, "Bell-state measurement expects a 4-qubit state");
  const auto [i, j] = pair;
  require(i >= 0 && i < 4 && j >= 0 && j < 4, "measured qubit index out of range");
  require(i != j, "measured qubits must be distinct");
  std::array<int, 2> rest{};
  int r = 0;
  for (int q = 0; q < 4; ++q)
    if (q != i && q != j) rest[r++] = q;

  const auto beta = bell_components(outcome);
  const Vector& psi = state.amplitudes();
  Vector rem = Vector::Zero(4);
  for (std::uint64_t idx = 0; idx < 16; ++idx) {
    const int ab = 2 * bit_of(idx, i, 4) + bit_of(idx, j, 4);
    const int cd = 2 * bit_of(idx, rest[0], 4) + bit_of(idx, rest[1], 4);
    rem[cd] += std::conj(beta[ab]) * psi[static_cast<Eigen::Index>(idx)];
  }
  const double p = rem.squaredNorm();
  if (p <= 1e-300) return {outcome, PureState::basis(2, 0), 0.0};
  return {outcome, PureState::normalized(std::move(rem)), p};
}

std::array<double, 4> bell_outcome_probabilities(const PureState& state, std::pair<int, int> pair) {
  std::array<double, 4> p{};
  for (int k = 0; k < 4; ++k) p[k] = bell_project(state, pair, static_cast<BellLabel>(k)).probability;
  return p;
}

BsmResult bell_state_measure(const PureState& state, std::pair<int, int> pair, std::uint64_t seed) {
  const auto probs = bell_outcome_probabilities(state, pair);
  Rng rng = make_rng(seed);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  int pick = 3;
  while (pick > 0 && probs[pick] <= 0.0) --pick;
  for (int k = 0; k < 4; ++k) {
    acc += probs[k];
    if (u < acc && probs[k] > 0.0) {
      pick = k;
      break;
    }
  }
  return bell_project(state, pair, static_cast<BellLabel>(pick));
}

SwapReport entanglement_swap_demo(std::uint64_t seed) {
  const PureState phi = bell_state(BellLabel::PhiPlus);
  const PureState state = phi.tensor(phi);  // (A, FA) (x) (FB, B)
  const std::array<int, 2> ab = {0, 3};
  const double before = concurrence(partial_trace(state, ab));
  const BsmResult bsm = bell_state_measure(state, {1, 2}, seed);
  return {bsm.outcome, before, concurrence(bsm.remainder), bsm.probability};
}

}  // namespace qcomm::qstate
