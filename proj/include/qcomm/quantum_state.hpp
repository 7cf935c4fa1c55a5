#pragma once

// Finite-dimensional qubit states: state vectors, density matrices and the
// two-qubit entanglement figures of merit.
//
// Basis convention: |0> = |H>, |1> = |V>; qubit 0 is the most significant bit
// of the computational-basis index.

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "qcomm/random.hpp"

namespace qcomm::qstate {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;

class PureState {
 public:
  // Amplitudes must have power-of-two length and unit norm within 1e-12.
  explicit PureState(Vector amplitudes);
  // Rescales to unit norm first; rejects the zero vector.
  static PureState normalized(Vector amplitudes);
  static PureState basis(int n_qubits, std::uint64_t index);

  const Vector& amplitudes() const { return amps_; }
  int qubits() const { return qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

  PureState tensor(const PureState& other) const;

 private:
  Vector amps_;
  int qubits_ = 0;
};

class DensityMatrix {
 public:
  // Checks Hermiticity (1e-12), unit trace (1e-12) and eigenvalues >= -1e-10.
  explicit DensityMatrix(Matrix m);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(std::size_t dim);

  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  Matrix m_;
};

enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };
std::string_view to_string(BellLabel label);

PureState bell_state(BellLabel label);

// p |Phi+><Phi+| + (1 - p) I/4.
DensityMatrix werner(double p);

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double fidelity(const DensityMatrix& rho, const PureState& target);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double purity(const DensityMatrix& rho);

// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix& rho);
double concurrence(const PureState& psi);

// Horodecki maximal CHSH value 2 sqrt(t1 + t2) from the correlation matrix.
double bell_parameter(const DensityMatrix& rho);
Eigen::Matrix3d correlation_matrix(const DensityMatrix& rho);

// Reduced state on `keep` (ascending qubit indices).
DensityMatrix partial_trace(const PureState& psi, std::span<const int> keep);

// Uniformly random single-qubit unitary (Haar).
Matrix2 random_unitary(Rng& rng);

struct BsmResult {
  BellLabel outcome;
  PureState remainder;
  double probability;
};

// Probabilities of the four Bell outcomes on qubits `pair` of a 4-qubit state,
// indexed by BellLabel.
std::array<double, 4> bell_outcome_probabilities(const PureState& state, std::pair<int, int> pair);

// Projects `pair` onto the Bell basis, samples the outcome, and returns the
// normalized state of the two remaining qubits (in ascending order).
BsmResult bell_state_measure(const PureState& state, std::pair<int, int> pair, std::uint64_t seed);

// Conditional remainder for a fixed outcome; probability may be 0.
BsmResult bell_project(const PureState& state, std::pair<int, int> pair, BellLabel outcome);

struct SwapReport {
  BellLabel outcome;
  double concurrence_before;
  double concurrence_after;
  double probability;
};

// |Phi+>_{A,FA} (x) |Phi+>_{FB,B} as qubits (A, FA, FB, B); BSM on (FA, FB).
SwapReport entanglement_swap_demo(std::uint64_t seed);

}  // namespace qcomm::qstate
