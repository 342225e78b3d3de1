#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <utility>
#include <vector>

#include "cvqelm/substrate.hpp"

namespace cvqelm {

// Brute-force simulator in a truncated number basis for up to three modes.
// It shares no code with the covariance-matrix pipeline and exists to
// cross-check every gate and moment formula there. Amplitudes are stored
// row-major with the first mode's occupation number slowest.

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using SpCMat = Eigen::SparseMatrix<std::complex<double>>;

struct FockState {
  int modes = 0;
  int cutoff = 0;           // per-mode dimension D
  CVec amplitudes;          // length D^modes

  double norm() const { return amplitudes.norm(); }
  /// Probability of any mode occupying level D-1; results are only
  /// trustworthy when this is < 1e-10.
  double tail_mass() const;
};

/// Annihilation and creation matrices at cutoff D (a[n-1, n] = sqrt(n)).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> ladder_ops(int cutoff);

/// Description of one gate for the oracle.
struct GateDesc {
  enum class Type { Displacement, Squeeze, Beamsplitter, Cx };
  Type type;
  int mode_a = 0;
  int mode_b = 0;
  double param_a = 0.0;  // alpha_re / r / theta / s
  double param_b = 0.0;  // alpha_im / phi

  static GateDesc displacement(int mode, double alpha_re, double alpha_im);
  static GateDesc squeeze(int mode, double r);
  static GateDesc beamsplitter(int mode_a, int mode_b, double theta, double phi);
  static GateDesc cx(int control, int target, double s);
};

/// Anti-Hermitian generator K with U = exp(K), embedded in the full space.
SpCMat gate_generator(const GateDesc& gate, int modes, int cutoff);

/// Dense unitary exp(K) via eigendecomposition of iK. Intended for small
/// D^modes; larger simulations should go through apply_gate.
CMat gate_unitary(const GateDesc& gate, int modes, int cutoff);

FockState vacuum_fock(int modes, int cutoff);

/// In-place exp(K) action on the amplitudes (scaled Taylor series, exact to
/// round-off); equivalent to multiplying by gate_unitary.
void apply_gate(FockState& state, const GateDesc& gate);

/// Full substrate run (displacement encoding + CX cascade) at cutoff D.
/// Throws CutoffError when the tail mass reaches 1e-10.
FockState simulate(const Vec& x, const SubstrateConfig& config, int cutoff);

struct ModeMoments {
  double nbar = 0.0;
  double var_n = 0.0;
  double x = 0.0;
  double p = 0.0;
  double xx = 0.0;
  double pp = 0.0;
  double xp = 0.0;  // (1/2) <{x, p}>
};

/// Per-mode photon-number and quadrature moments by direct operator action.
std::vector<ModeMoments> oracle_moments(const FockState& state);

}  // namespace cvqelm
