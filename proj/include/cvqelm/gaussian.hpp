#pragma once

#include <Eigen/Dense>
#include <utility>

namespace cvqelm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Phase-space simulation of Gaussian states of M bosonic modes in natural
// units (hbar = 1). Quadratures are ordered interleaved,
//   r = (x1, p1, x2, p2, ..., xM, pM),
// and every matrix in this module uses that ordering. A state is its mean
// vector and covariance matrix; a Gaussian unitary is its symplectic matrix
// plus a phase-space shift.

/// Mean vector and covariance matrix of an M-mode Gaussian state.
struct GaussianState {
  Vec mean;  // length 2M
  Mat cov;   // 2M x 2M symmetric

  int modes() const { return static_cast<int>(mean.size()) / 2; }
};

/// Phase-space action of a Gaussian unitary: r -> S r + d.
struct GateOp {
  Mat symplectic;  // 2M x 2M
  Vec shift;       // length 2M

  int modes() const { return static_cast<int>(shift.size()) / 2; }
};

/// Block-diagonal symplectic form with 2x2 blocks [[0,1],[-1,0]].
Mat symplectic_form(int modes);

/// All modes in vacuum: zero mean, covariance I/2.
GaussianState vacuum_state(int modes);

GateOp identity_gate(int modes);

/// D(alpha) on one mode; shifts (x, p) by sqrt(2) (Re alpha, Im alpha).
GateOp displacement_gate(int modes, int mode, double alpha_re, double alpha_im);

/// S(r) with real squeezing parameter; scales (x, p) by (e^-r, e^+r).
GateOp squeeze_gate(int modes, int mode, double r);

/// B(theta, phi) = exp[theta (e^{i phi} a_1 a_2^dag - e^{-i phi} a_1^dag a_2)]
/// acting on (mode_a, mode_b); obtained by exponentiating the quadratic
/// generator (whose quadrature representation A satisfies A^2 = -I, so
/// exp(theta A) = cos(theta) I + sin(theta) A exactly).
GateOp beamsplitter_gate(int modes, int mode_a, int mode_b, double theta, double phi);

/// Controlled addition exp(-i s x_c p_t): x_t += s x_c, p_c -= s p_t.
GateOp cx_gate(int modes, int control, int target, double s);

/// Squeeze and beamsplitter angles realising cx_gate(s) as
/// B(pi/2 + theta, 0) [S(r) (x) S(-r)] B(theta, 0).
struct CxDecompositionParams {
  double r;      // sinh(r) = -s/2
  double theta;  // cos(2 theta) = -tanh(r); branch fixed by the identity
};
CxDecompositionParams cx_decomposition_params(double s);

/// cx_gate(s) built from the beamsplitter/squeezer decomposition above.
GateOp cx_gate_decomposed(int modes, int control, int target, double s);

/// Gate composition: applying `first` then `later` (S2 S1, S2 d1 + d2).
GateOp compose(const GateOp& first, const GateOp& later);

/// mean -> S mean + d, cov -> S cov S^T.
GaussianState apply(const GaussianState& state, const GateOp& gate);

/// Per-mode mean (x, p) and 2x2 covariance block.
std::pair<Eigen::Vector2d, Eigen::Matrix2d> mode_marginal(const GaussianState& state, int mode);

/// Max-norm of S^T Omega S - Omega.
double symplectic_defect(const Mat& symplectic);

/// Smallest eigenvalue of the Hermitian matrix cov + (i/2) Omega;
/// physical states satisfy >= 0 up to round-off.
double physicality_min_eigenvalue(const GaussianState& state);

/// det(2 cov); equals 1 for pure states.
double purity_determinant(const GaussianState& state);

/// Throws StateError if the physicality eigenvalue bound fails `tol`.
void check_physical(const GaussianState& state, double tol = 1e-10);

}  // namespace cvqelm
