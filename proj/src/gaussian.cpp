#include "cvqelm/gaussian.hpp"

#include <cmath>
#include <string>

#include "cvqelm/errors.hpp"

namespace cvqelm {

namespace {

void require_mode(int modes, int mode, const char* what) {
  if (modes < 1) throw InvalidArgument("mode count must be >= 1");
  if (mode < 0 || mode >= modes) {
    throw InvalidArgument(std::string(what) + " index " + std::to_string(mode) +
                          " out of range for " + std::to_string(modes) + " modes");
  }
}

}  // namespace

Mat symplectic_form(int modes) {
  if (modes < 1) throw InvalidArgument("mode count must be >= 1");
  Mat omega = Mat::Zero(2 * modes, 2 * modes);
  for (int m = 0; m < modes; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  return omega;
}

GaussianState vacuum_state(int modes) {
  if (modes < 1) throw InvalidArgument("vacuum_state: mode count must be >= 1");
  GaussianState s;
  s.mean = Vec::Zero(2 * modes);
  s.cov = 0.5 * Mat::Identity(2 * modes, 2 * modes);
  return s;
}

GateOp identity_gate(int modes) {
  if (modes < 1) throw InvalidArgument("identity_gate: mode count must be >= 1");
  return {Mat::Identity(2 * modes, 2 * modes), Vec::Zero(2 * modes)};
}

GateOp displacement_gate(int modes, int mode, double alpha_re, double alpha_im) {
  require_mode(modes, mode, "displacement mode");
  GateOp g = identity_gate(modes);
  const double sqrt2 = std::sqrt(2.0);
  g.shift(2 * mode) = sqrt2 * alpha_re;
  g.shift(2 * mode + 1) = sqrt2 * alpha_im;
  return g;
}

GateOp squeeze_gate(int modes, int mode, double r) {
  require_mode(modes, mode, "squeeze mode");
  GateOp g = identity_gate(modes);
  g.symplectic(2 * mode, 2 * mode) = std::exp(-r);
  g.symplectic(2 * mode + 1, 2 * mode + 1) = std::exp(r);
  return g;
}

GateOp beamsplitter_gate(int modes, int mode_a, int mode_b, double theta, double phi) {
  require_mode(modes, mode_a, "beamsplitter mode_a");
  require_mode(modes, mode_b, "beamsplitter mode_b");
  if (mode_a == mode_b) throw InvalidArgument("beamsplitter_gate: modes must differ");

  // Heisenberg generator of B(theta, phi) on the (x_a, p_a, x_b, p_b) block:
  //   d a_1/d theta = -e^{-i phi} a_2,  d a_2/d theta = e^{i phi} a_1.
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Mat gen = Mat::Zero(2 * modes, 2 * modes);
  const int xa = 2 * mode_a, pa = 2 * mode_a + 1;
  const int xb = 2 * mode_b, pb = 2 * mode_b + 1;
  gen(xa, xb) = -c;
  gen(xa, pb) = -s;
  gen(pa, xb) = s;
  gen(pa, pb) = -c;
  gen(xb, xa) = c;
  gen(xb, pa) = -s;
  gen(pb, xa) = s;
  gen(pb, pa) = c;

  // gen restricted to the two-mode block squares to -I, so the exponential
  // series sums exactly: exp(theta gen) = I + sin(theta) gen + (1 - cos(theta)) gen^2.
  GateOp g = identity_gate(modes);
  g.symplectic = Mat::Identity(2 * modes, 2 * modes) + std::sin(theta) * gen +
                 (1.0 - std::cos(theta)) * (gen * gen);
  return g;
}

GateOp cx_gate(int modes, int control, int target, double s) {
  require_mode(modes, control, "cx control");
  require_mode(modes, target, "cx target");
  if (control == target) throw InvalidArgument("cx_gate: control and target must differ");
  GateOp g = identity_gate(modes);
  g.symplectic(2 * target, 2 * control) = s;       // x_t += s x_c
  g.symplectic(2 * control + 1, 2 * target + 1) = -s;  // p_c -= s p_t
  return g;
}

CxDecompositionParams cx_decomposition_params(double s) {
  CxDecompositionParams p;
  p.r = std::asinh(-0.5 * s);
  // cos(2 theta) = -tanh(r) has two branches; the negative one satisfies the
  // operator identity exactly (checked against the Fock oracle), so that is
  // the branch this module reports.
  p.theta = -0.5 * std::acos(-std::tanh(p.r));
  return p;
}

GateOp cx_gate_decomposed(int modes, int control, int target, double s) {
  require_mode(modes, control, "cx control");
  require_mode(modes, target, "cx target");
  if (control == target) throw InvalidArgument("cx_gate_decomposed: control and target must differ");

  const CxDecompositionParams p = cx_decomposition_params(s);
  GateOp g = beamsplitter_gate(modes, control, target, p.theta, 0.0);
  g = compose(g, squeeze_gate(modes, control, p.r));
  g = compose(g, squeeze_gate(modes, target, -p.r));
  g = compose(g, beamsplitter_gate(modes, control, target, M_PI_2 + p.theta, 0.0));
  return g;
}

GateOp compose(const GateOp& first, const GateOp& later) {
  if (first.modes() != later.modes()) throw InvalidArgument("compose: mode count mismatch");
  GateOp g;
  g.symplectic = later.symplectic * first.symplectic;
  g.shift = later.symplectic * first.shift + later.shift;
  return g;
}

GaussianState apply(const GaussianState& state, const GateOp& gate) {
  if (state.modes() != gate.modes()) throw InvalidArgument("apply: mode count mismatch");
  GaussianState out;
  out.mean = gate.symplectic * state.mean + gate.shift;
  Mat cov = gate.symplectic * state.cov * gate.symplectic.transpose();
  out.cov = 0.5 * (cov + cov.transpose());  // keep exact symmetry
  return out;
}

std::pair<Eigen::Vector2d, Eigen::Matrix2d> mode_marginal(const GaussianState& state, int mode) {
  require_mode(state.modes(), mode, "marginal mode");
  Eigen::Vector2d mu = state.mean.segment<2>(2 * mode);
  Eigen::Matrix2d v = state.cov.block<2, 2>(2 * mode, 2 * mode);
  return {mu, v};
}

double symplectic_defect(const Mat& symplectic) {
  const int modes = static_cast<int>(symplectic.rows()) / 2;
  Mat omega = symplectic_form(modes);
  return (symplectic.transpose() * omega * symplectic - omega).cwiseAbs().maxCoeff();
}

double physicality_min_eigenvalue(const GaussianState& state) {
  Eigen::MatrixXcd h = state.cov.cast<std::complex<double>>();
  Mat omega = symplectic_form(state.modes());
  h += std::complex<double>(0.0, 0.5) * omega.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw StateError("physicality eigensolve failed");
  return es.eigenvalues().minCoeff();
}

double purity_determinant(const GaussianState& state) {
  return (2.0 * state.cov).determinant();
}

void check_physical(const GaussianState& state, double tol) {
  const double sym = (state.cov - state.cov.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, state.cov.cwiseAbs().maxCoeff());
  if (sym > 1e-12 * scale) throw StateError("covariance not symmetric");
  if (physicality_min_eigenvalue(state) < -tol) {
    throw StateError("state violates the uncertainty bound");
  }
}

}  // namespace cvqelm
