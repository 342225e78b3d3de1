#include "cvqelm/fock.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "cvqelm/errors.hpp"

namespace cvqelm {

namespace {

using Cplx = std::complex<double>;

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Insert occupation digit `value` for `mode` into a spectator index that
/// enumerates the remaining modes (mode 0 slowest).
std::int64_t insert_digit(std::int64_t spectator, int mode, int value, int modes, int cutoff) {
  const std::int64_t below = ipow(cutoff, modes - 1 - mode);
  const std::int64_t hi = spectator / below;
  const std::int64_t lo = spectator % below;
  return (hi * cutoff + value) * below + lo;
}

SpCMat sparse_annihilation(int cutoff) {
  SpCMat a(cutoff, cutoff);
  std::vector<Eigen::Triplet<Cplx>> trip;
  trip.reserve(cutoff);
  for (int n = 1; n < cutoff; ++n) trip.emplace_back(n - 1, n, std::sqrt(double(n)));
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

/// Lift a one-mode operator to the full space.
SpCMat embed_one(const SpCMat& op, int mode, int modes, int cutoff) {
  const std::int64_t dim = ipow(cutoff, modes);
  const std::int64_t spect = ipow(cutoff, modes - 1);
  std::vector<Eigen::Triplet<Cplx>> trip;
  trip.reserve(static_cast<std::size_t>(op.nonZeros()) * spect);
  for (int k = 0; k < op.outerSize(); ++k) {
    for (SpCMat::InnerIterator it(op, k); it; ++it) {
      for (std::int64_t s = 0; s < spect; ++s) {
        trip.emplace_back(insert_digit(s, mode, int(it.row()), modes, cutoff),
                          insert_digit(s, mode, int(it.col()), modes, cutoff), it.value());
      }
    }
  }
  SpCMat out(dim, dim);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

/// Lift a product A_{mode_a} B_{mode_b} (distinct modes) to the full space.
SpCMat embed_two(const SpCMat& op_a, int mode_a, const SpCMat& op_b, int mode_b,
                 int modes, int cutoff) {
  const std::int64_t dim = ipow(cutoff, modes);
  const std::int64_t spect = ipow(cutoff, modes - 2);
  // Insert digits highest mode first so the spectator layout stays valid.
  const int m_hi = std::max(mode_a, mode_b);
  const int m_lo = std::min(mode_a, mode_b);
  std::vector<Eigen::Triplet<Cplx>> trip;
  trip.reserve(static_cast<std::size_t>(op_a.nonZeros()) * op_b.nonZeros() * spect);
  for (int ka = 0; ka < op_a.outerSize(); ++ka) {
    for (SpCMat::InnerIterator ia(op_a, ka); ia; ++ia) {
      for (int kb = 0; kb < op_b.outerSize(); ++kb) {
        for (SpCMat::InnerIterator ib(op_b, kb); ib; ++ib) {
          const int row_hi = int(mode_a == m_hi ? ia.row() : ib.row());
          const int col_hi = int(mode_a == m_hi ? ia.col() : ib.col());
          const int row_lo = int(mode_a == m_hi ? ib.row() : ia.row());
          const int col_lo = int(mode_a == m_hi ? ib.col() : ia.col());
          for (std::int64_t s = 0; s < spect; ++s) {
            std::int64_t r = insert_digit(s, m_hi - 1, row_hi, modes - 1, cutoff);
            r = insert_digit(r, m_lo, row_lo, modes, cutoff);
            std::int64_t c = insert_digit(s, m_hi - 1, col_hi, modes - 1, cutoff);
            c = insert_digit(c, m_lo, col_lo, modes, cutoff);
            trip.emplace_back(r, c, ia.value() * ib.value());
          }
        }
      }
    }
  }
  SpCMat out(dim, dim);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

double one_norm(const SpCMat& m) {
  double best = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    double col = 0.0;
    for (SpCMat::InnerIterator it(m, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

/// psi <- exp(K) psi via scaled Taylor series; exact up to round-off.
void apply_exp(const SpCMat& generator, CVec& psi) {
  const double norm = one_norm(generator);
  const int steps = std::max(1, int(std::ceil(norm / 0.5)));
  const double inv_steps = 1.0 / double(steps);
  for (int s = 0; s < steps; ++s) {
    CVec term = psi;
    CVec acc = psi;
    for (int j = 1; j <= 64; ++j) {
      term = (generator * term) * (inv_steps / double(j));
      acc += term;
      if (term.norm() <= 1e-17 * acc.norm()) break;
    }
    psi.swap(acc);
  }
}

void require_cutoff(int cutoff) {
  if (cutoff < 2) throw InvalidArgument("fock cutoff must be >= 2");
}

void require_modes(int modes, int used) {
  if (modes < 1) throw InvalidArgument("fock mode count must be >= 1");
  if (used < 0 || used >= modes) throw InvalidArgument("fock gate mode out of range");
}

}  // namespace

double FockState::tail_mass() const {
  double mass = 0.0;
  const std::int64_t dim = amplitudes.size();
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    std::int64_t rest = idx;
    bool at_edge = false;
    for (int m = modes - 1; m >= 0; --m) {
      if (rest % cutoff == cutoff - 1) {
        at_edge = true;
        break;
      }
      rest /= cutoff;
    }
    if (at_edge) mass += std::norm(amplitudes(idx));
  }
  return mass;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> ladder_ops(int cutoff) {
  require_cutoff(cutoff);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
  return {a, a.transpose()};
}

GateDesc GateDesc::displacement(int mode, double alpha_re, double alpha_im) {
  return {Type::Displacement, mode, mode, alpha_re, alpha_im};
}
GateDesc GateDesc::squeeze(int mode, double r) { return {Type::Squeeze, mode, mode, r, 0.0}; }
GateDesc GateDesc::beamsplitter(int mode_a, int mode_b, double theta, double phi) {
  return {Type::Beamsplitter, mode_a, mode_b, theta, phi};
}
GateDesc GateDesc::cx(int control, int target, double s) {
  return {Type::Cx, control, target, s, 0.0};
}

SpCMat gate_generator(const GateDesc& gate, int modes, int cutoff) {
  require_cutoff(cutoff);
  require_modes(modes, gate.mode_a);
  const SpCMat a = sparse_annihilation(cutoff);
  const SpCMat ad = SpCMat(a.adjoint());
  const Cplx i1(0.0, 1.0);

  switch (gate.type) {
    case GateDesc::Type::Displacement: {
      // alpha a^dag - alpha* a
      const Cplx alpha(gate.param_a, gate.param_b);
      SpCMat k = alpha * ad - std::conj(alpha) * a;
      return embed_one(k, gate.mode_a, modes, cutoff);
    }
    case GateDesc::Type::Squeeze: {
      // (r/2)(a^2 - (a^dag)^2)
      SpCMat k = 0.5 * gate.param_a * SpCMat(a * a - ad * ad);
      return embed_one(k, gate.mode_a, modes, cutoff);
    }
    case GateDesc::Type::Beamsplitter: {
      require_modes(modes, gate.mode_b);
      if (gate.mode_a == gate.mode_b) throw InvalidArgument("beamsplitter modes must differ");
      // theta (e^{i phi} a_1 a_2^dag - e^{-i phi} a_1^dag a_2)
      const Cplx phase = std::exp(i1 * gate.param_b);
      SpCMat t1 = embed_two(a, gate.mode_a, ad, gate.mode_b, modes, cutoff);
      SpCMat t2 = embed_two(ad, gate.mode_a, a, gate.mode_b, modes, cutoff);
      return SpCMat(gate.param_a * (phase * t1 - std::conj(phase) * t2));
    }
    case GateDesc::Type::Cx: {
      require_modes(modes, gate.mode_b);
      if (gate.mode_a == gate.mode_b) throw InvalidArgument("cx modes must differ");
      // -i s x_c p_t
      const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
      SpCMat x = inv_sqrt2 * SpCMat(a + ad);
      SpCMat p = i1 * inv_sqrt2 * SpCMat(ad - a);
      SpCMat xp = embed_two(x, gate.mode_a, p, gate.mode_b, modes, cutoff);
      return SpCMat((-i1 * gate.param_a) * xp);
    }
  }
  throw InvalidArgument("unsupported gate type");
}

CMat gate_unitary(const GateDesc& gate, int modes, int cutoff) {
  const SpCMat k = gate_generator(gate, modes, cutoff);
  // K is anti-Hermitian; diagonalise H = iK and form U = V e^{-i Lambda} V^dag.
  CMat h = Cplx(0.0, 1.0) * CMat(k);
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success) throw StateError("gate_unitary eigensolve failed");
  CVec phases(es.eigenvalues().size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) {
    phases(j) = std::exp(Cplx(0.0, -es.eigenvalues()(j)));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

FockState vacuum_fock(int modes, int cutoff) {
  require_cutoff(cutoff);
  if (modes < 1) throw InvalidArgument("fock mode count must be >= 1");
  FockState s;
  s.modes = modes;
  s.cutoff = cutoff;
  s.amplitudes = CVec::Zero(ipow(cutoff, modes));
  s.amplitudes(0) = 1.0;
  return s;
}

void apply_gate(FockState& state, const GateDesc& gate) {
  const SpCMat k = gate_generator(gate, state.modes, state.cutoff);
  apply_exp(k, state.amplitudes);
  const double n = state.norm();
  if (std::abs(n - 1.0) > 1e-10) {
    throw StateError("fock state norm drifted to " + std::to_string(n));
  }
}

FockState simulate(const Vec& x, const SubstrateConfig& config, int cutoff) {
  if (config.modes > 3) throw InvalidArgument("fock oracle supports at most 3 modes");
  if (x.size() != config.modes) throw InvalidArgument("simulate: feature/mode count mismatch");
  FockState state = vacuum_fock(config.modes, cutoff);
  for (int m = 0; m < config.modes; ++m) {
    apply_gate(state, GateDesc::displacement(m, config.encoding_scale * x(m), 0.0));
  }
  const int M = config.modes;
  if (M > 1) {  // a single mode has no partner to couple to
    for (int m = 1; m <= M; ++m) {
      apply_gate(state, GateDesc::cx(m - 1, m % M, config.thetas[m - 1]));
    }
  }
  if (state.tail_mass() >= 1e-10) {
    char mass[32];
    std::snprintf(mass, sizeof(mass), "%.3e", state.tail_mass());
    throw CutoffError("fock cutoff " + std::to_string(cutoff) + " insufficient (tail mass " +
                      mass + ")");
  }
  return state;
}

namespace {

/// Apply a dense one-mode operator to the amplitudes of `state`.
CVec apply_one_mode_dense(const CMat& op, const FockState& state, int mode) {
  const int d = state.cutoff;
  const std::int64_t spect = ipow(d, state.modes - 1);
  CVec out = CVec::Zero(state.amplitudes.size());
  for (std::int64_t s = 0; s < spect; ++s) {
    for (int r = 0; r < d; ++r) {
      Cplx acc(0.0, 0.0);
      for (int c = 0; c < d; ++c) {
        acc += op(r, c) * state.amplitudes(insert_digit(s, mode, c, state.modes, d));
      }
      out(insert_digit(s, mode, r, state.modes, d)) = acc;
    }
  }
  return out;
}

}  // namespace

std::vector<ModeMoments> oracle_moments(const FockState& state) {
  const int d = state.cutoff;
  auto [a, ad] = ladder_ops(d);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CMat x_op = inv_sqrt2 * (a + ad).cast<Cplx>();
  CMat p_op = Cplx(0.0, 1.0) * inv_sqrt2 * (ad - a).cast<Cplx>();

  std::vector<ModeMoments> out(state.modes);
  for (int m = 0; m < state.modes; ++m) {
    ModeMoments mm;
    // Number moments are diagonal in this basis.
    const std::int64_t stride = ipow(d, state.modes - 1 - m);
    for (std::int64_t idx = 0; idx < state.amplitudes.size(); ++idx) {
      const double prob = std::norm(state.amplitudes(idx));
      const double n = double((idx / stride) % d);
      mm.nbar += prob * n;
      mm.var_n += prob * n * n;
    }
    mm.var_n -= mm.nbar * mm.nbar;

    const CVec vx = apply_one_mode_dense(x_op, state, m);
    const CVec vp = apply_one_mode_dense(p_op, state, m);
    mm.x = state.amplitudes.dot(vx).real();
    mm.p = state.amplitudes.dot(vp).real();
    mm.xx = vx.squaredNorm();
    mm.pp = vp.squaredNorm();
    mm.xp = vx.dot(vp).real();
    out[m] = mm;
  }
  return out;
}

}  // namespace cvqelm
