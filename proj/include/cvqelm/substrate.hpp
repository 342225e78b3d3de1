#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cvqelm/gaussian.hpp"

namespace cvqelm {

// The random photonic substrate: a frozen cascade of CX gates fed by
// displacement-encoded inputs, read out as photon-number or quadrature
// moments. Once drawn, a substrate is immutable; everything downstream is a
// pure function of (input, config).

enum class Scheme { Pnr, Homodyne };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct SubstrateConfig {
  int modes = 0;
  std::vector<double> thetas;    // CX angles, one per gate
  double s_max = 1.0;            // sampling half-range for thetas
  double encoding_scale = 1.0;   // displacement per unit standardized feature
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::Homodyne;
};

/// Feature dimension R: 2M for PNR, 5M for homodyne.
int feature_dim(int modes, Scheme scheme);
int feature_dim(const SubstrateConfig& config);

struct FeatureVector {
  Vec values;
  Scheme scheme = Scheme::Homodyne;
};

/// Draw theta_m uniformly on [-s_max, s_max] from a counter-based stream
/// keyed by (seed, m). Regeneration from the same arguments is bit-identical.
SubstrateConfig draw_substrate(int modes, double s_max, std::uint64_t seed,
                               Scheme scheme = Scheme::Homodyne,
                               double encoding_scale = 1.0);

/// One real displacement per mode: alpha_m = c * x_m on the x quadrature.
std::vector<GateOp> encode(const Vec& x, double encoding_scale);

/// The CX cascade: gate m couples control m to target (m+1) mod M, ascending m.
std::vector<GateOp> substrate_gates(const SubstrateConfig& config);

/// vacuum -> encode(x) -> CX cascade.
GaussianState forward(const Vec& x, const SubstrateConfig& config);

/// Per-mode <n> and Var(n), ordered (n_1..n_M, Var_1..Var_M).
FeatureVector pnr_features(const GaussianState& state);

/// Per-mode <x>, <p>, <x^2>, <p^2>, (1/2)<{x,p}>, grouped by moment kind.
FeatureVector homodyne_features(const GaussianState& state);

FeatureVector extract_features(const GaussianState& state, Scheme scheme);

/// Row i = features(forward(X.row(i), config)); bit-identical to the
/// single-sample path and independent of evaluation order.
Mat feature_matrix(const Mat& X, const SubstrateConfig& config);

std::string substrate_to_json(const SubstrateConfig& config);
SubstrateConfig substrate_from_json(const std::string& text);
void save_substrate(const SubstrateConfig& config, const std::filesystem::path& path);
SubstrateConfig load_substrate(const std::filesystem::path& path);

/// Stable hex digest of the canonical JSON form.
std::string substrate_digest(const SubstrateConfig& config);

}  // namespace cvqelm
