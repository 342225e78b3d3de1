#include "cvqelm/substrate.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cvqelm/errors.hpp"
#include "cvqelm/rng.hpp"

namespace cvqelm {

using json = nlohmann::ordered_json;

std::string to_string(Scheme scheme) { return scheme == Scheme::Pnr ? "pnr" : "homodyne"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "pnr") return Scheme::Pnr;
  if (name == "homodyne") return Scheme::Homodyne;
  throw InvalidArgument("unknown measurement scheme: " + name);
}

int feature_dim(int modes, Scheme scheme) {
  return scheme == Scheme::Pnr ? 2 * modes : 5 * modes;
}

int feature_dim(const SubstrateConfig& config) { return feature_dim(config.modes, config.scheme); }

namespace {

std::vector<double> draw_thetas(int modes, double s_max, std::uint64_t seed) {
  std::vector<double> thetas(modes);
  for (int m = 0; m < modes; ++m) {
    thetas[m] = (2.0 * to_unit(mix(seed, std::uint64_t(m))) - 1.0) * s_max;
  }
  return thetas;
}

void require_finite(const Vec& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x(i))) throw DataError("non-finite feature value at index " + std::to_string(i));
  }
}

/// Encoded mean vector; entry expressions match displacement_gate exactly so
/// the batched path stays bit-identical to the per-sample one.
Vec encoded_mean(const Vec& x, double c) {
  Vec mean = Vec::Zero(2 * x.size());
  const double sqrt2 = std::sqrt(2.0);
  for (Eigen::Index m = 0; m < x.size(); ++m) mean(2 * m) = sqrt2 * (c * x(m));
  return mean;
}

}  // namespace

SubstrateConfig draw_substrate(int modes, double s_max, std::uint64_t seed, Scheme scheme,
                               double encoding_scale) {
  if (modes < 1) throw InvalidArgument("draw_substrate: mode count must be >= 1");
  if (s_max < 0.0) throw InvalidArgument("draw_substrate: s_max must be >= 0");
  if (encoding_scale <= 0.0) throw InvalidArgument("draw_substrate: encoding_scale must be > 0");
  SubstrateConfig cfg;
  cfg.modes = modes;
  cfg.s_max = s_max;
  cfg.seed = seed;
  cfg.scheme = scheme;
  cfg.encoding_scale = encoding_scale;
  cfg.thetas = draw_thetas(modes, s_max, seed);
  return cfg;
}

std::vector<GateOp> encode(const Vec& x, double encoding_scale) {
  require_finite(x);
  const int modes = static_cast<int>(x.size());
  std::vector<GateOp> gates;
  gates.reserve(modes);
  for (int m = 0; m < modes; ++m) {
    gates.push_back(displacement_gate(modes, m, encoding_scale * x(m), 0.0));
  }
  return gates;
}

std::vector<GateOp> substrate_gates(const SubstrateConfig& config) {
  if (static_cast<int>(config.thetas.size()) != config.modes) {
    throw InvalidArgument("substrate config has " + std::to_string(config.thetas.size()) +
                          " thetas for " + std::to_string(config.modes) + " modes");
  }
  std::vector<GateOp> gates;
  if (config.modes == 1) return gates;  // no partner mode to couple to
  gates.reserve(config.modes);
  for (int m = 1; m <= config.modes; ++m) {
    gates.push_back(cx_gate(config.modes, m - 1, m % config.modes, config.thetas[m - 1]));
  }
  return gates;
}

GaussianState forward(const Vec& x, const SubstrateConfig& config) {
  if (x.size() != config.modes) {
    throw InvalidArgument("forward: got " + std::to_string(x.size()) + " features for " +
                          std::to_string(config.modes) + " modes");
  }
  GaussianState state = vacuum_state(config.modes);
  for (const GateOp& g : encode(x, config.encoding_scale)) state = apply(state, g);
  for (const GateOp& g : substrate_gates(config)) state = apply(state, g);
  return state;
}

namespace {

void pnr_from_marginal(const Eigen::Vector2d& mu, const Eigen::Matrix2d& v, double& nbar,
                       double& var_n) {
  nbar = 0.5 * (v.trace() + mu.squaredNorm()) - 0.5;
  var_n = 0.5 * (v * v).trace() + mu.dot(v * mu) - 0.25;
}

FeatureVector pnr_features_unchecked(const GaussianState& state) {
  const int modes = state.modes();
  FeatureVector f;
  f.scheme = Scheme::Pnr;
  f.values.resize(2 * modes);
  for (int m = 0; m < modes; ++m) {
    auto [mu, v] = mode_marginal(state, m);
    double nbar = 0.0, var_n = 0.0;
    pnr_from_marginal(mu, v, nbar, var_n);
    if (var_n < -1e-9) throw StateError("negative photon-number variance");
    f.values(m) = nbar;
    f.values(modes + m) = var_n;
  }
  return f;
}

FeatureVector homodyne_features_unchecked(const GaussianState& state) {
  const int modes = state.modes();
  FeatureVector f;
  f.scheme = Scheme::Homodyne;
  f.values.resize(5 * modes);
  for (int m = 0; m < modes; ++m) {
    auto [mu, v] = mode_marginal(state, m);
    const double xx = v(0, 0) + mu(0) * mu(0);
    const double pp = v(1, 1) + mu(1) * mu(1);
    if (xx < 0.0 || pp < 0.0) throw StateError("negative quadrature second moment");
    f.values(m) = mu(0);
    f.values(modes + m) = mu(1);
    f.values(2 * modes + m) = xx;
    f.values(3 * modes + m) = pp;
    f.values(4 * modes + m) = v(0, 1) + mu(0) * mu(1);
  }
  return f;
}

}  // namespace

FeatureVector pnr_features(const GaussianState& state) {
  check_physical(state);
  return pnr_features_unchecked(state);
}

FeatureVector homodyne_features(const GaussianState& state) {
  check_physical(state);
  return homodyne_features_unchecked(state);
}

FeatureVector extract_features(const GaussianState& state, Scheme scheme) {
  return scheme == Scheme::Pnr ? pnr_features(state) : homodyne_features(state);
}

Mat feature_matrix(const Mat& X, const SubstrateConfig& config) {
  if (X.cols() != config.modes) {
    throw InvalidArgument("feature_matrix: got " + std::to_string(X.cols()) +
                          " feature columns for " + std::to_string(config.modes) + " modes");
  }
  const std::vector<GateOp> gates = substrate_gates(config);

  // The covariance never depends on the encoded input (displacements only
  // shift the mean), so propagate it once and reuse it for every row.
  GaussianState base = vacuum_state(config.modes);
  for (const GateOp& g : gates) base = apply(base, g);
  check_physical(base);

  const int r_dim = feature_dim(config);
  Mat out(X.rows(), r_dim);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Vec x = X.row(i).transpose();
    try {
      require_finite(x);
      GaussianState state;
      state.cov = base.cov;
      state.mean = encoded_mean(x, config.encoding_scale);
      for (const GateOp& g : gates) state.mean = g.symplectic * state.mean + g.shift;
      const FeatureVector f = config.scheme == Scheme::Pnr ? pnr_features_unchecked(state)
                                                           : homodyne_features_unchecked(state);
      out.row(i) = f.values.transpose();
    } catch (const std::exception& e) {
      throw DataError("feature_matrix row " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::string substrate_to_json(const SubstrateConfig& config) {
  json j;
  j["modes"] = config.modes;
  j["s_max"] = config.s_max;
  j["thetas"] = config.thetas;
  j["encoding_scale"] = config.encoding_scale;
  j["seed"] = config.seed;
  j["scheme"] = to_string(config.scheme);
  return j.dump(2);
}

SubstrateConfig substrate_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("substrate JSON parse error: ") + e.what());
  }
  SubstrateConfig cfg;
  try {
    cfg.modes = j.at("modes").get<int>();
    cfg.s_max = j.at("s_max").get<double>();
    cfg.thetas = j.at("thetas").get<std::vector<double>>();
    cfg.encoding_scale = j.at("encoding_scale").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("substrate JSON missing field: ") + e.what());
  }
  if (cfg.modes < 1 || static_cast<int>(cfg.thetas.size()) != cfg.modes) {
    throw SchemaError("substrate JSON: thetas length does not match modes");
  }
  for (double t : cfg.thetas) {
    if (std::abs(t) > cfg.s_max) throw SchemaError("substrate JSON: theta outside [-s_max, s_max]");
  }
  // The stored angles must be regenerable from (modes, s_max, seed).
  const std::vector<double> regen = draw_thetas(cfg.modes, cfg.s_max, cfg.seed);
  for (int m = 0; m < cfg.modes; ++m) {
    if (regen[m] != cfg.thetas[m]) {
      throw SchemaError("substrate JSON: thetas are not regenerable from the stored seed");
    }
  }
  return cfg;
}

void save_substrate(const SubstrateConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << substrate_to_json(config) << "\n";
}

SubstrateConfig load_substrate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return substrate_from_json(ss.str());
}

std::string substrate_digest(const SubstrateConfig& config) {
  const std::uint64_t h = fnv1a(substrate_to_json(config));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace cvqelm
