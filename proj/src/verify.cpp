#include "cvqelm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvqelm/data.hpp"
#include "cvqelm/errors.hpp"
#include "cvqelm/fock.hpp"
#include "cvqelm/gaussian.hpp"
#include "cvqelm/mlp.hpp"
#include "cvqelm/readout.hpp"
#include "cvqelm/rng.hpp"
#include "cvqelm/substrate.hpp"

namespace cvqelm {

namespace {

CheckResult make_result(const std::string& name, double deviation, double tolerance,
                        const std::string& detail = "") {
  CheckResult r;
  r.name = name;
  r.deviation = deviation;
  r.tolerance = tolerance;
  r.pass = deviation <= tolerance;
  r.detail = detail;
  return r;
}

GateOp random_gate(int modes, RngStream& rng) {
  switch (rng.next_below(4)) {
    case 0: {
      const int m = int(rng.next_below(modes));
      return displacement_gate(modes, m, rng.next_uniform(-1.5, 1.5), rng.next_uniform(-1.5, 1.5));
    }
    case 1: {
      const int m = int(rng.next_below(modes));
      return squeeze_gate(modes, m, rng.next_uniform(-0.8, 0.8));
    }
    case 2: {
      const int a = int(rng.next_below(modes));
      int b = int(rng.next_below(modes - 1));
      if (b >= a) ++b;
      return beamsplitter_gate(modes, a, b, rng.next_uniform(-M_PI, M_PI),
                               rng.next_uniform(-M_PI, M_PI));
    }
    default: {
      const int c = int(rng.next_below(modes));
      int t = int(rng.next_below(modes - 1));
      if (t >= c) ++t;
      return cx_gate(modes, c, t, rng.next_uniform(-2.0, 2.0));
    }
  }
}

}  // namespace

CheckResult check_symplectic_suite(int n_compositions) {
  RngStream rng(fnv1a("symplectic-suite"));
  double worst_symplectic = 0.0;
  double worst_purity = 0.0;
  double worst_physicality = 0.0;
  for (int it = 0; it < n_compositions; ++it) {
    const int modes = 2 + int(rng.next_below(2));
    GaussianState state = vacuum_state(modes);
    GateOp total = identity_gate(modes);
    const int depth = 1 + int(rng.next_below(5));
    for (int g = 0; g < depth; ++g) {
      const GateOp gate = random_gate(modes, rng);
      total = compose(total, gate);
      state = apply(state, gate);
    }
    worst_symplectic = std::max(worst_symplectic, symplectic_defect(total.symplectic));
    worst_purity = std::max(worst_purity, std::abs(purity_determinant(state) - 1.0));
    worst_physicality = std::max(worst_physicality, -physicality_min_eigenvalue(state));
  }
  std::ostringstream detail;
  detail << "symplectic " << worst_symplectic << " (tol 1e-12), purity " << worst_purity
         << " (tol 1e-9), physicality " << worst_physicality << " (tol 1e-10)";
  const bool pass =
      worst_symplectic <= 1e-12 && worst_purity <= 1e-9 && worst_physicality <= 1e-10;
  CheckResult r = make_result("symplectic/purity/physicality", worst_symplectic, 1e-12,
                              detail.str());
  r.pass = pass;
  return r;
}

CheckResult check_cx_decomposition(int n_samples, Mutation mutation) {
  RngStream rng(fnv1a("cx-decomposition"));
  double worst = 0.0;
  for (int it = 0; it < n_samples; ++it) {
    const double s = rng.next_uniform(-3.0, 3.0);
    GateOp direct = cx_gate(2, 0, 1, s);
    if (mutation == Mutation::FlipCxSign) {
      direct.symplectic(2, 0) = -s;  // injected fault for mutation sanity tests
    }
    const GateOp decomposed = cx_gate_decomposed(2, 0, 1, s);
    worst = std::max(worst,
                     (direct.symplectic - decomposed.symplectic).cwiseAbs().maxCoeff());
  }
  return make_result("cx decomposition identity", worst, 1e-10,
                     std::to_string(n_samples) + " random s in [-3,3]");
}

CheckResult check_cx_parameters() {
  const CxDecompositionParams p = cx_decomposition_params(2.0);
  const double dr = std::abs(p.r - (-std::asinh(1.0)));
  // |theta| = pi/8 at s = 2; this implementation uses the negative branch of
  // cos(2 theta) = -tanh(r), the one that satisfies the operator identity.
  const double dtheta = std::abs(std::abs(p.theta) - M_PI / 8.0);
  std::ostringstream detail;
  detail << "r = " << p.r << ", theta = " << p.theta << " (negative branch)";
  return make_result("cx decomposition parameters at s=2", std::max(dr, dtheta), 1e-12,
                     detail.str());
}

CheckResult check_gaussian_vs_fock(int n_draws, int cutoff) {
  RngStream rng(fnv1a("gaussian-vs-fock"));
  double worst = 0.0;
  double worst_tail = 0.0;
  for (int draw = 0; draw < n_draws; ++draw) {
    const SubstrateConfig pnr_cfg =
        draw_substrate(2, 1.0, rng.next_u64(), Scheme::Pnr, 1.0);
    Vec x(2);
    x << rng.next_uniform(-1.0, 1.0), rng.next_uniform(-1.0, 1.0);

    int d = cutoff;
    FockState fock;
    for (;;) {
      try {
        fock = simulate(x, pnr_cfg, d);
        break;
      } catch (const CutoffError&) {
        d *= 2;
        if (d > 128) throw;
      }
    }
    worst_tail = std::max(worst_tail, fock.tail_mass());
    const std::vector<ModeMoments> mm = oracle_moments(fock);

    const GaussianState state = forward(x, pnr_cfg);
    const FeatureVector pnr = pnr_features(state);
    const FeatureVector hom = homodyne_features(state);
    for (int m = 0; m < 2; ++m) {
      worst = std::max({worst, std::abs(pnr.values(m) - mm[m].nbar),
                        std::abs(pnr.values(2 + m) - mm[m].var_n),
                        std::abs(hom.values(m) - mm[m].x),
                        std::abs(hom.values(2 + m) - mm[m].p),
                        std::abs(hom.values(4 + m) - mm[m].xx),
                        std::abs(hom.values(6 + m) - mm[m].pp),
                        std::abs(hom.values(8 + m) - mm[m].xp)});
    }
  }
  std::ostringstream detail;
  detail << n_draws << " draws at M=2, cutoff " << cutoff << ", worst tail mass " << worst_tail;
  return make_result("gaussian moments vs fock oracle", worst, 1e-6, detail.str());
}

CheckResult check_feature_map_structure() {
  const SubstrateConfig cfg = draw_substrate(3, 1.0, 2024, Scheme::Pnr, 1.0);
  RngStream rng(fnv1a("feature-structure"));
  Vec x(3);
  x << rng.next_uniform(-1.0, 1.0), rng.next_uniform(-1.0, 1.0), rng.next_uniform(-1.0, 1.0);

  // Covariance must not depend on the encoded input.
  const GaussianState at_x = forward(x, cfg);
  const GaussianState at_zero = forward(Vec::Zero(3), cfg);
  const double cov_dev = (at_x.cov - at_zero.cov).cwiseAbs().maxCoeff();

  // PNR features are degree-2 polynomials in an input scaling t; interpolate
  // from t in {0, 1, -1} and predict the rest.
  const Vec f0 = pnr_features(forward(0.0 * x, cfg)).values;
  const Vec f1 = pnr_features(forward(1.0 * x, cfg)).values;
  const Vec fm1 = pnr_features(forward(-1.0 * x, cfg)).values;
  const Vec a = f0;
  const Vec b = 0.5 * (f1 - fm1);
  const Vec c = 0.5 * (f1 + fm1) - f0;
  double poly_dev = 0.0;
  for (double t : {2.0, -2.0, 3.0, 0.37}) {
    const Vec predicted = a + t * b + t * t * c;
    const Vec actual = pnr_features(forward(t * x, cfg)).values;
    poly_dev = std::max(poly_dev, (predicted - actual).cwiseAbs().maxCoeff());
  }
  std::ostringstream detail;
  detail << "covariance dev " << cov_dev << " (tol 1e-12), quadratic dev " << poly_dev
         << " (tol 1e-9)";
  CheckResult r = make_result("feature map structure", std::max(cov_dev, poly_dev), 1e-9,
                              detail.str());
  r.pass = cov_dev <= 1e-12 && poly_dev <= 1e-9;
  return r;
}

CheckResult check_ridge_optimality(int n_instances) {
  RngStream rng(fnv1a("ridge-optimality"));
  double worst_grad = 0.0;
  double worst_vs_oracle = 0.0;
  for (int it = 0; it < n_instances; ++it) {
    const int n = 20 + int(rng.next_below(60));
    const int p = 3 + int(rng.next_below(12));
    Mat z(n, p);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) z(i, j) = rng.next_normal();
      y[i] = int(rng.next_below(2));
    }
    const double lambda = std::pow(10.0, rng.next_uniform(-4.0, 0.0));
    const Vec eta = ridge_fit(z, y, {lambda, true});

    Vec t(n);
    for (int i = 0; i < n; ++i) t(i) = y[i] == 1 ? 1.0 : -1.0;
    const double scale = std::max(1.0, (z.transpose() * t).cwiseAbs().maxCoeff());
    worst_grad = std::max(worst_grad, ridge_gradient_norm(z, y, lambda, eta) / scale);

    // Independent dense route through the explicit inverse.
    const Mat normal =
        z.transpose() * z + lambda * Mat::Identity(p, p);
    const Vec oracle = normal.inverse() * (z.transpose() * t);
    worst_vs_oracle = std::max(worst_vs_oracle, (eta - oracle).cwiseAbs().maxCoeff());
  }
  std::ostringstream detail;
  detail << "scaled gradient " << worst_grad << " (tol 1e-8), vs dense solve " << worst_vs_oracle
         << " (tol 1e-9)";
  CheckResult r =
      make_result("ridge optimality", std::max(worst_grad, worst_vs_oracle), 1e-8, detail.str());
  r.pass = worst_grad <= 1e-8 && worst_vs_oracle <= 1e-9;
  return r;
}

CheckResult check_logistic_fixtures() {
  RngStream rng(fnv1a("logistic-fixtures"));
  const int n = 80;
  const int p = 6;
  Mat z(n, p);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z(i, j) = rng.next_normal();
    const double margin = z(i, 0) - 0.5 * z(i, 1) + 0.3 * rng.next_normal();
    y[i] = margin > 0.0 ? 1 : 0;
  }
  LogisticReport report;
  logistic_fit(z, y, 1e-2, 1e-8, 100, &report);
  double monotone_violation = 0.0;
  for (std::size_t i = 1; i < report.objective.size(); ++i) {
    monotone_violation =
        std::max(monotone_violation, report.objective[i - 1] - report.objective[i]);
  }
  std::ostringstream detail;
  detail << "final gradient " << report.gradient_norm << " (tol 1e-8), monotone violation "
         << monotone_violation << ", iterations " << report.iterations;
  CheckResult r = make_result("logistic optimality", report.gradient_norm, 1e-8, detail.str());
  r.pass = report.converged && monotone_violation <= 0.0;
  return r;
}

CheckResult check_mlp_gradient() {
  RngStream rng(fnv1a("mlp-gradient"));
  const int f = 4, h = 3, n = 8;
  MlpModel model = mlp_init(f, h, 99);
  Mat x(n, f);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < f; ++j) x(i, j) = rng.next_normal();
    y[i] = int(rng.next_below(2));
  }
  const double wd = 1e-3;
  const MlpGradient g = mlp_loss_gradient(model, x, y, wd);

  // Central finite differences over every parameter.
  const double eps = 1e-5;
  double worst_rel = 0.0;
  auto probe = [&](double* param, double analytic) {
    const double saved = *param;
    *param = saved + eps;
    const double up = mlp_loss_gradient(model, x, y, wd).loss;
    *param = saved - eps;
    const double down = mlp_loss_gradient(model, x, y, wd).loss;
    *param = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double rel = std::abs(numeric - analytic) / std::max(1e-8, std::abs(numeric));
    worst_rel = std::max(worst_rel, rel);
  };
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < f; ++j) probe(&model.w1(i, j), g.d_w1(i, j));
  }
  for (int i = 0; i < h; ++i) probe(&model.b1(i), g.d_b1(i));
  for (int i = 0; i < h; ++i) probe(&model.w2(i), g.d_w2(i));
  probe(&model.b2, g.d_b2);
  return make_result("mlp gradient vs finite differences", worst_rel, 1e-5,
                     "central differences, step 1e-5, relative error");
}

std::vector<CheckResult> run_verification(Mutation mutation) {
  std::vector<CheckResult> results;
  results.push_back(check_symplectic_suite());
  results.push_back(check_cx_decomposition(20, mutation));
  results.push_back(check_cx_parameters());
  results.push_back(check_gaussian_vs_fock());
  results.push_back(check_feature_map_structure());
  results.push_back(check_ridge_optimality());
  results.push_back(check_logistic_fixtures());
  results.push_back(check_mlp_gradient());
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::ostringstream out;
  for (const CheckResult& r : results) {
    out << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (deviation " << r.deviation
        << ", tolerance " << r.tolerance << ")";
    if (!r.detail.empty()) out << "  [" << r.detail << "]";
    out << "\n";
  }
  return out.str();
}

}  // namespace cvqelm
