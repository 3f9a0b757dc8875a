#include "iquad/reconstruct.hpp"

#include <chrono>
#include <cmath>
#include <json.hpp>

namespace iquad {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ScalarField axpy(double a, const ScalarField& x, const ScalarField& y) { return y + a * x; }

// relative decrease over the trailing window is below 1e-3
bool stalled(const std::vector<double>& res, int window) {
  if (window <= 0 || static_cast<int>(res.size()) <= window) return false;
  const double before = res[res.size() - 1 - window], now = res.back();
  return before - now < 1e-3 * before;
}

ReconstructionReport start(const std::string& name, const Grid& g) {
  ReconstructionReport rep;
  rep.method = name;
  rep.estimate = ScalarField::zeros(g);
  return rep;
}

void precheck(const LinearOperator& op) {
  const AdjointCheck chk = verify_adjoint(op, 3, 99);
  if (chk.worst_defect > 1e-8)
    throw SolverError("operator " + op.name + " fails the adjoint check (defect " + std::to_string(chk.worst_defect) +
                      ")");
}

// true when A* d carries no information about the phase
bool no_signal(const LinearOperator& op, const ScalarField& d, double norm_sq) {
  const ScalarField g = op.adjoint_apply(d);
  const double gn = std::sqrt(std::max(0.0, op.domain_inner(g, g)));
  return gn <= 1e-12 * std::sqrt(norm_sq) * d.norm();
}

}  // namespace

Method parse_method(const std::string& s) {
  if (s == "landweber-linear") return Method::kLandweberLinear;
  if (s == "landweber-nonlinear") return Method::kLandweberNonlinear;
  if (s == "cg") return Method::kCg;
  if (s == "modal") return Method::kModal;
  throw InvalidArgument("unknown reconstruction method: " + s);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kLandweberLinear: return "landweber-linear";
    case Method::kLandweberNonlinear: return "landweber-nonlinear";
    case Method::kCg: return "cg";
    case Method::kModal: return "modal";
  }
  return "landweber-linear";
}

ForwardModel parse_forward_model(const std::string& s) {
  if (s == "double") return ForwardModel::kDoubleIquad;
  if (s == "meta") return ForwardModel::kMetaIntensity;
  throw InvalidArgument("unknown forward model: " + s);
}

std::string to_string(ForwardModel f) { return f == ForwardModel::kDoubleIquad ? "double" : "meta"; }

ReconstructionReport landweber_linear(const Measurement& data, const LinearOperator& op,
                                      const ReconstructionConfig& cfg) {
  const auto t0 = Clock::now();
  const ScalarField& d = data.field();
  require_same_grid(d.grid(), op.range, "data vs operator range");
  ReconstructionReport rep = start("landweber-linear", op.domain);
  const double dn = d.norm();
  if (dn == 0.0) {
    rep.residuals = {0.0};
    rep.converged = true;
    rep.unobservable = true;
    rep.wall_time_s = seconds_since(t0);
    return rep;
  }
  precheck(op);
  rep.norm_estimate = estimate_norm_squared(op);
  rep.tau = cfg.tau.value_or(1.0 / rep.norm_estimate);
  if (!(rep.tau > 0.0) || rep.tau >= 2.0 / rep.norm_estimate)
    throw SolverError("step size " + std::to_string(rep.tau) + " violates tau < 2/|A|^2 = " +
                      std::to_string(2.0 / rep.norm_estimate));
  if (no_signal(op, d, rep.norm_estimate)) {
    rep.residuals = {1.0};
    rep.unobservable = rep.stagnated = true;
    rep.wall_time_s = seconds_since(t0);
    return rep;
  }

  ScalarField x = rep.estimate;
  ScalarField r = d;
  rep.residuals.push_back(1.0);
  for (int k = 1; k <= cfg.max_iters; ++k) {
    x = axpy(rep.tau, op.adjoint_apply(r), x);
    r = d - op.apply(x);
    rep.residuals.push_back(r.norm() / dn);
    rep.iterations = k;
    if (rep.residuals.back() <= cfg.residual_tol) {
      rep.converged = true;
      break;
    }
  }
  rep.estimate = x;
  if (!rep.converged) rep.stagnated = stalled(rep.residuals, cfg.stagnation_window);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

ReconstructionReport cg_normal(const Measurement& data, const LinearOperator& op, const ReconstructionConfig& cfg) {
  const auto t0 = Clock::now();
  const ScalarField& d = data.field();
  require_same_grid(d.grid(), op.range, "data vs operator range");
  ReconstructionReport rep = start("cg", op.domain);
  const double dn = d.norm();
  if (dn == 0.0) {
    rep.residuals = {0.0};
    rep.converged = true;
    rep.unobservable = true;
    rep.wall_time_s = seconds_since(t0);
    return rep;
  }
  precheck(op);
  rep.norm_estimate = estimate_norm_squared(op);
  if (no_signal(op, d, rep.norm_estimate)) {
    rep.residuals = {1.0};
    rep.unobservable = rep.stagnated = true;
    rep.wall_time_s = seconds_since(t0);
    return rep;
  }

  ScalarField x = rep.estimate;
  ScalarField r = d;
  ScalarField s = op.adjoint_apply(r);
  ScalarField p = s;
  double gamma = op.domain_inner(s, s);
  rep.residuals.push_back(1.0);
  for (int k = 1; k <= cfg.max_iters; ++k) {
    const ScalarField q = op.apply(p);
    const double qq = dot(q, q);
    if (!(qq > 1e-30 * gamma * rep.norm_estimate)) {
      rep.breakdown = true;
      break;
    }
    const double alpha = gamma / qq;
    x = axpy(alpha, p, x);
    r = axpy(-alpha, q, r);
    rep.residuals.push_back(r.norm() / dn);
    rep.iterations = k;
    if (rep.residuals.back() <= cfg.residual_tol) {
      rep.converged = true;
      break;
    }
    if (stalled(rep.residuals, cfg.stagnation_window)) {
      rep.stagnated = true;
      break;
    }
    s = op.adjoint_apply(r);
    const double gnew = op.domain_inner(s, s);
    p = axpy(gnew / gamma, p, s);
    gamma = gnew;
  }
  rep.estimate = x;
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

ScalarField forward_apply(const ScalarField& phase, const SensorSpec& spec, ForwardModel model) {
  if (model == ForwardModel::kDoubleIquad) return i1_apply(phase, spec);
  return meta_intensity(phase, spec).field();
}

double model_residual(const Measurement& data, const ScalarField& estimate, const SensorSpec& spec,
                      ForwardModel model) {
  const ScalarField& d = data.field();
  const double dn = d.norm();
  const double rn = (d - forward_apply(estimate, spec, model)).norm();
  return dn > 0.0 ? rn / dn : rn;
}

ReconstructionReport landweber_nonlinear(const Measurement& data, const SensorSpec& spec,
                                         const ReconstructionConfig& cfg) {
  const auto t0 = Clock::now();
  check_sobolev_index(cfg.s);
  require_iquad(spec);
  const ScalarField& d = data.field();
  require_same_grid(d.grid(), spec.grid(), "data vs sensor");
  ReconstructionReport rep = start("landweber-nonlinear", spec.grid());
  const double dn = d.norm();
  if (dn == 0.0) {
    rep.residuals = {0.0};
    rep.converged = true;
    rep.unobservable = true;
    rep.wall_time_s = seconds_since(t0);
    return rep;
  }
  const LinearOperator lin = with_sobolev_domain(ilin(spec), cfg.s);
  rep.norm_estimate = estimate_norm_squared(lin);
  rep.tau = cfg.tau.value_or(1.0 / rep.norm_estimate);
  if (!(rep.tau > 0.0)) throw SolverError("step size must be positive");
  const Multiplier e = sobolev_multiplier(spec.grid(), cfg.s);

  ScalarField x = rep.estimate;
  ScalarField r = d - forward_apply(x, spec, cfg.forward);
  rep.residuals.push_back(r.norm() / dn);
  const double r0 = rep.residuals.back();
  double best = r0;
  ScalarField best_x = x;
  int since_best = 0;
  for (int k = 1; k <= cfg.max_iters; ++k) {
    ScalarField g = cfg.forward == ForwardModel::kDoubleIquad ? frechet_i1_apply(x, r, spec)
                                                              : frechet(x, spec).adjoint_apply(r);
    x = axpy(rep.tau, apply(e, g), x);
    r = d - forward_apply(x, spec, cfg.forward);
    const double rel = r.norm() / dn;
    rep.residuals.push_back(rel);
    rep.iterations = k;
    if (rel < best) {
      best = rel;
      best_x = x;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (rel <= cfg.residual_tol) {
      rep.converged = true;
      break;
    }
    // the forward model is bounded, so a blow-up can also show as a residual stuck above the start
    if (rel > 10.0 * best || (since_best >= cfg.stagnation_window && rel > r0)) {
      rep.diverged = true;
      x = best_x;
      break;
    }
  }
  rep.estimate = x;
  if (!rep.converged && !rep.diverged) rep.stagnated = stalled(rep.residuals, cfg.stagnation_window);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

ReconstructionReport modal_solve(const Measurement& data, const InteractionMatrix& matrix,
                                 std::optional<double> regularization) {
  const auto t0 = Clock::now();
  const ScalarField& f = data.field();
  require_same_grid(f.grid(), matrix.grid, "data vs interaction matrix");
  const auto modes = static_cast<Eigen::Index>(matrix.basis.size());
  Eigen::VectorXd d(static_cast<Eigen::Index>(matrix.pixels.size()));
  for (std::size_t i = 0; i < matrix.pixels.size(); ++i) d(static_cast<Eigen::Index>(i)) = f[matrix.pixels[i]];

  const Eigen::MatrixXd g = matrix.m.transpose() * matrix.m;
  const double alpha = regularization.value_or(1e-6 * g.trace() / static_cast<double>(modes));
  if (alpha < 0.0) throw InvalidArgument("regularization must be >= 0");
  const Eigen::MatrixXd a = g + alpha * Eigen::MatrixXd::Identity(modes, modes);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  const auto diag = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || diag.minCoeff() <= 1e-13 * std::max(diag.maxCoeff(), 1e-300))
    throw SolverError("normal matrix is singular; use a regularization alpha > 0");
  const Eigen::VectorXd c = ldlt.solve(matrix.m.transpose() * d);

  ReconstructionReport rep = start("modal", matrix.grid);
  rep.basis = matrix.basis;
  rep.coefficients.assign(c.data(), c.data() + c.size());
  ScalarField phase = ScalarField::zeros(matrix.grid);
  for (std::size_t j = 0; j < matrix.basis.size(); ++j)
    phase = phase + rep.coefficients[j] * zernike_mode(matrix.grid, matrix.pupil, matrix.basis[j], 1.0);
  rep.estimate = phase;
  const double dn = d.norm();
  rep.residuals = {dn > 0.0 ? (d - matrix.m * c).norm() / dn : 0.0};
  rep.iterations = 1;
  rep.converged = true;
  rep.unobservable = dn == 0.0;
  rep.regularization = alpha;
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

double relative_error_omega(const ScalarField& estimate, const ScalarField& truth, const PupilMask& pupil) {
  const ScalarField t = remove_piston(truth, pupil);
  const ScalarField e = remove_piston(estimate, pupil);
  const double tn = t.norm();
  if (tn <= 1e-12 * std::max(pupil.apply(truth).norm(), 1e-300)) return 1.0;
  return (e - t).norm() / tn;
}

void attach_error(ReconstructionReport& report, const ScalarField& truth, const PupilMask& pupil) {
  report.relative_error = relative_error_omega(report.estimate, truth, pupil);
}

std::string to_json(const ReconstructionReport& r, bool include_timing) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["iterations"] = r.iterations;
  j["tau"] = r.tau;
  j["norm_estimate"] = r.norm_estimate;
  if (r.regularization) j["regularization"] = *r.regularization;
  j["final_residual"] = r.final_residual();
  j["residuals"] = r.residuals;
  if (r.relative_error) j["relative_error"] = *r.relative_error;
  j["converged"] = r.converged;
  j["stagnated"] = r.stagnated;
  j["unobservable"] = r.unobservable;
  j["breakdown"] = r.breakdown;
  j["diverged"] = r.diverged;
  if (!r.coefficients.empty()) {
    nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.coefficients.size(); ++i)
      coeffs.push_back({{"mode", r.basis.at(i).label()}, {"n", r.basis[i].n}, {"m", r.basis[i].m},
                        {"coefficient", r.coefficients[i]}});
    j["coefficients"] = coeffs;
  }
  if (include_timing) j["wall_time_s"] = r.wall_time_s;
  return j.dump(2);
}

}  // namespace iquad
