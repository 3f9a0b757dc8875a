#include "iquad/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "iquad/field_io.hpp"
#include "iquad/quadrature.hpp"

namespace iquad {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

ScalarField random_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(g.size());
  for (double& x : v) x = d(rng);
  return ScalarField(g, std::move(v));
}

double rel_inf(const ScalarField& a, const ScalarField& b) {
  const double scale = std::max(a.max_abs(), b.max_abs());
  return scale > 0.0 ? (a - b).max_abs() / scale : 0.0;
}

double rel_l2(const ScalarField& a, const ScalarField& ref) {
  const double r = ref.norm();
  return r > 0.0 ? (a - ref).norm() / r : (a - ref).norm();
}

std::vector<std::tuple<int, int, double>> parse_zernike_list(const std::string& text) {
  std::vector<std::tuple<int, int, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int n = 0, m = 0;
    double rms = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream is(item);
    if (!(is >> n >> c1 >> m >> c2 >> rms) || c1 != ':' || c2 != ':')
      throw ConfigError("zernike entries look like n:m:rms, got '" + item + "'");
    try {
      validate(ZernikeIndex{n, m});
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    out.emplace_back(n, m, rms);
  }
  if (out.empty()) throw ConfigError("zernike list is empty");
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

void emit_field(const std::string& dir, const std::string& name, const ScalarField& f, FieldKind kind) {
  write_field_raw(dir + "/" + name + ".iqf", f, kind);
  write_field_png(dir + "/" + name + ".png", f);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

VerifyCheck upper(std::string name, double value, double thr) { return {std::move(name), value, thr, true}; }
VerifyCheck lower(std::string name, double value, double thr) { return {std::move(name), value, thr, false}; }

SensorSpec iquad_for(const Setup& s) {
  SensorSpec spec = s.spec;
  spec.delta_over_lambda = 0.25;
  spec.modulation.reset();
  return spec;
}

void oracle_checks(std::vector<VerifyCheck>& out, std::uint64_t seed) {
  // n = 12 raw loops against the factored forms
  {
    const Grid g = make_grid(12, 1.0, 2);
    const PupilMask p = circular_pupil(g, 6);
    const PupilMask d = full_detector(g);
    std::mt19937_64 rng(seed + 11);
    const ScalarField phi = p.apply(random_field(g, rng));
    const ScalarField psi = random_field(g, rng);
    out.push_back(upper("oracle_i2_factorization_n12", rel_l2(pv_i2(phi, p, d), pv_i2_raw(phi, p, d)), 1e-10));
    out.push_back(upper("oracle_i2prime_factorization_n12",
                        rel_l2(pv_frechet_i2(phi, psi, p, d), pv_frechet_i2_raw(phi, psi, p, d)), 1e-10));
  }
  // n = 16 adjoint identity of the oracle derivative pair
  {
    const Grid g = make_grid(16, 1.0, 2);
    const PupilMask p = circular_pupil(g, 8);
    const PupilMask d = full_detector(g);
    std::mt19937_64 rng(seed + 16);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      const ScalarField phi = random_field(g, rng), psi = random_field(g, rng), hat = random_field(g, rng);
      const double a = dot(pv_frechet(phi, psi, p, d), hat);
      const double b = dot(psi, pv_adjoint_l2(phi, hat, p, d));
      worst = std::max(worst, std::abs(a - b) / (psi.norm() * hat.norm()));
    }
    out.push_back(upper("oracle_adjoint_identity_n16", worst, 1e-9));
  }
  // spectral path against the periodic staggered lattice sums on band-limited inputs
  {
    QuadratureScheme sch = QuadratureScheme::offset();
    sch.periodic = true;
    std::vector<std::array<double, 3>> errs;
    for (int n : {16, 32}) {
      const Grid g = make_grid(n, 1.0 / n, 1);
      const PupilMask full = full_detector(g);
      const SensorSpec spec = make_spec(full, full, 0.25);
      std::vector<double> v(g.size());
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          v[static_cast<std::size_t>(r) * n + c] =
              0.4 * std::sin(2 * M_PI * (2 * c + r) / n + 0.3) + 0.3 * std::cos(2 * M_PI * (c - 2 * r) / n + 1.1);
      const ScalarField f(g, v);
      errs.push_back({rel_l2(pv_hilbert2d(f, sch), hilbert2d(f)), rel_l2(pv_i1(f, full, sch), i1_apply(f, spec)),
                      rel_l2(pv_ilin(f, full, sch), ilin_apply_with(f, spec, hilbert_multiplier(g)))});
    }
    const char* names[] = {"hilbert", "i1", "ilin"};
    for (int k = 0; k < 3; ++k) {
      out.push_back(upper(std::string("oracle_") + names[k] + "_agreement_n32", errs[1][k], 0.10));
      out.push_back(upper(std::string("oracle_") + names[k] + "_improves", errs[1][k] < errs[0][k] ? 0.0 : 1.0, 0.0));
    }
  }
}

}  // namespace

Setup make_setup(const RunConfig& cfg) {
  validate(cfg);
  const Grid g = make_grid(cfg.n, cfg.pitch, cfg.pad);
  const int d = cfg.diameter > 0 ? cfg.diameter : cfg.n / cfg.pad;
  SensorSpec spec = make_spec(circular_pupil(g, d), full_detector(g), cfg.delta, cfg.lambda);
  spec.axis_policy = cfg.axis_policy == "literal" ? AxisPolicy::kLiteral : AxisPolicy::kMean;
  if (cfg.modulation != "none")
    spec.modulation = make_modulation(g, parse_modulation_profile(cfg.modulation), cfg.modulation_radius);
  return {g, spec};
}

ScalarField load_phase(const RunConfig& cfg, const Setup& s) {
  ScalarField phi;
  if (cfg.phase == "zernike") {
    phi = ScalarField::zeros(s.grid);
    for (const auto& [n, m, rms] : parse_zernike_list(cfg.zernikes))
      phi = phi + zernike_mode(s.grid, s.spec.pupil, {n, m}, rms);
  } else if (cfg.phase == "screen") {
    phi = s.spec.pupil.apply(kolmogorov_screen(s.grid, {cfg.r0, cfg.L0, cfg.seed, 3}));
  } else {
    if (!fs::exists(cfg.phase_file)) throw IoError("phase file not found: " + cfg.phase_file);
    const StoredField sf = read_field_raw(cfg.phase_file, cfg.pad);
    if (sf.field.n() != cfg.n || sf.field.grid().pitch != cfg.pitch)
      throw ConfigError("phase file grid does not match n/pitch in the config");
    phi = sf.field;
  }
  if (cfg.phase_rms > 0.0) {
    phi = remove_piston(phi, s.spec.pupil);
    const double cur = pupil_rms(phi, s.spec.pupil);
    if (cur > 0.0) phi = (cfg.phase_rms / cur) * phi;
  }
  return phi;
}

std::vector<VerifyCheck> run_verify_suite(const RunConfig& cfg) {
  std::vector<VerifyCheck> out;
  if (cfg.verify_tier == "oracle16") {
    oracle_checks(out, cfg.seed);
    return out;
  }
  const Setup setup = make_setup(cfg);
  const SensorSpec spec = iquad_for(setup);
  const Grid& g = setup.grid;
  const PupilMask& pupil = spec.pupil;
  std::mt19937_64 rng(cfg.seed);
  const Multiplier h = cfg.mutation == "hilbert_sign" ? -hilbert_multiplier(g) : hilbert_multiplier(g);

  {
    double worst3 = 0.0, worst_ref = 0.0;
    const ComplexField otf = fqpm_otf(g, 0.25);
    for (int k = 0; k < 5; ++k) {
      const ScalarField phi = random_zernike_phase(g, pupil, 5, 1.0, cfg.seed * 131 + k);
      worst3 = std::max(worst3, rel_inf(fourier_filter_intensity(phi, otf, spec).field(),
                                        iquad_intensity_closed_form(phi, spec)));
    }
    const ScalarField zero = ScalarField::zeros(g);
    const ScalarField hchi = hilbert2d(pupil.field());
    worst_ref = rel_inf(fourier_filter_intensity(zero, otf, spec).field(),
                        0.5 * (hchi * hchi + pupil.field() * pupil.field()));
    out.push_back(upper("closed_form_intensity", worst3, 1e-12));
    out.push_back(upper("reference_intensity", worst_ref, 1e-12));
  }
  {
    const ScalarField phi = random_zernike_phase(g, pupil, 5, 1.0, cfg.seed + 7);
    const DoublePaths paths = double_iquad_paths(phi, spec);
    const ScalarField di = paths.plus - paths.minus;
    const ScalarField i1 = i1_apply_with(phi, spec, h);
    const double scale = std::max(paths.plus.max_abs(), paths.minus.max_abs());
    out.push_back(upper("double_iquad_identity", (di - i1).max_abs() / scale, 1e-12));
    double outside = 0.0;
    for (std::size_t i = 0; i < di.values().size(); ++i)
      if (!pupil.contains(i)) outside = std::max(outside, std::abs(di[i]));
    out.push_back(upper("double_iquad_outside_pupil", outside / scale, 1e-12));
  }
  {
    const ScalarField f = random_field(g, rng), q = random_field(g, rng);
    const ScalarField hh = apply(h, apply(h, f));
    const ScalarField pf = off_axis_projector(f);
    out.push_back(upper("hilbert_involution", (hh - pf).max_abs() / f.max_abs(), 1e-12));
    out.push_back(upper("hilbert_energy", std::abs(apply(h, f).norm() - pf.norm()) / pf.norm(), 1e-12));
    const double a = dot(apply(h, f), q), b = dot(f, apply(h, q));
    out.push_back(upper("hilbert_symmetry", std::abs(a - b) / (f.norm() * q.norm()), 1e-12));
  }
  {
    const LinearOperator op = ilin_with(spec, h, "ilin");
    out.push_back(upper("ilin_self_adjoint", verify_adjoint(op, 20, cfg.seed + 3).worst_defect, 1e-10));
    const ScalarField y = op.apply(random_field(g, rng));
    double outside = 0.0;
    for (std::size_t i = 0; i < y.values().size(); ++i)
      if (!pupil.contains(i)) outside = std::max(outside, std::abs(y[i]));
    out.push_back(upper("ilin_support", outside, 0.0));
    const ScalarField psi = random_zernike_phase(g, pupil, 4, 1.0, cfg.seed + 5);
    out.push_back(upper("frechet_zero_is_ilin",
                        rel_inf(frechet(ScalarField::zeros(g), spec).apply(psi), op.apply(psi)), 1e-12));
  }
  {
    const ScalarField phi = random_zernike_phase(g, pupil, 4, 0.5, cfg.seed + 21);
    const ScalarField psi = random_zernike_phase(g, pupil, 4, 1.0, cfg.seed + 22);
    const LinearOperator d = frechet(phi, spec);
    const ScalarField m0 = meta_intensity(phi, spec).field();
    const ScalarField dpsi = d.apply(psi);
    std::vector<double> ts = {1e-1, 3e-2, 1e-2, 3e-3}, rem;
    for (double t : ts) rem.push_back((meta_intensity(phi + t * psi, spec).field() - m0 - t * dpsi).norm());
    out.push_back(upper("frechet_taylor_slope_error", std::abs(fit_loglog_slope(ts, rem) - 2.0), 0.1));
  }
  {
    SensorSpec lit = spec;
    lit.axis_policy = AxisPolicy::kLiteral;
    const ScalarField phi = random_zernike_phase(g, pupil, 5, 1.0, cfg.seed + 31);
    double worst = 0.0;
    for (double dol : {0.0, 0.25, 0.5, -0.25}) {
      const ComplexField a = fourier_filter_field(phi, fqpm_otf(g, dol, AxisPolicy::kLiteral), lit);
      worst = std::max(worst, std::abs(flux(a.abs2()) - pupil_flux(pupil)) / pupil_flux(pupil));
    }
    out.push_back(upper("flux_conservation_unit_modulus", worst, 1e-12));
  }
  {
    // fixed reference geometry, independent of the run grid
    const Grid rg = make_grid(64, 0.25, 2);
    const auto rows = sensitivity_scan(iquad_spec(circular_pupil(rg, 32)), modes_up_to_order(6, false), 1e-3);
    double z22 = 0.0;
    for (const auto& r : rows)
      if (r.mode == ZernikeIndex{2, 2}) z22 = r.response;
    out.push_back(upper("z22_sensitivity_ratio", z22 / median_response(rows), 0.1));
  }
  {
    SensorSpec mod = spec;
    mod.modulation = make_modulation(g, ModulationProfile::kDelta, 0.0);
    const ScalarField phi = random_zernike_phase(g, pupil, 4, 0.5, cfg.seed + 41);
    out.push_back(upper("modulation_delta_limit",
                        rel_inf(modulated_meta_intensity(phi, mod).field(), meta_intensity(phi, spec).field()), 1e-12));
  }
  {
    const PixelBudget b = pixel_budget(random_zernike_phase(g, pupil, 4, 0.1, cfg.seed + 51), spec);
    out.push_back(lower("pwfs_to_iquad_pixel_ratio", b.ratio(), 3.8));
  }
  oracle_checks(out, cfg.seed);
  return out;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  const auto checks = run_verify_suite(cfg);
  ojson table = ojson::array();
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.pass();
    log << (c.pass() ? "PASS " : "FAIL ") << c.name << " value=" << fmt(c.value)
        << (c.upper_bound ? " <= " : " >= ") << fmt(c.threshold) << "\n";
    table.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold},
                     {"bound", c.upper_bound ? "upper" : "lower"}, {"pass", c.pass()}});
  }
  ensure_dir(cfg.out);
  ojson doc = {{"tier", cfg.verify_tier}, {"mutation", cfg.mutation}, {"all_pass", ok}, {"checks", table}};
  write_text(cfg.out + "/verify.json", doc.dump(2) + "\n");
  return ok ? kExitOk : kExitInvariant;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const SensorSpec spec = iquad_for(s);
  const ScalarField phi = load_phase(cfg, s);
  const ScalarField zero = ScalarField::zeros(s.grid);
  const ComplexField otf = fqpm_otf(s.grid, 0.25, spec.axis_policy);
  const ScalarField I = fourier_filter_intensity(phi, otf, spec).field();
  const ScalarField I0 = fourier_filter_intensity(zero, otf, spec).field();
  const ScalarField m = meta_intensity(phi, spec).field();
  const DoublePaths paths = double_iquad_paths(phi, spec);
  const ScalarField dI = paths.plus - paths.minus;

  ensure_dir(cfg.out);
  emit_field(cfg.out, "phase", phi, FieldKind::kPhase);
  emit_field(cfg.out, "intensity", I, FieldKind::kIntensity);
  emit_field(cfg.out, "reference_intensity", I0, FieldKind::kIntensity);
  emit_field(cfg.out, "meta_intensity", m, FieldKind::kMetaIntensity);
  emit_field(cfg.out, "intensity_plus", paths.plus, FieldKind::kIntensity);
  emit_field(cfg.out, "intensity_minus", paths.minus, FieldKind::kIntensity);
  emit_field(cfg.out, "double_difference", dI, FieldKind::kDoubleDifference);

  const double fp = pupil_flux(spec.pupil);
  const ScalarField hu2 = fourier_filter_field(phi, fqpm_otf(s.grid, 0.5, spec.axis_policy), spec).abs2();
  SensorSpec lit = spec;
  lit.axis_policy = AxisPolicy::kLiteral;
  const DoublePaths lp = double_iquad_paths(phi, lit);
  ojson man;
  man["n"] = s.grid.n;
  man["pitch"] = s.grid.pitch;
  man["pupil_diameter"] = spec.pupil.diameter();
  man["axis_policy"] = cfg.axis_policy;
  man["flux_pupil"] = fp;
  man["flux_intensity"] = flux(I);
  man["flux_reference_intensity"] = flux(I0);
  man["flux_plus"] = flux(paths.plus);
  man["flux_minus"] = flux(paths.minus);
  man["flux_plus_minus"] = flux(paths.plus) + flux(paths.minus);
  // I+ + I- = (|H U|^2 + chi^2) / 2; the filtered field |HU|^2 comes from the delta = lambda/2 path
  man["flux_beam_splitter_model"] = 0.5 * (flux(hu2) + fp);
  man["flux_plus_minus_literal_otf"] = flux(lp.plus) + flux(lp.minus);
  man["norm_phase"] = phi.norm();
  man["norm_meta_intensity"] = m.norm();
  man["norm_double_difference"] = dI.norm();
  man["max_abs_double_difference_outside_pupil"] = [&] {
    double mx = 0.0;
    for (std::size_t i = 0; i < dI.values().size(); ++i)
      if (!spec.pupil.contains(i)) mx = std::max(mx, std::abs(dI[i]));
    return mx;
  }();
  write_text(cfg.out + "/manifest.json", man.dump(2) + "\n");
  write_text(cfg.out + "/config.cfg", serialize_config(cfg));
  log << "wrote simulation outputs to " << cfg.out << "\n";
  return kExitOk;
}

int cmd_reconstruct(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const SensorSpec spec = iquad_for(s);
  const ScalarField truth = load_phase(cfg, s);
  const Method method = parse_method(cfg.method);
  ReconstructionConfig rc;
  rc.method = method;
  if (cfg.tau > 0.0) rc.tau = cfg.tau;
  rc.max_iters = cfg.max_iters;
  rc.residual_tol = cfg.residual_tol;
  rc.s = cfg.s;
  rc.modal_basis_size = cfg.modal_order;
  if (cfg.alpha >= 0.0) rc.alpha = cfg.alpha;
  rc.forward = parse_forward_model(cfg.forward);

  const bool nonlinear_data = cfg.data_model == "nonlinear" || method == Method::kLandweberNonlinear;
  const Measurement data = nonlinear_data
                               ? Measurement{MeasurementKind::kDoubleDifference,
                                             {forward_apply(truth, spec, rc.forward)}, pupil_flux(spec.pupil)}
                               : Measurement{MeasurementKind::kDoubleDifference, {ilin(spec).apply(truth)},
                                             pupil_flux(spec.pupil)};
  const LinearOperator base = ilin(spec);
  const LinearOperator op = cfg.domain == "hs" ? with_sobolev_domain(base, cfg.s) : base;

  ensure_dir(cfg.out);
  ReconstructionReport rep;
  ojson extra;
  if (method == Method::kModal) {
    const auto basis = modes_up_to_order(cfg.modal_order, false);
    const InteractionMatrix im = interaction_matrix(base, basis, spec.pupil);
    write_matrix(cfg.out + "/interaction_matrix.bin", im);
    rep = modal_solve(data, im, rc.alpha);
    // reference coefficients from a least-squares projection of the truth on the basis
    Eigen::MatrixXd z(static_cast<Eigen::Index>(im.pixels.size()), static_cast<Eigen::Index>(basis.size()));
    Eigen::VectorXd t(static_cast<Eigen::Index>(im.pixels.size()));
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const ScalarField zj = zernike_mode(s.grid, spec.pupil, basis[j], 1.0);
      for (std::size_t r = 0; r < im.pixels.size(); ++r) z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = zj[im.pixels[r]];
    }
    const ScalarField tp = remove_piston(truth, spec.pupil);
    for (std::size_t r = 0; r < im.pixels.size(); ++r) t(static_cast<Eigen::Index>(r)) = tp[im.pixels[r]];
    const Eigen::VectorXd ref = z.colPivHouseholderQr().solve(t);
    std::ostringstream csv;
    csv << "mode,n,m,true,estimate,abs_error\n";
    ojson table = ojson::array();
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double tv = ref(static_cast<Eigen::Index>(j)), ev = rep.coefficients[j];
      csv << basis[j].label() << ',' << basis[j].n << ',' << basis[j].m << ',' << fmt(tv) << ',' << fmt(ev) << ','
          << fmt(std::abs(ev - tv)) << "\n";
      table.push_back({{"mode", basis[j].label()}, {"true", tv}, {"estimate", ev}, {"abs_error", std::abs(ev - tv)}});
    }
    write_text(cfg.out + "/modal_errors.csv", csv.str());
    extra["modal_errors"] = table;
    extra["gram_condition"] = gram_condition(im);
  } else if (method == Method::kLandweberNonlinear) {
    rep = landweber_nonlinear(data, spec, rc);
    ReconstructionConfig lc = rc;
    lc.method = Method::kLandweberLinear;
    lc.tau.reset();
    const ReconstructionReport lin = landweber_linear(data, op, lc);
    std::ostringstream csv;
    csv << "iteration,linear_residual,nonlinear_residual\n";
    const std::size_t len = std::max(lin.residuals.size(), rep.residuals.size());
    for (std::size_t k = 0; k < len; ++k) {
      csv << k << ',' << (k < lin.residuals.size() ? fmt(lin.residuals[k]) : "") << ','
          << (k < rep.residuals.size() ? fmt(rep.residuals[k]) : "") << "\n";
    }
    write_text(cfg.out + "/residual_comparison.csv", csv.str());
    extra["linear_model_residual"] = model_residual(data, lin.estimate, spec, rc.forward);
    extra["nonlinear_model_residual"] = model_residual(data, rep.estimate, spec, rc.forward);
    extra["linear_relative_error"] = relative_error_omega(lin.estimate, truth, spec.pupil);
  } else if (method == Method::kCg) {
    rep = cg_normal(data, op, rc);
  } else {
    rep = landweber_linear(data, op, rc);
  }
  attach_error(rep, truth, spec.pupil);

  std::ostringstream res;
  res << "iteration,residual\n";
  for (std::size_t k = 0; k < rep.residuals.size(); ++k) res << k << ',' << fmt(rep.residuals[k]) << "\n";
  write_text(cfg.out + "/residuals.csv", res.str());
  emit_field(cfg.out, "truth", truth, FieldKind::kPhase);
  emit_field(cfg.out, "estimate", rep.estimate, FieldKind::kPhase);
  ojson doc = ojson::parse(to_json(rep, false));
  for (auto it = extra.begin(); it != extra.end(); ++it) doc[it.key()] = it.value();
  write_text(cfg.out + "/report.json", doc.dump(2) + "\n");
  log << rep.method << ": iterations=" << rep.iterations << " residual=" << fmt(rep.final_residual())
      << " relative_error=" << fmt(rep.relative_error.value_or(-1.0)) << (rep.stagnated ? " [stagnated]" : "")
      << (rep.unobservable ? " [unobservable]" : "") << "\n";
  return kExitOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const SensorSpec spec = iquad_for(s);
  const ScalarField phi = load_phase(cfg, s);
  const PixelBudget b = pixel_budget(phi, spec);
  const Measurement slopes = pwfs_slopes(phi, spec);
  const ScalarField lin = ilin(spec).apply(phi);

  ensure_dir(cfg.out);
  emit_field(cfg.out, "phase", phi, FieldKind::kPhase);
  emit_field(cfg.out, "pwfs_sx", slopes.fields[0], FieldKind::kSlopes);
  emit_field(cfg.out, "pwfs_sy", slopes.fields[1], FieldKind::kSlopes);
  emit_field(cfg.out, "iquad_ilin", lin, FieldKind::kDoubleDifference);

  // a phase depending on x only: s_y vanishes
  std::vector<double> sep(s.grid.size());
  for (int r = 0; r < s.grid.n; ++r)
    for (int c = 0; c < s.grid.n; ++c)
      sep[static_cast<std::size_t>(r) * s.grid.n + c] = std::sin(2 * M_PI * 3 * c / s.grid.n);
  const Measurement sep_slopes = pwfs_slopes(ScalarField(s.grid, sep), spec);
  emit_field(cfg.out, "separable_sy", sep_slopes.fields[1], FieldKind::kSlopes);

  const auto modes = modes_up_to_order(cfg.scan_max_order, false);
  const auto iq = sensitivity_scan(spec, modes, cfg.scan_amplitude);
  const auto pw = pwfs_sensitivity_scan(spec, modes, cfg.scan_amplitude);
  ojson table = ojson::array();
  for (std::size_t k = 0; k < modes.size(); ++k)
    table.push_back({{"mode", iq[k].mode.label()}, {"iquad", iq[k].response}, {"pwfs", pw[k].response}});
  ojson doc;
  doc["pixels"] = {{"pupil", b.pupil_pixels}, {"iquad_signal", b.iquad_signal_pixels},
                   {"iquad_required", b.iquad_required}, {"pwfs_required", b.pwfs_required}, {"ratio", b.ratio()}};
  doc["separable_phase_max_abs_sy"] = sep_slopes.fields[1].max_abs();
  doc["separable_phase_max_abs_sx"] = sep_slopes.fields[0].max_abs();
  doc["sensitivity"] = table;
  doc["iquad_median"] = median_response(iq);
  doc["pwfs_median"] = median_response(pw);
  write_text(cfg.out + "/compare.json", doc.dump(2) + "\n");
  log << "pixel ratio pwfs/iquad = " << fmt(b.ratio()) << "\n";
  return kExitOk;
}

int cmd_scan(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const SensorSpec spec = iquad_for(s);
  const auto rows = sensitivity_scan(spec, modes_up_to_order(cfg.scan_max_order, false), cfg.scan_amplitude);
  const double med = median_response(rows);
  ensure_dir(cfg.out);
  std::ostringstream csv;
  csv << "mode,n,m,response,ratio_to_median\n";
  ojson table = ojson::array();
  for (const auto& r : rows) {
    csv << r.mode.label() << ',' << r.mode.n << ',' << r.mode.m << ',' << fmt(r.response) << ','
        << fmt(r.response / med) << "\n";
    table.push_back({{"mode", r.mode.label()}, {"response", r.response}, {"ratio_to_median", r.response / med}});
  }
  write_text(cfg.out + "/scan.csv", csv.str());
  write_text(cfg.out + "/scan.json", ojson{{"median", med}, {"amplitude", cfg.scan_amplitude}, {"rows", table}}.dump(2) + "\n");
  log << "scanned " << rows.size() << " modes, median response " << fmt(med) << "\n";
  return kExitOk;
}

int run_command(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    validate(cfg);
    if (cfg.command == "simulate") return cmd_simulate(cfg, log);
    if (cfg.command == "verify") return cmd_verify(cfg, log);
    if (cfg.command == "reconstruct") return cmd_reconstruct(cfg, log);
    if (cfg.command == "compare") return cmd_compare(cfg, log);
    if (cfg.command == "scan") return cmd_scan(cfg, log);
    err << "unknown command " << cfg.command << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitInvariant;
  }
}

}  // namespace iquad
