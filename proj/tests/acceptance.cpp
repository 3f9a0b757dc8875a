// One line per acceptance criterion; exit status 1 when any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "iquad/linear_ops.hpp"
#include "iquad/quadrature.hpp"
#include "iquad/reconstruct.hpp"
#include "iquad/sensors.hpp"

using namespace iquad;

namespace {

int failures = 0;

void report(int k, bool ok, const std::string& title, const std::string& detail) {
  std::printf("[%s] C%d %s: %s\n", ok ? "PASS" : "FAIL", k, title.c_str(), detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ScalarField gaussian(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(g.size());
  for (double& x : v) x = d(rng);
  return ScalarField(g, std::move(v));
}

double rel_l2(const ScalarField& a, const ScalarField& ref) { return (a - ref).norm() / ref.norm(); }

double max_outside(const ScalarField& f, const PupilMask& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.values().size(); ++i)
    if (!p.contains(i)) m = std::max(m, std::abs(f[i]));
  return m;
}

struct Standard {
  Grid grid;
  PupilMask pupil;
  SensorSpec spec;
};

Standard standard(int n = 64) {
  const Grid g = make_grid(n, 0.25, 2);
  const PupilMask p = circular_pupil(g, n / 2);
  return {g, p, iquad_spec(p)};
}

void c1() {
  const Standard s = standard();
  const ComplexField otf = fqpm_otf(s.grid, 0.25);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const ScalarField phi = random_zernike_phase(s.grid, s.pupil, 6, 1.0, 100 + k);
    const ScalarField direct = fourier_filter_intensity(phi, otf, s.spec).field();
    const ScalarField closed = iquad_intensity_closed_form(phi, s.spec);
    worst = std::max(worst, (direct - closed).max_abs() / direct.max_abs());
  }
  report(1, worst <= 1e-12, "closed-form intensity", fmt("max rel pointwise diff %.3g over 20 phases (<= 1e-12)", worst));
}

void c2() {
  const Standard s = standard();
  const ScalarField i0 = fourier_filter_intensity(ScalarField::zeros(s.grid), fqpm_otf(s.grid, 0.25), s.spec).field();
  const ScalarField chi = s.pupil.field();
  const ScalarField hc = hilbert2d(chi);
  const ScalarField ref = 0.5 * (hc * hc + chi * chi);
  const double e = (i0 - ref).max_abs() / ref.max_abs();
  report(2, e <= 1e-12, "reference intensity", fmt("rel diff %.3g (<= 1e-12)", e));
}

void c3() {
  const Standard s = standard();
  double worst = 0.0, leak = 0.0, masked = 0.0;
  for (int k = 0; k < 5; ++k) {
    const ScalarField phi = random_zernike_phase(s.grid, s.pupil, 6, 1.0, 200 + k);
    const DoublePaths p = double_iquad_paths(phi, s.spec);
    const double scale = std::max(p.plus.max_abs(), p.minus.max_abs());
    const ScalarField di = p.plus - p.minus;
    worst = std::max(worst, (di - i1_apply(phi, s.spec)).max_abs() / scale);
    leak = std::max(leak, max_outside(di, s.pupil) / scale);
    masked = std::max(masked, max_outside(double_iquad(phi, s.spec).field(), s.pupil));
  }
  const bool ok = worst <= 1e-12 && masked == 0.0;
  report(3, ok, "double iQuad identity",
         fmt("|dI - i1|_inf / scale %.3g (<= 1e-12)", worst) + fmt(", unmasked leak %.3g", leak) +
             fmt(", masked outside %.3g (== 0)", masked));
}

void c4() {
  Standard s = standard();
  const double a = verify_adjoint(ilin(s.spec), 50).worst_defect;
  s.spec.modulation = make_modulation(s.grid, ModulationProfile::kTent, 4.0);
  const double b = verify_adjoint(ilin_modulated(s.spec), 50).worst_defect;
  report(4, a <= 1e-10 && b <= 1e-10, "self-adjointness",
         fmt("ilin defect %.3g", a) + fmt(", modulated ilin defect %.3g (<= 1e-10, 50 pairs)", b));
}

double taylor_slope(const std::function<ScalarField(const ScalarField&)>& f, const ScalarField& phi,
                    const ScalarField& psi, const ScalarField& dpsi) {
  const ScalarField f0 = f(phi);
  std::vector<double> ts, rem;
  for (double t = 3e-3; t <= 0.1 * (1 + 1e-9); t *= std::pow(0.1 / 3e-3, 1.0 / 7.0)) {
    ts.push_back(t);
    rem.push_back((f(phi + t * psi) - f0 - t * dpsi).norm());
  }
  return fit_loglog_slope(ts, rem);
}

void c5() {
  const Standard s = standard();
  const ScalarField phi = random_zernike_phase(s.grid, s.pupil, 5, 0.5, 301);
  const ScalarField psi = random_zernike_phase(s.grid, s.pupil, 5, 1.0, 302);
  const double sm = taylor_slope([&](const ScalarField& x) { return meta_intensity(x, s.spec).field(); }, phi, psi,
                                 frechet(phi, s.spec).apply(psi));
  const double sd = taylor_slope([&](const ScalarField& x) { return double_iquad(x, s.spec).field(); }, phi, psi,
                                 frechet_i1(phi, s.spec).apply(psi));
  const ScalarField probe = random_zernike_phase(s.grid, s.pupil, 5, 1.0, 303);
  const double z = (frechet(ScalarField::zeros(s.grid), s.spec).apply(probe) - ilin(s.spec).apply(probe)).max_abs() /
                   ilin(s.spec).apply(probe).max_abs();
  const bool ok = std::abs(sm - 2.0) <= 0.1 && std::abs(sd - 2.0) <= 0.1 && z <= 1e-12;
  report(5, ok, "Frechet order",
         fmt("slope m %.4f", sm) + fmt(", slope dI %.4f (2 +- 0.1)", sd) + fmt(", |frechet(0) - ilin| %.3g", z));
}

void c6() {
  const Grid g = make_grid(16, 0.25, 2);
  const PupilMask p = circular_pupil(g, 8);
  const SensorSpec spec = iquad_spec(p);
  std::mt19937_64 rng(601);
  double oracle = 0.0, spectral = 0.0, hs = 0.0, cross = 0.0;
  for (int k = 0; k < 5; ++k) {
    const ScalarField phi = p.apply(0.5 * gaussian(g, rng));
    const ScalarField psi = gaussian(g, rng), hat = gaussian(g, rng);
    const double a = dot(pv_frechet(phi, psi, p, p), hat), b = dot(psi, pv_adjoint_l2(phi, hat, p, p));
    oracle = std::max(oracle, std::abs(a - b) / (psi.norm() * hat.norm()));
    const LinearOperator d = frechet(phi, spec);
    const double c = dot(d.apply(psi), hat), e = dot(psi, d.adjoint_apply(hat));
    spectral = std::max(spectral, std::abs(c - e) / (psi.norm() * hat.norm()));
    hs = std::max(hs, verify_adjoint(frechet_adjoint(phi, spec), 5, 610 + k).worst_defect);
  }
  {
    // smooth inputs, where both discretizations resolve the integrals
    QuadratureScheme per = QuadratureScheme::offset();
    per.periodic = true;
    const ScalarField phi = random_zernike_phase(g, p, 3, 0.3, 620);
    const ScalarField hat = random_zernike_phase(g, p, 3, 1.0, 621);
    cross = rel_l2(frechet(phi, spec).adjoint_apply(hat), pv_adjoint_l2(phi, hat, p, p, per));
  }
  const bool ok = oracle <= 1e-9 && spectral <= 1e-9 && hs <= 1e-9;
  report(6, ok, "adjoint consistency n=16",
         fmt("oracle pair defect %.3g", oracle) + fmt(", spectral pair %.3g", spectral) +
             fmt(", H^s pair %.3g (<= 1e-9)", hs) + fmt("; spectral vs oracle adjoint on smooth data, rel diff %.3g (info)", cross));
}

void c7() {
  const Standard s = standard();
  std::mt19937_64 rng(701);
  const ScalarField f = gaussian(s.grid, rng), q = gaussian(s.grid, rng);
  const ScalarField pf = off_axis_projector(f);
  const double inv = (hilbert2d(hilbert2d(f)) - pf).max_abs() / f.max_abs();
  const double en = std::abs(hilbert2d(pf).norm() - pf.norm()) / pf.norm();
  const double sym = std::abs(dot(hilbert2d(f), q) - dot(f, hilbert2d(q))) / (f.norm() * q.norm());
  report(7, inv <= 1e-12 && en <= 1e-12 && sym <= 1e-12, "Hilbert properties",
         fmt("HH - P %.3g", inv) + fmt(", energy %.3g", en) + fmt(", symmetry %.3g (<= 1e-12)", sym));
}

void c8() {
  QuadratureScheme per = QuadratureScheme::offset();
  per.periodic = true;
  // band-limited inputs on the periodic grid (Omega = whole torus)
  std::vector<double> eh, e1, el;
  for (int n : {16, 32, 64}) {
    const Grid g = make_grid(n, 1.0 / n, 1);
    const PupilMask full = full_detector(g);
    const SensorSpec spec = make_spec(full, full, 0.25);
    std::vector<double> v(g.size());
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        v[static_cast<std::size_t>(r) * n + c] = 0.4 * std::sin(2 * M_PI * (2 * c + r) / n + 0.3) +
                                                 0.3 * std::cos(2 * M_PI * (c - 2 * r) / n + 1.1) +
                                                 0.2 * std::sin(2 * M_PI * 3 * c / n) * std::sin(2 * M_PI * 2 * r / n);
    const ScalarField phi(g, v);
    eh.push_back(rel_l2(pv_hilbert2d(phi, per), hilbert2d(phi)));
    e1.push_back(rel_l2(pv_i1(phi, full, per), i1_apply(phi, spec)));
    el.push_back(rel_l2(pv_ilin(phi, full, per), ilin(spec).apply(phi)));
  }
  // circular pupil, same pupil-to-grid ratio at every n
  std::vector<double> p1, pl;
  for (int n : {16, 32, 64}) {
    const Grid g = make_grid(n, 1.0 / n, 2);
    const PupilMask p = circular_pupil(g, n / 2);
    const SensorSpec spec = iquad_spec(p);
    const ScalarField phi = random_zernike_phase(g, p, 3, 0.5, 801);
    p1.push_back(rel_l2(pv_i1(phi, p, per), i1_apply(phi, spec)));
    pl.push_back(rel_l2(pv_ilin(phi, p, per), ilin(spec).apply(phi)));
  }
  auto mono = [](const std::vector<double>& e) { return e[0] > e[1] && e[1] > e[2]; };
  const bool ok = eh[1] <= 0.1 && e1[1] <= 0.1 && el[1] <= 0.1 && mono(eh) && mono(e1) && mono(el) && mono(p1) &&
                  mono(pl);
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "band-limited n=16/32/64: H %.3g/%.3g/%.3g, i1 %.3g/%.3g/%.3g, ilin %.3g/%.3g/%.3g (n=32 <= 0.1, "
                "monotone); circular pupil (monotone): i1 %.3g/%.3g/%.3g, ilin %.3g/%.3g/%.3g",
                eh[0], eh[1], eh[2], e1[0], e1[1], e1[2], el[0], el[1], el[2], p1[0], p1[1], p1[2], pl[0], pl[1],
                pl[2]);
  report(8, ok, "oracle convergence", buf);
}

void c9() {
  Standard s = standard();
  s.spec.axis_policy = AxisPolicy::kLiteral;
  const double fp = pupil_flux(s.pupil);
  const ScalarField phi = random_zernike_phase(s.grid, s.pupil, 6, 1.0, 901);
  double worst = 0.0;
  for (double dol : {0.0, 0.25, 0.5, -0.25}) {
    const ComplexField otf = fqpm_otf(s.grid, dol, AxisPolicy::kLiteral);
    worst = std::max(worst, std::abs(flux(fourier_filter_intensity(phi, otf, s.spec).field()) - fp) / fp);
  }
  // arbitrary unit-modulus masks
  std::mt19937_64 rng(902);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int k = 0; k < 3; ++k) {
    std::vector<cplx> v(s.grid.size());
    for (auto& z : v) z = std::polar(1.0, u(rng));
    worst = std::max(worst,
                     std::abs(flux(fourier_filter_intensity(phi, ComplexField(s.grid, v), s.spec).field()) - fp) / fp);
  }
  report(9, worst <= 1e-12, "flux conservation", fmt("max rel flux error %.3g (<= 1e-12)", worst));
}

void c10() {
  const Standard s = standard();
  const auto rows = sensitivity_scan(s.spec, modes_up_to_order(6, false), 1e-3);
  double z22 = 0.0;
  for (const auto& r : rows)
    if (r.mode == ZernikeIndex{2, 2}) z22 = r.response;
  const double ratio = z22 / median_response(rows);
  report(10, ratio <= 0.1, "poorly-seen mode", fmt("Z2^2 / median sensitivity %.4f (<= 0.1)", ratio));
}

void c11() {
  Standard s = standard();
  const ScalarField phi = random_zernike_phase(s.grid, s.pupil, 5, 0.5, 1101);
  SensorSpec d = s.spec;
  d.modulation = make_modulation(s.grid, ModulationProfile::kDelta, 0.0);
  const ScalarField m0 = meta_intensity(phi, s.spec).field();
  const double em = (modulated_meta_intensity(phi, d).field() - m0).max_abs() / m0.max_abs();
  const ScalarField l0 = ilin(s.spec).apply(phi);
  const double el = (ilin_modulated(d).apply(phi) - l0).max_abs() / l0.max_abs();
  SensorSpec t = s.spec;
  t.modulation = make_modulation(s.grid, ModulationProfile::kTent, 4.0);
  const ScalarField probe = zernike_mode(s.grid, s.pupil, {4, -2}, 1.0);
  const double sens0 = ilin(s.spec).apply(probe).norm(), sens_t = ilin_modulated(t).apply(probe).norm();
  const bool ok = em <= 1e-12 && el <= 1e-12 && sens_t <= sens0;
  report(11, ok, "modulation limit",
         fmt("delta vs none: m %.3g", em) + fmt(", ilin %.3g (<= 1e-12)", el) +
             fmt("; tent(4 l/D) / unmodulated sensitivity on Z4^-2 %.3f (<= 1)", sens_t / sens0));
}

void c12() {
  const Standard s = standard();
  const std::vector<ZernikeIndex> modes = {{1, 1}, {1, -1}, {2, -2}, {3, -1}, {3, 1},
                                           {3, -3}, {3, 3}, {4, -2}, {4, -4}, {5, 1}};
  std::mt19937_64 rng(1201);
  std::normal_distribution<double> nd(0.0, 1.0);
  ScalarField truth = ScalarField::zeros(s.grid);
  for (const auto& m : modes) truth = truth + zernike_mode(s.grid, s.pupil, m, nd(rng));
  truth = (0.1 / pupil_rms(truth, s.pupil)) * truth;
  const LinearOperator op = with_sobolev_domain(ilin(s.spec), kDefaultSobolevIndex);
  const Measurement data{MeasurementKind::kDoubleDifference, {op.apply(truth)}, pupil_flux(s.pupil)};

  ReconstructionConfig cfg;
  cfg.max_iters = 500;
  cfg.residual_tol = 0.0;
  const auto lw = landweber_linear(data, op, cfg);
  const double e_lw = relative_error_omega(lw.estimate, truth, s.pupil);
  bool monotone = true;
  for (std::size_t k = 1; k < lw.residuals.size(); ++k) monotone = monotone && lw.residuals[k] <= lw.residuals[k - 1];

  cfg.method = Method::kCg;
  cfg.max_iters = 100;
  const auto cg = cg_normal(data, op, cfg);
  const double e_cg = relative_error_omega(cg.estimate, truth, s.pupil);
  const bool ok = e_lw <= 0.05 && lw.iterations <= 500 && monotone && e_cg <= e_lw && cg.iterations <= 100;
  report(12, ok, "reconstruction",
         fmt("Landweber error %.4f", e_lw) + fmt(" after %.0f its (<= 0.05)", lw.iterations) +
             ", residual monotone " + (monotone ? "yes" : "no") + fmt("; CG error %.4f", e_cg) +
             fmt(" after %.0f its (<= Landweber, <= 100 its)", cg.iterations));
}

void c13() {
  double worst = 1e300;
  std::string detail;
  for (int d : {32, 48, 64}) {
    const Grid g = make_grid(2 * d, 0.25, 2);
    const PupilMask p = circular_pupil(g, d);
    const PixelBudget b = pixel_budget(random_zernike_phase(g, p, 5, 0.1, 1300 + d), iquad_spec(p));
    worst = std::min(worst, b.ratio());
    detail += fmt("d=%.0f ", d) + fmt("ratio %.3f; ", b.ratio());
  }
  report(13, worst >= 3.8, "pixel efficiency", detail + fmt("min %.3f (>= 3.8)", worst));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<void (*)()> criteria = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13};
  for (auto c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion raised: %s\n", e.what());
      ++failures;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of %zu criteria failed (%.1f s)\n", failures, criteria.size(), secs);
  return failures == 0 ? 0 : 1;
}
