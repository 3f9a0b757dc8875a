#include "iquad/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace iquad {

namespace {

constexpr double kPi = std::numbers::pi;

void check_delta(double dol) {
  if (!(std::abs(dol) <= 0.5)) throw InvalidArgument("delta/lambda must lie in [-1/2, 1/2]");
}

ScalarField sq(const ScalarField& f) { return f * f; }

struct Blocks {
  ScalarField c, s, hc, hs, h1;
};

Blocks blocks(const ScalarField& phase, const PupilMask& pupil, const Multiplier& h) {
  require_same_grid(phase.grid(), pupil.grid(), "phase vs pupil");
  ScalarField c = map(phase, std::cos), s = map(phase, std::sin);
  ScalarField hc = apply(h, pupil.apply(c));
  ScalarField hs = apply(h, pupil.apply(s));
  ScalarField h1 = apply(h, pupil.field());
  return {std::move(c), std::move(s), std::move(hc), std::move(hs), std::move(h1)};
}

ScalarField m1_from(const Blocks& b, const PupilMask& pupil) { return pupil.apply(b.c * b.hs - b.s * b.hc); }

ScalarField m2_from(const Blocks& b, const PupilMask& detector) {
  return detector.apply(0.5 * (sq(b.hc) + sq(b.hs) - sq(b.h1)));
}

double sign_of(int k, int n) {
  const int o = k - n / 2;
  return o > 0 ? 1.0 : (o < 0 ? -1.0 : 0.0);
}

}  // namespace

void SensorSpec::validate() const {
  check_delta(delta_over_lambda);
  if (!(lambda > 0.0)) throw InvalidArgument("wavelength must be positive");
  if (!detector.dominates(pupil)) throw InvalidArgument("detector must contain the pupil");
  if (modulation) {
    require_same_grid(modulation->grid(), pupil.grid(), "modulation weight");
    modulation->validate();
  }
}

SensorSpec make_spec(const PupilMask& pupil, const PupilMask& detector, double delta_over_lambda, double lambda) {
  SensorSpec s;
  s.delta_over_lambda = delta_over_lambda;
  s.lambda = lambda;
  s.pupil = pupil;
  s.detector = detector;
  s.validate();
  return s;
}

SensorSpec iquad_spec(const PupilMask& pupil, double lambda) {
  return make_spec(pupil, full_detector(pupil.grid()), 0.25, lambda);
}

void require_iquad(const SensorSpec& spec) {
  if (std::abs(spec.delta_over_lambda - 0.25) > 1e-12)
    throw InvalidArgument("operation requires the iQuad configuration (delta = lambda/4)");
}

std::string to_string(MeasurementKind k) {
  switch (k) {
    case MeasurementKind::kIntensity: return "intensity";
    case MeasurementKind::kMetaIntensity: return "meta-intensity";
    case MeasurementKind::kDoubleDifference: return "double-difference";
    case MeasurementKind::kSlopes: return "slopes";
  }
  return "intensity";
}

FieldKind field_kind(MeasurementKind k) {
  switch (k) {
    case MeasurementKind::kIntensity: return FieldKind::kIntensity;
    case MeasurementKind::kMetaIntensity: return FieldKind::kMetaIntensity;
    case MeasurementKind::kDoubleDifference: return FieldKind::kDoubleDifference;
    case MeasurementKind::kSlopes: return FieldKind::kSlopes;
  }
  return FieldKind::kGeneric;
}

double pupil_flux(const PupilMask& pupil) {
  const double p = pupil.grid().pitch;
  return static_cast<double>(pupil.count()) * p * p;
}

double flux(const ScalarField& intensity) {
  const double p = intensity.grid().pitch;
  return intensity.sum() * p * p;
}

ComplexField fqpm_otf(const Grid& grid, double delta_over_lambda, AxisPolicy policy) {
  check_delta(delta_over_lambda);
  const int n = grid.n;
  const cplx e = std::polar(1.0, 2.0 * kPi * delta_over_lambda);
  const cplx mean = 0.5 * (1.0 + e);
  std::vector<cplx> v(grid.size());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double sy = sign_of(r, n), sx = sign_of(c, n);
      cplx val;
      if (policy == AxisPolicy::kLiteral) {
        val = sx * sy < 0.0 ? e : cplx(1.0);
      } else {
        // Nyquist rows/columns are treated like the axes, matching the Hilbert multiplier
        const bool singular = sx == 0.0 || sy == 0.0 || r == 0 || c == 0;
        val = singular ? mean : (sx * sy < 0.0 ? e : cplx(1.0));
      }
      v[static_cast<std::size_t>(r) * n + c] = val;
    }
  return ComplexField(grid, std::move(v));
}

ComplexField pupil_field(const ScalarField& phase, const PupilMask& pupil) {
  require_same_grid(phase.grid(), pupil.grid(), "phase vs pupil");
  std::vector<cplx> v(phase.grid().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = pupil.field()[i] * std::polar(1.0, -phase[i]);
  return ComplexField(phase.grid(), std::move(v));
}

ComplexField fourier_filter_field(const ScalarField& phase, const ComplexField& otf, const SensorSpec& spec) {
  require_same_grid(phase.grid(), otf.grid(), "phase vs OTF");
  require_same_grid(phase.grid(), spec.grid(), "phase vs sensor");
  return ifft2(otf * fft2(pupil_field(phase, spec.pupil)));
}

Measurement fourier_filter_intensity(const ScalarField& phase, const ComplexField& otf, const SensorSpec& spec) {
  const ScalarField I = spec.detector.apply(fourier_filter_field(phase, otf, spec).abs2());
  return {MeasurementKind::kIntensity, {I}, pupil_flux(spec.pupil)};
}

ComplexField fqpm_propagate(const ScalarField& phase, const SensorSpec& spec) {
  check_delta(spec.delta_over_lambda);
  const double a = kPi * spec.delta_over_lambda;
  const ComplexField u = pupil_field(phase, spec.pupil);
  const ComplexField hu = hilbert2d(u);
  const cplx g = std::polar(1.0, a);
  return (g * std::cos(a)) * u + (g * cplx(0.0, std::sin(a))) * hu;
}

ScalarField iquad_intensity_closed_form(const ScalarField& phase, const SensorSpec& spec) {
  require_iquad(spec);
  const Blocks b = blocks(phase, spec.pupil, hilbert_multiplier(phase.grid()));
  const ScalarField chi = spec.pupil.field();
  return spec.detector.apply(m1_from(b, spec.pupil) + 0.5 * (sq(b.hc) + sq(b.hs) + sq(chi)));
}

ScalarField i1_apply_with(const ScalarField& phase, const SensorSpec& spec, const Multiplier& h) {
  return m1_from(blocks(phase, spec.pupil, h), spec.pupil);
}

ScalarField i2_apply_with(const ScalarField& phase, const SensorSpec& spec, const Multiplier& h) {
  return m2_from(blocks(phase, spec.pupil, h), spec.detector);
}

ScalarField i1_apply(const ScalarField& phase, const SensorSpec& spec) {
  require_iquad(spec);
  return i1_apply_with(phase, spec, hilbert_multiplier(phase.grid()));
}

ScalarField i2_apply(const ScalarField& phase, const SensorSpec& spec) {
  require_iquad(spec);
  return i2_apply_with(phase, spec, hilbert_multiplier(phase.grid()));
}

ScalarField ilin_apply_with(const ScalarField& phase, const SensorSpec& spec, const Multiplier& h) {
  const PupilMask& p = spec.pupil;
  return p.apply(apply(h, p.apply(phase)) - phase * apply(h, p.field()));
}

Measurement meta_intensity(const ScalarField& phase, const SensorSpec& spec) {
  require_iquad(spec);
  if (spec.modulation) throw InvalidArgument("meta_intensity expects an unmodulated sensor");
  const Blocks b = blocks(phase, spec.pupil, hilbert_multiplier(phase.grid()));
  return {MeasurementKind::kMetaIntensity, {m1_from(b, spec.pupil) + m2_from(b, spec.detector)},
          pupil_flux(spec.pupil)};
}

DoublePaths double_iquad_paths(const ScalarField& phase, const SensorSpec& spec) {
  const ComplexField u = (cplx(std::sqrt(0.5))) * pupil_field(phase, spec.pupil);
  const ComplexField spectrum = fft2(u);
  auto path = [&](double dol) {
    const ComplexField a = ifft2(fqpm_otf(phase.grid(), dol, spec.axis_policy) * spectrum);
    return spec.detector.apply(a.abs2());
  };
  return {path(0.25), path(-0.25)};
}

Measurement double_iquad(const ScalarField& phase, const SensorSpec& spec) {
  const DoublePaths p = double_iquad_paths(phase, spec);
  return {MeasurementKind::kDoubleDifference, {spec.pupil.apply(p.plus - p.minus)}, pupil_flux(spec.pupil)};
}

Measurement modulated_meta_intensity(const ScalarField& phase, const SensorSpec& spec) {
  require_iquad(spec);
  if (!spec.modulation) throw InvalidArgument("modulated_meta_intensity needs a modulation weight");
  const Multiplier h = modulated_multiplier(*spec.modulation);
  const Blocks b = blocks(phase, spec.pupil, h);
  return {MeasurementKind::kMetaIntensity, {m1_from(b, spec.pupil) + m2_from(b, spec.detector)},
          pupil_flux(spec.pupil)};
}

Measurement pwfs_slopes(const ScalarField& phase, const SensorSpec& spec) {
  const PupilMask& p = spec.pupil;
  require_same_grid(phase.grid(), p.grid(), "phase vs pupil");
  const ScalarField tx = hilbert1d_along_x(p.apply(phase)) - phase * hilbert1d_along_x(p.field());
  const ScalarField ty = hilbert1d_along_y(p.apply(phase)) - phase * hilbert1d_along_y(p.field());
  return {MeasurementKind::kSlopes, {p.apply(-0.5 * tx), p.apply(0.5 * ty)}, pupil_flux(p)};
}

std::vector<SensitivityRow> sensitivity_scan(const SensorSpec& spec, const std::vector<ZernikeIndex>& modes,
                                             double amplitude) {
  if (!(amplitude > 0.0)) throw InvalidArgument("scan amplitude must be positive");
  std::vector<SensitivityRow> rows;
  for (const auto& j : modes) {
    const ScalarField z = zernike_mode(spec.grid(), spec.pupil, j, amplitude);
    rows.push_back({j, double_iquad(z, spec).field().norm() / amplitude});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.mode < b.mode; });
  return rows;
}

std::vector<SensitivityRow> pwfs_sensitivity_scan(const SensorSpec& spec, const std::vector<ZernikeIndex>& modes,
                                                  double amplitude) {
  if (!(amplitude > 0.0)) throw InvalidArgument("scan amplitude must be positive");
  std::vector<SensitivityRow> rows;
  for (const auto& j : modes) {
    const ScalarField z = zernike_mode(spec.grid(), spec.pupil, j, amplitude);
    const Measurement s = pwfs_slopes(z, spec);
    const double nx = s.fields[0].norm(), ny = s.fields[1].norm();
    rows.push_back({j, std::sqrt(nx * nx + ny * ny) / amplitude});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.mode < b.mode; });
  return rows;
}

double median_response(const std::vector<SensitivityRow>& rows) {
  if (rows.empty()) return 0.0;
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.response);
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

PixelBudget pixel_budget(const ScalarField& phase, const SensorSpec& spec) {
  const ScalarField lin = ilin_apply_with(phase, spec, hilbert_multiplier(phase.grid()));
  const double thresh = 1e-3 * lin.max_abs();
  PixelBudget b;
  b.pupil_pixels = spec.pupil.count();
  std::size_t outside = 0;
  for (std::size_t i = 0; i < lin.values().size(); ++i) {
    if (thresh > 0.0 && std::abs(lin[i]) > thresh) {
      ++b.iquad_signal_pixels;
      if (!spec.pupil.contains(i)) ++outside;
    }
  }
  b.iquad_required = b.pupil_pixels + outside;
  b.pwfs_required = 4 * b.pupil_pixels;
  return b;
}

}  // namespace iquad
