#pragma once

#include <optional>
#include <vector>

#include "iquad/field_io.hpp"
#include "iquad/grid.hpp"
#include "iquad/spectral.hpp"

namespace iquad {

// How the FQPM transfer function is sampled on the x=0 / y=0 frequency lines (and the Nyquist lines).
enum class AxisPolicy {
  kMean,     // average of the adjacent quadrant values
  kLiteral,  // the "else" branch: value 1, unit modulus everywhere
};

struct SensorSpec {
  double delta_over_lambda = 0.25;
  double lambda = 500e-9;
  PupilMask pupil;
  PupilMask detector;
  std::optional<ModulationWeight> modulation;
  AxisPolicy axis_policy = AxisPolicy::kMean;

  const Grid& grid() const { return pupil.grid(); }
  void validate() const;
};

SensorSpec make_spec(const PupilMask& pupil, const PupilMask& detector, double delta_over_lambda,
                     double lambda = 500e-9);
// iQuad (delta = lambda/4) with the detector covering the whole grid
SensorSpec iquad_spec(const PupilMask& pupil, double lambda = 500e-9);

enum class MeasurementKind { kIntensity, kMetaIntensity, kDoubleDifference, kSlopes };
std::string to_string(MeasurementKind k);
FieldKind field_kind(MeasurementKind k);

struct Measurement {
  MeasurementKind kind;
  std::vector<ScalarField> fields;
  double flux_norm = 1.0;  // sum of chi_Omega * pitch^2

  const ScalarField& field() const { return fields.front(); }
  ScalarField normalized(std::size_t i = 0) const { return (1.0 / flux_norm) * fields.at(i); }
};

double pupil_flux(const PupilMask& pupil);
double flux(const ScalarField& intensity);  // sum * pitch^2

ComplexField fqpm_otf(const Grid& grid, double delta_over_lambda, AxisPolicy policy = AxisPolicy::kMean);
// chi_Omega exp(-i phi)
ComplexField pupil_field(const ScalarField& phase, const PupilMask& pupil);

// field F^-1(OTF F(chi e^{-i phi})) before the detector cut
ComplexField fourier_filter_field(const ScalarField& phase, const ComplexField& otf, const SensorSpec& spec);
Measurement fourier_filter_intensity(const ScalarField& phase, const ComplexField& otf, const SensorSpec& spec);
ComplexField fqpm_propagate(const ScalarField& phase, const SensorSpec& spec);
// chi_D [m1 + (|H(chi e^{i phi})|^2 + chi^2) / 2] from Hilbert building blocks
ScalarField iquad_intensity_closed_form(const ScalarField& phase, const SensorSpec& spec);

// The `_with` variants take the multiplier used for H so that alternative kernels can be injected.
ScalarField i1_apply(const ScalarField& phase, const SensorSpec& spec);
ScalarField i2_apply(const ScalarField& phase, const SensorSpec& spec);
ScalarField i1_apply_with(const ScalarField& phase, const SensorSpec& spec, const Multiplier& h);
ScalarField i2_apply_with(const ScalarField& phase, const SensorSpec& spec, const Multiplier& h);

// chi_Omega (H(chi_Omega phi) - phi H(chi_Omega)), the linearized response
ScalarField ilin_apply_with(const ScalarField& phase, const SensorSpec& spec, const Multiplier& h);

Measurement meta_intensity(const ScalarField& phase, const SensorSpec& spec);

struct DoublePaths {
  ScalarField plus;
  ScalarField minus;
};
// beam-splitter paths at delta = +lambda/4 and -lambda/4, each carrying half the flux
DoublePaths double_iquad_paths(const ScalarField& phase, const SensorSpec& spec);
// I+ - I-, cut to the pupil
Measurement double_iquad(const ScalarField& phase, const SensorSpec& spec);

Measurement modulated_meta_intensity(const ScalarField& phase, const SensorSpec& spec);

// fields [s_x, s_y]
Measurement pwfs_slopes(const ScalarField& phase, const SensorSpec& spec);

struct SensitivityRow {
  ZernikeIndex mode;
  double response = 0.0;
};
std::vector<SensitivityRow> sensitivity_scan(const SensorSpec& spec, const std::vector<ZernikeIndex>& modes,
                                             double amplitude);
std::vector<SensitivityRow> pwfs_sensitivity_scan(const SensorSpec& spec, const std::vector<ZernikeIndex>& modes,
                                                  double amplitude);
double median_response(const std::vector<SensitivityRow>& rows);

struct PixelBudget {
  std::size_t pupil_pixels = 0;
  std::size_t iquad_signal_pixels = 0;  // |ilin phi| above 1e-3 of its max
  std::size_t iquad_required = 0;       // pupil pixels plus any signal pixel outside the pupil
  std::size_t pwfs_required = 0;        // four pupil images
  double ratio() const { return static_cast<double>(pwfs_required) / static_cast<double>(iquad_required); }
};
PixelBudget pixel_budget(const ScalarField& phase, const SensorSpec& spec);

void require_iquad(const SensorSpec& spec);

}  // namespace iquad
