#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "iquad/sensors.hpp"

namespace iquad {

using FieldMap = std::function<ScalarField(const ScalarField&)>;

// apply / adjoint_apply pair. When a Sobolev index is attached to a side, that side is paired
// with the H^s inner product <a, (1+|xi|^2)^s b> instead of plain L2.
struct LinearOperator {
  std::string name;
  FieldMap apply;
  FieldMap adjoint_apply;
  Grid domain;
  Grid range;
  bool self_adjoint = false;
  std::optional<double> domain_sobolev;
  std::optional<double> range_sobolev;

  ScalarField operator()(const ScalarField& x) const { return apply(x); }
  double domain_inner(const ScalarField& a, const ScalarField& b) const;
  double range_inner(const ScalarField& a, const ScalarField& b) const;
};

double sobolev_inner(const ScalarField& a, const ScalarField& b, double s);

struct AdjointCheck {
  double worst_defect = 0.0;  // |<Ax,y> - <x,A*y>| / (|x| |y|), norms in the paired spaces scaled by |A|
  int pairs = 0;
};
AdjointCheck verify_adjoint(const LinearOperator& op, int pairs = 50, std::uint64_t seed = 20240611);
// operator norm squared estimate by power iteration on A*A
double estimate_norm_squared(const LinearOperator& op, int steps = 20, std::uint64_t seed = 7);

LinearOperator ilin(const SensorSpec& spec);
LinearOperator ilin_with(const SensorSpec& spec, const Multiplier& h, std::string name);
LinearOperator ilin_modulated(const SensorSpec& spec);

// i'(phi) = i1'(phi) + i2'(phi); the adjoint is the plain L2 adjoint
LinearOperator frechet(const ScalarField& phase, const SensorSpec& spec);
// i1'(phi) alone: the derivative of the double-iQuad signal. Self-adjoint.
LinearOperator frechet_i1(const ScalarField& phase, const SensorSpec& spec);
// E_s^* (i1'(phi) + T2^*) as an operator from data to phase; its adjoint is frechet(phase)
LinearOperator frechet_adjoint(const ScalarField& phase, const SensorSpec& spec, double s = kDefaultSobolevIndex);

ScalarField frechet_i1_apply(const ScalarField& phase, const ScalarField& dir, const SensorSpec& spec);
ScalarField frechet_i2_apply(const ScalarField& phase, const ScalarField& dir, const SensorSpec& spec);
ScalarField frechet_i2_adjoint_apply(const ScalarField& phase, const ScalarField& data, const SensorSpec& spec);

// same map, domain viewed as H^s: adjoint becomes E_s^* composed with the L2 adjoint
LinearOperator with_sobolev_domain(const LinearOperator& op, double s);

// least-squares slope of log(values) against log(ts)
double fit_loglog_slope(const std::vector<double>& ts, const std::vector<double>& values);

enum class PixelSet { kPupil, kDetector };

struct InteractionMatrix {
  Eigen::MatrixXd m;
  std::vector<ZernikeIndex> basis;
  std::vector<std::size_t> pixels;
  std::uint64_t mask_hash = 0;
  Grid grid;
  PupilMask pupil;
};

InteractionMatrix interaction_matrix(const LinearOperator& op, const std::vector<ZernikeIndex>& basis,
                                     const PupilMask& pupil, PixelSet set = PixelSet::kPupil,
                                     const PupilMask* detector = nullptr);
double gram_condition(const InteractionMatrix& im);
// column-major f64 plus `path + ".txt"` sidecar
void write_matrix(const std::string& path, const InteractionMatrix& im);

}  // namespace iquad
