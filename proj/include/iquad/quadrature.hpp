#pragma once

#include "iquad/grid.hpp"
#include "iquad/spectral.hpp"

namespace iquad {

// Direct lattice sums for the p.v. integrals. Slow, used to cross-check the spectral path.
struct QuadratureScheme {
  enum class Singularity {
    kExclusion,  // drop the x'=x and y'=y lines
    kOffset,     // primed nodes staggered by half a pitch
  };
  Singularity singularity = Singularity::kExclusion;
  // sum over the periodic extension of the grid instead of the bounded square
  bool periodic = false;

  static QuadratureScheme exclusion() { return {}; }
  static QuadratureScheme offset() { return {Singularity::kOffset, false}; }
};

inline constexpr int kOracleMaxN = 64;
inline constexpr int kOracleQuadMaxN = 24;
inline constexpr int kOracleRawMaxN = 12;

// 1D kernel value for a lattice offset m (in samples), already including 1/pi
double pv_kernel(int m, int n, const QuadratureScheme& scheme);

ScalarField pv_hilbert2d(const ScalarField& field, const QuadratureScheme& scheme = {});
ScalarField pv_hilbert1d(const ScalarField& field, Axis axis, const QuadratureScheme& scheme = {});

ScalarField pv_i1(const ScalarField& phase, const PupilMask& pupil, const QuadratureScheme& scheme = {});
ScalarField pv_ilin(const ScalarField& phase, const PupilMask& pupil, const QuadratureScheme& scheme = {});
ScalarField pv_i2(const ScalarField& phase, const PupilMask& pupil, const PupilMask& detector,
                  const QuadratureScheme& scheme = {});
// sextuple loop, n <= 12
ScalarField pv_i2_raw(const ScalarField& phase, const PupilMask& pupil, const PupilMask& detector,
                      const QuadratureScheme& scheme = {});

ScalarField pv_frechet_i1(const ScalarField& phase, const ScalarField& direction, const PupilMask& pupil,
                          const QuadratureScheme& scheme = {});
ScalarField pv_frechet_i2(const ScalarField& phase, const ScalarField& direction, const PupilMask& pupil,
                          const PupilMask& detector, const QuadratureScheme& scheme = {});
ScalarField pv_frechet_i2_raw(const ScalarField& phase, const ScalarField& direction, const PupilMask& pupil,
                              const PupilMask& detector, const QuadratureScheme& scheme = {});
ScalarField pv_frechet(const ScalarField& phase, const ScalarField& direction, const PupilMask& pupil,
                       const PupilMask& detector, const QuadratureScheme& scheme = {});

// L2 adjoint of pv_frechet in its direction argument
ScalarField pv_adjoint_l2(const ScalarField& phase, const ScalarField& data, const PupilMask& pupil,
                          const PupilMask& detector, const QuadratureScheme& scheme = {});
ScalarField pv_adjoint(const ScalarField& phase, const ScalarField& data, const PupilMask& pupil,
                       const PupilMask& detector, double s, const QuadratureScheme& scheme = {});

}  // namespace iquad
