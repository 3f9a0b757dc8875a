#pragma once

#include "iquad/grid.hpp"

namespace iquad {

inline constexpr double kDefaultSobolevIndex = 11.0 / 6.0;

// Unitary 2D DFT in the centered convention: spatial sample k at (k - n/2) * pitch,
// frequency sample k at (k - n/2) / (n * pitch).
ComplexField fft2(const ComplexField& field);
ComplexField ifft2(const ComplexField& field);

namespace detail {
// in-place unitary DFT in plain (uncentered) order; sign -1 forward, +1 inverse
void dft2(std::vector<cplx>& data, int n, int sign);
// signed integer frequency index of FFT-order bin q
inline int fft_index(int q, int n) { return q < n / 2 ? q : q - n; }
}  // namespace detail

// Frequency-domain multiplier. Values are kept in plain FFT order.
class Multiplier {
 public:
  Multiplier() = default;
  Multiplier(const Grid& grid, std::vector<cplx> fft_order_values);

  const Grid& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  // value at centered frequency sample (row, col)
  cplx centered(int row, int col) const;
  Multiplier operator-() const;

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

enum class Axis { kX, kY };

Multiplier hilbert_multiplier(const Grid& grid);
Multiplier hilbert1d_multiplier(const Grid& grid, Axis axis);
Multiplier sobolev_multiplier(const Grid& grid, double s);
// (1 + xi^2 + eta^2)^exponent, angular frequencies, no range restriction
Multiplier sobolev_power(const Grid& grid, double exponent);
Multiplier off_axis_multiplier(const Grid& grid);

ComplexField apply(const Multiplier& m, const ComplexField& f);
// real part of the filtered field
ScalarField apply(const Multiplier& m, const ScalarField& f);

ComplexField hilbert2d(const ComplexField& field);
ScalarField hilbert2d(const ScalarField& field);
ScalarField hilbert1d_along_x(const ScalarField& field);
ScalarField hilbert1d_along_y(const ScalarField& field);
ScalarField sobolev_adjoint(const ScalarField& field, double s);
// zeroes the axis and Nyquist frequency lines
ScalarField off_axis_projector(const ScalarField& field);

void check_sobolev_index(double s);

enum class ModulationProfile { kDelta, kTent, kDisk, kRing };
ModulationProfile parse_modulation_profile(const std::string& name);
std::string to_string(ModulationProfile p);

// Discrete weights on the centered frequency lattice. Masses sum to one.
class ModulationWeight {
 public:
  static ModulationWeight from_values(const Grid& grid, std::vector<double> w,
                                      ModulationProfile profile = ModulationProfile::kDelta,
                                      double radius = 0.0);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& weights() const { return w_; }
  ModulationProfile profile() const { return profile_; }
  double radius() const { return radius_; }  // lambda/D units
  void validate() const;

 private:
  ModulationWeight() = default;
  Grid grid_;
  std::vector<double> w_;
  ModulationProfile profile_ = ModulationProfile::kDelta;
  double radius_ = 0.0;
};

// radius in lambda/D; one lambda/D spans pad_factor frequency samples
ModulationWeight make_modulation(const Grid& grid, ModulationProfile profile, double radius);
Multiplier modulated_multiplier(const ModulationWeight& w, const Multiplier& base);
Multiplier modulated_multiplier(const ModulationWeight& w);
ComplexField modulated_hilbert2d(const ComplexField& field, const ModulationWeight& w);
ScalarField modulated_hilbert2d(const ScalarField& field, const ModulationWeight& w);

}  // namespace iquad
