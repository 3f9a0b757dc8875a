#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace iquad {

using cplx = std::complex<double>;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Square sampling lattice. Sample k sits at (k - n/2) * pitch.
struct Grid {
  int n = 0;
  double pitch = 0.0;
  int pad_factor = 1;

  std::size_t size() const { return static_cast<std::size_t>(n) * n; }
  double coordinate(int k) const { return (k - n / 2) * pitch; }
  double frequency(int k) const { return (k - n / 2) / (n * pitch); }
  // offset of sample k from the center pixel, in samples
  int offset(int k) const { return k - n / 2; }
  std::vector<double> coordinates() const;
  std::vector<double> frequencies() const;

  bool operator==(const Grid&) const = default;
};

Grid make_grid(int n, double pitch, int pad_factor);
void require_same_grid(const Grid& a, const Grid& b, const char* what);

// Real n x n field, row-major (row = y index, column = x index).
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(const Grid& grid, std::vector<double> values);
  static ScalarField zeros(const Grid& grid);
  static ScalarField constant(const Grid& grid, double v);

  const Grid& grid() const { return grid_; }
  int n() const { return grid_.n; }
  const std::vector<double>& values() const { return values_; }
  double at(int row, int col) const { return values_[static_cast<std::size_t>(row) * grid_.n + col]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double sum() const;
  double norm() const;  // plain l2 norm over samples
  double max_abs() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

class ComplexField {
 public:
  ComplexField() = default;
  ComplexField(const Grid& grid, std::vector<cplx> values);
  static ComplexField from_real(const ScalarField& f);

  const Grid& grid() const { return grid_; }
  int n() const { return grid_.n; }
  const std::vector<cplx>& values() const { return values_; }
  cplx at(int row, int col) const { return values_[static_cast<std::size_t>(row) * grid_.n + col]; }
  cplx operator[](std::size_t i) const { return values_[i]; }

  ScalarField real() const;
  ScalarField imag() const;
  ScalarField abs2() const;
  double norm() const;

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
ScalarField operator-(const ScalarField& a);
ComplexField operator*(const ComplexField& a, const ComplexField& b);
ComplexField operator*(cplx s, const ComplexField& a);
ComplexField operator+(const ComplexField& a, const ComplexField& b);

ScalarField map(const ScalarField& f, double (*fn)(double));
double dot(const ScalarField& a, const ScalarField& b);
// point reflection about the center pixel, k -> (n - k) mod n on both axes
ScalarField reflect(const ScalarField& f);

enum class MaskKind : std::uint32_t { kPupil = 0, kDetector = 1 };

class PupilMask {
 public:
  PupilMask() = default;
  PupilMask(ScalarField indicator, MaskKind kind, int diameter);

  const Grid& grid() const { return indicator_.grid(); }
  const ScalarField& field() const { return indicator_; }
  MaskKind kind() const { return kind_; }
  int diameter() const { return diameter_; }
  bool contains(std::size_t i) const { return indicator_[i] != 0.0; }
  std::size_t count() const;
  std::vector<std::size_t> pixels() const;
  ScalarField apply(const ScalarField& f) const;
  ComplexField apply(const ComplexField& f) const;
  // true when this mask is 1 wherever `inner` is
  bool dominates(const PupilMask& inner) const;
  std::uint64_t hash() const;

 private:
  ScalarField indicator_;
  MaskKind kind_ = MaskKind::kPupil;
  int diameter_ = 0;
};

PupilMask circular_pupil(const Grid& grid, int diameter_samples);
PupilMask full_detector(const Grid& grid);
PupilMask circular_detector(const Grid& grid, int diameter_samples);

struct ZernikeIndex {
  int n = 0;
  int m = 0;
  bool operator==(const ZernikeIndex&) const = default;
  auto operator<=>(const ZernikeIndex&) const = default;
  std::string label() const;  // "Z2^-2"
};

void validate(const ZernikeIndex& j);
ZernikeIndex noll_to_index(int j);
std::vector<ZernikeIndex> modes_up_to_order(int max_radial_order, bool include_piston);

ScalarField zernike_mode(const Grid& grid, const PupilMask& pupil, ZernikeIndex j, double rms);
double pupil_rms(const ScalarField& f, const PupilMask& pupil);
double pupil_mean(const ScalarField& f, const PupilMask& pupil);
ScalarField remove_piston(const ScalarField& f, const PupilMask& pupil);

// sum of the modes up to `max_radial_order` (no piston) with Gaussian weights, scaled to `rms` on the pupil
ScalarField random_zernike_phase(const Grid& grid, const PupilMask& pupil, int max_radial_order, double rms,
                                 std::uint64_t seed);

struct ScreenParams {
  double r0 = 0.1;
  double L0 = 25.0;  // infinity gives pure Kolmogorov
  std::uint64_t seed = 0;
  int subharmonic_levels = 3;
};

// Piston is removed over the centered disk of diameter n / pad_factor.
ScalarField kolmogorov_screen(const Grid& grid, const ScreenParams& params);

}  // namespace iquad
