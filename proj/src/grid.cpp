#include "iquad/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "iquad/spectral.hpp"

namespace iquad {

Grid make_grid(int n, double pitch, int pad_factor) {
  if (n < 8 || n % 2 != 0) throw InvalidArgument("grid size must be even and >= 8, got " + std::to_string(n));
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw InvalidArgument("grid pitch must be positive");
  if (pad_factor < 1) throw InvalidArgument("pad factor must be >= 1");
  return Grid{n, pitch, pad_factor};
}

std::vector<double> Grid::coordinates() const {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = coordinate(k);
  return v;
}

std::vector<double> Grid::frequencies() const {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = frequency(k);
  return v;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw InvalidArgument(std::string("grid mismatch: ") + what);
}

namespace {
template <class V>
void check_shape(const Grid& g, const V& v) {
  if (g.n < 8 || g.n % 2 != 0 || !(g.pitch > 0.0)) throw InvalidArgument("field on an invalid grid");
  if (v.size() != g.size()) throw InvalidArgument("field size does not match grid");
}
}  // namespace

ScalarField::ScalarField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  check_shape(grid_, values_);
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite value in scalar field");
}

ScalarField ScalarField::zeros(const Grid& grid) { return ScalarField(grid, std::vector<double>(grid.size(), 0.0)); }
ScalarField ScalarField::constant(const Grid& grid, double v) {
  return ScalarField(grid, std::vector<double>(grid.size(), v));
}

double ScalarField::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double ScalarField::norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

ComplexField::ComplexField(const Grid& grid, std::vector<cplx> values) : grid_(grid), values_(std::move(values)) {
  check_shape(grid_, values_);
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidArgument("non-finite value in complex field");
}

ComplexField ComplexField::from_real(const ScalarField& f) {
  return ComplexField(f.grid(), std::vector<cplx>(f.values().begin(), f.values().end()));
}

ScalarField ComplexField::real() const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i].real();
  return ScalarField(grid_, std::move(v));
}

ScalarField ComplexField::imag() const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i].imag();
  return ScalarField(grid_, std::move(v));
}

ScalarField ComplexField::abs2() const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::norm(values_[i]);
  return ScalarField(grid_, std::move(v));
}

double ComplexField::norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s);
}

namespace {
template <class Op>
ScalarField binary(const ScalarField& a, const ScalarField& b, Op op) {
  require_same_grid(a.grid(), b.grid(), "field arithmetic");
  std::vector<double> v(a.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(a[i], b[i]);
  return ScalarField(a.grid(), std::move(v));
}
}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](double x, double y) { return x + y; });
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](double x, double y) { return x - y; });
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](double x, double y) { return x * y; });
}
ScalarField operator*(double s, const ScalarField& a) {
  std::vector<double> v(a.values());
  for (double& x : v) x *= s;
  return ScalarField(a.grid(), std::move(v));
}
ScalarField operator-(const ScalarField& a) { return -1.0 * a; }

ComplexField operator*(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid(), b.grid(), "field arithmetic");
  std::vector<cplx> v(a.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
  return ComplexField(a.grid(), std::move(v));
}
ComplexField operator*(cplx s, const ComplexField& a) {
  std::vector<cplx> v(a.values());
  for (auto& x : v) x *= s;
  return ComplexField(a.grid(), std::move(v));
}
ComplexField operator+(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid(), b.grid(), "field arithmetic");
  std::vector<cplx> v(a.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return ComplexField(a.grid(), std::move(v));
}

ScalarField map(const ScalarField& f, double (*fn)(double)) {
  std::vector<double> v(f.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(f[i]);
  return ScalarField(f.grid(), std::move(v));
}

double dot(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "inner product");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) s += a[i] * b[i];
  return s;
}

ScalarField reflect(const ScalarField& f) {
  const int n = f.n();
  std::vector<double> v(f.values().size());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) v[static_cast<std::size_t>(r) * n + c] = f.at((n - r) % n, (n - c) % n);
  return ScalarField(f.grid(), std::move(v));
}

PupilMask::PupilMask(ScalarField indicator, MaskKind kind, int diameter)
    : indicator_(std::move(indicator)), kind_(kind), diameter_(diameter) {
  for (double v : indicator_.values())
    if (v != 0.0 && v != 1.0) throw InvalidArgument("mask must be binary");
}

std::size_t PupilMask::count() const {
  return static_cast<std::size_t>(std::count(indicator_.values().begin(), indicator_.values().end(), 1.0));
}

std::vector<std::size_t> PupilMask::pixels() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < indicator_.values().size(); ++i)
    if (indicator_[i] != 0.0) idx.push_back(i);
  return idx;
}

ScalarField PupilMask::apply(const ScalarField& f) const { return indicator_ * f; }

ComplexField PupilMask::apply(const ComplexField& f) const {
  require_same_grid(grid(), f.grid(), "mask");
  std::vector<cplx> v(f.values());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= indicator_[i];
  return ComplexField(f.grid(), std::move(v));
}

bool PupilMask::dominates(const PupilMask& inner) const {
  if (!(grid() == inner.grid())) return false;
  for (std::size_t i = 0; i < indicator_.values().size(); ++i)
    if (inner.indicator_[i] > indicator_[i]) return false;
  return true;
}

std::uint64_t PupilMask::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(grid().n));
  for (double v : indicator_.values()) mix(v != 0.0 ? 1 : 0);
  return h;
}

namespace {
ScalarField disk(const Grid& grid, int diameter) {
  const int n = grid.n;
  const double r2 = 0.25 * diameter * diameter;
  std::vector<double> v(grid.size(), 0.0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double y = r - n / 2, x = c - n / 2;
      if (x * x + y * y < r2) v[static_cast<std::size_t>(r) * n + c] = 1.0;
    }
  return ScalarField(grid, std::move(v));
}
}  // namespace

PupilMask circular_pupil(const Grid& grid, int diameter_samples) {
  if (diameter_samples < 0) throw InvalidArgument("pupil diameter must be >= 0");
  if (static_cast<long>(diameter_samples) * grid.pad_factor > grid.n)
    throw InvalidArgument("pupil diameter " + std::to_string(diameter_samples) + " exceeds n / pad_factor");
  return PupilMask(disk(grid, diameter_samples), MaskKind::kPupil, diameter_samples);
}

PupilMask full_detector(const Grid& grid) {
  return PupilMask(ScalarField::constant(grid, 1.0), MaskKind::kDetector, grid.n);
}

PupilMask circular_detector(const Grid& grid, int diameter_samples) {
  if (diameter_samples < 0 || diameter_samples > 2 * grid.n) throw InvalidArgument("bad detector diameter");
  return PupilMask(disk(grid, diameter_samples), MaskKind::kDetector, diameter_samples);
}

std::string ZernikeIndex::label() const { return "Z" + std::to_string(n) + "^" + std::to_string(m); }

void validate(const ZernikeIndex& j) {
  if (j.n < 0 || std::abs(j.m) > j.n || (j.n - std::abs(j.m)) % 2 != 0)
    throw InvalidArgument("invalid Zernike index (" + std::to_string(j.n) + "," + std::to_string(j.m) + ")");
}

ZernikeIndex noll_to_index(int j) {
  if (j < 1) throw InvalidArgument("Noll index starts at 1");
  int n = 0;
  while (j > (n + 1) * (n + 2) / 2) ++n;
  const int k = j - n * (n + 1) / 2 - 1;
  const int mabs = n % 2 == 0 ? 2 * ((k + 1) / 2) : 2 * (k / 2) + 1;
  int m = mabs;
  if (mabs != 0 && j % 2 == 1) m = -mabs;
  return {n, m};
}

std::vector<ZernikeIndex> modes_up_to_order(int max_radial_order, bool include_piston) {
  std::vector<ZernikeIndex> out;
  for (int n = include_piston ? 0 : 1; n <= max_radial_order; ++n)
    for (int m = -n; m <= n; m += 2) out.push_back({n, m});
  return out;
}

namespace {
double radial(int n, int mabs, double rho) {
  double acc = 0.0;
  for (int k = 0; k <= (n - mabs) / 2; ++k) {
    const double num = std::tgamma(n - k + 1.0);
    const double den =
        std::tgamma(k + 1.0) * std::tgamma((n + mabs) / 2 - k + 1.0) * std::tgamma((n - mabs) / 2 - k + 1.0);
    acc += ((k % 2) ? -1.0 : 1.0) * num / den * std::pow(rho, n - 2 * k);
  }
  return acc;
}
}  // namespace

double pupil_mean(const ScalarField& f, const PupilMask& pupil) {
  require_same_grid(f.grid(), pupil.grid(), "pupil mean");
  double s = 0.0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < f.values().size(); ++i)
    if (pupil.contains(i)) {
      s += f[i];
      ++cnt;
    }
  return cnt ? s / cnt : 0.0;
}

double pupil_rms(const ScalarField& f, const PupilMask& pupil) {
  require_same_grid(f.grid(), pupil.grid(), "pupil rms");
  double s = 0.0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < f.values().size(); ++i)
    if (pupil.contains(i)) {
      s += f[i] * f[i];
      ++cnt;
    }
  return cnt ? std::sqrt(s / cnt) : 0.0;
}

ScalarField remove_piston(const ScalarField& f, const PupilMask& pupil) {
  const double mu = pupil_mean(f, pupil);
  std::vector<double> v(f.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = pupil.contains(i) ? f[i] - mu : 0.0;
  return ScalarField(f.grid(), std::move(v));
}

ScalarField zernike_mode(const Grid& grid, const PupilMask& pupil, ZernikeIndex j, double rms) {
  validate(j);
  require_same_grid(grid, pupil.grid(), "zernike");
  if (pupil.count() == 0) throw InvalidArgument("empty pupil");
  const int n = grid.n;
  if (j.n == 0) return pupil.apply(ScalarField::constant(grid, rms));
  const double R = 0.5 * pupil.diameter();
  const int mabs = std::abs(j.m);
  const double norm = j.m == 0 ? std::sqrt(j.n + 1.0) : std::sqrt(2.0 * (j.n + 1.0));
  std::vector<double> v(grid.size(), 0.0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * n + c;
      if (!pupil.contains(i)) continue;
      const double y = r - n / 2, x = c - n / 2;
      const double rho = std::hypot(x, y) / R, th = std::atan2(y, x);
      double ang = 1.0;
      if (j.m > 0) ang = std::cos(mabs * th);
      if (j.m < 0) ang = std::sin(mabs * th);
      v[i] = norm * radial(j.n, mabs, rho) * ang;
    }
  ScalarField z = remove_piston(ScalarField(grid, std::move(v)), pupil);
  const double cur = pupil_rms(z, pupil);
  if (cur == 0.0) return z;
  return (rms / cur) * z;
}

ScalarField random_zernike_phase(const Grid& grid, const PupilMask& pupil, int max_radial_order, double rms,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ScalarField acc = ScalarField::zeros(grid);
  for (const auto& j : modes_up_to_order(max_radial_order, false))
    acc = acc + gauss(rng) * zernike_mode(grid, pupil, j, 1.0);
  const double cur = pupil_rms(acc, pupil);
  return cur > 0.0 ? (rms / cur) * acc : acc;
}

ScalarField kolmogorov_screen(const Grid& grid, const ScreenParams& params) {
  if (!(params.r0 > 0.0)) throw InvalidArgument("r0 must be positive");
  if (!(params.L0 > 0.0)) throw InvalidArgument("L0 must be positive");
  const int n = grid.n;
  const double df = 1.0 / (n * grid.pitch);
  const double k0 = std::isinf(params.L0) ? 0.0 : 1.0 / (params.L0 * params.L0);
  const double amp = 0.023 * std::pow(params.r0, -5.0 / 3.0);
  auto psd = [&](double f2) { return amp * std::pow(f2 + k0, -11.0 / 6.0); };

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<cplx> c(grid.size());
  for (int r = 0; r < n; ++r)
    for (int q = 0; q < n; ++q) {
      const double a = gauss(rng), b = gauss(rng);
      const double fy = detail::fft_index(r, n) * df, fx = detail::fft_index(q, n) * df;
      const double f2 = fx * fx + fy * fy;
      c[static_cast<std::size_t>(r) * n + q] = f2 == 0.0 ? cplx(0.0) : std::sqrt(psd(f2)) * df * cplx(a, b);
    }
  detail::dft2(c, n, +1);
  std::vector<double> phase(grid.size());
  // dft2 is unitary; the synthesis sum needs the unnormalized inverse
  for (std::size_t i = 0; i < phase.size(); ++i) phase[i] = c[i].real() * n;

  if (params.subharmonic_levels > 0) {
    std::vector<double> low(grid.size(), 0.0);
    for (int p = 1; p <= params.subharmonic_levels; ++p) {
      const double dfp = df / std::pow(3.0, p);
      for (int iy = -1; iy <= 1; ++iy)
        for (int ix = -1; ix <= 1; ++ix) {
          const double a = gauss(rng), b = gauss(rng);
          if (ix == 0 && iy == 0) continue;
          const double fx = ix * dfp, fy = iy * dfp;
          const cplx coef = std::sqrt(psd(fx * fx + fy * fy)) * dfp * cplx(a, b);
          for (int r = 0; r < n; ++r)
            for (int q = 0; q < n; ++q) {
              const double arg = 2.0 * std::numbers::pi * (fx * grid.coordinate(q) + fy * grid.coordinate(r));
              low[static_cast<std::size_t>(r) * n + q] += (coef * cplx(std::cos(arg), std::sin(arg))).real();
            }
        }
    }
    double mean = 0.0;
    for (double v : low) mean += v;
    mean /= low.size();
    for (std::size_t i = 0; i < phase.size(); ++i) phase[i] += low[i] - mean;
  }

  const PupilMask omega = circular_pupil(grid, n / grid.pad_factor);
  ScalarField screen(grid, std::move(phase));
  const double mu = pupil_mean(screen, omega);
  std::vector<double> v(screen.values());
  for (double& x : v) x -= mu;
  return ScalarField(grid, std::move(v));
}

}  // namespace iquad
