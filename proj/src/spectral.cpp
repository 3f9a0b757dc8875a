#include "iquad/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace iquad {

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<int, int>, fftw_plan> plans;

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = plans.find({n, sign});
    if (it != plans.end()) return it->second;
    std::vector<cplx> scratch(static_cast<std::size_t>(n) * n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_2d(n, n, p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans[{n, sign}] = plan;
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

// swap quadrants; for even n this is both fftshift and ifftshift
std::vector<cplx> shift(const std::vector<cplx>& in, int n) {
  std::vector<cplx> out(in.size());
  const int h = n / 2;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      out[static_cast<std::size_t>((r + h) % n) * n + (c + h) % n] = in[static_cast<std::size_t>(r) * n + c];
  return out;
}

double sgn_index(int q, int n) {
  if (q == 0 || q == n / 2) return 0.0;
  return q < n / 2 ? 1.0 : -1.0;
}

std::vector<cplx> to_complex(const ScalarField& f) {
  std::vector<cplx> v(f.values().begin(), f.values().end());
  return v;
}

}  // namespace

namespace detail {

void dft2(std::vector<cplx>& data, int n, int sign) {
  fftw_plan plan = cache().get(n, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
  const double scale = 1.0 / n;
  for (auto& v : data) v *= scale;
}

}  // namespace detail

ComplexField fft2(const ComplexField& field) {
  const int n = field.n();
  auto v = shift(field.values(), n);
  detail::dft2(v, n, -1);
  return ComplexField(field.grid(), shift(v, n));
}

ComplexField ifft2(const ComplexField& field) {
  const int n = field.n();
  auto v = shift(field.values(), n);
  detail::dft2(v, n, +1);
  return ComplexField(field.grid(), shift(v, n));
}

Multiplier::Multiplier(const Grid& grid, std::vector<cplx> fft_order_values)
    : grid_(grid), values_(std::move(fft_order_values)) {
  if (values_.size() != grid_.size()) throw InvalidArgument("multiplier size does not match grid");
}

cplx Multiplier::centered(int row, int col) const {
  const int n = grid_.n, h = n / 2;
  return values_[static_cast<std::size_t>((row + h) % n) * n + (col + h) % n];
}

Multiplier Multiplier::operator-() const {
  std::vector<cplx> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -values_[i];
  return Multiplier(grid_, std::move(v));
}

Multiplier hilbert_multiplier(const Grid& grid) {
  const int n = grid.n;
  std::vector<cplx> v(grid.size());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      v[static_cast<std::size_t>(r) * n + c] = -sgn_index(r, n) * sgn_index(c, n);
  return Multiplier(grid, std::move(v));
}

Multiplier hilbert1d_multiplier(const Grid& grid, Axis axis) {
  const int n = grid.n;
  std::vector<cplx> v(grid.size());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      v[static_cast<std::size_t>(r) * n + c] = cplx(0.0, sgn_index(axis == Axis::kX ? c : r, n));
  return Multiplier(grid, std::move(v));
}

Multiplier sobolev_power(const Grid& grid, double exponent) {
  const int n = grid.n;
  const double df = 2.0 * std::numbers::pi / (n * grid.pitch);
  std::vector<cplx> v(grid.size());
  for (int r = 0; r < n; ++r) {
    const double eta = detail::fft_index(r, n) * df;
    for (int c = 0; c < n; ++c) {
      const double xi = detail::fft_index(c, n) * df;
      v[static_cast<std::size_t>(r) * n + c] = std::pow(1.0 + xi * xi + eta * eta, exponent);
    }
  }
  return Multiplier(grid, std::move(v));
}

void check_sobolev_index(double s) {
  if (!(s > 1.0 && s < 2.0)) throw InvalidArgument("Sobolev index must lie in (1, 2), got " + std::to_string(s));
}

Multiplier sobolev_multiplier(const Grid& grid, double s) {
  check_sobolev_index(s);
  return sobolev_power(grid, -s);
}

Multiplier off_axis_multiplier(const Grid& grid) {
  const int n = grid.n;
  std::vector<cplx> v(grid.size());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      v[static_cast<std::size_t>(r) * n + c] = std::abs(sgn_index(r, n) * sgn_index(c, n));
  return Multiplier(grid, std::move(v));
}

ComplexField apply(const Multiplier& m, const ComplexField& f) {
  require_same_grid(m.grid(), f.grid(), "multiplier");
  auto v = f.values();
  detail::dft2(v, f.n(), -1);
  const auto& mv = m.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mv[i];
  detail::dft2(v, f.n(), +1);
  return ComplexField(f.grid(), std::move(v));
}

ScalarField apply(const Multiplier& m, const ScalarField& f) {
  require_same_grid(m.grid(), f.grid(), "multiplier");
  auto v = to_complex(f);
  detail::dft2(v, f.n(), -1);
  const auto& mv = m.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mv[i];
  detail::dft2(v, f.n(), +1);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
  return ScalarField(f.grid(), std::move(out));
}

ComplexField hilbert2d(const ComplexField& field) { return apply(hilbert_multiplier(field.grid()), field); }
ScalarField hilbert2d(const ScalarField& field) { return apply(hilbert_multiplier(field.grid()), field); }

ScalarField hilbert1d_along_x(const ScalarField& field) {
  return apply(hilbert1d_multiplier(field.grid(), Axis::kX), field);
}
ScalarField hilbert1d_along_y(const ScalarField& field) {
  return apply(hilbert1d_multiplier(field.grid(), Axis::kY), field);
}

ScalarField sobolev_adjoint(const ScalarField& field, double s) {
  return apply(sobolev_multiplier(field.grid(), s), field);
}

ScalarField off_axis_projector(const ScalarField& field) { return apply(off_axis_multiplier(field.grid()), field); }

ModulationProfile parse_modulation_profile(const std::string& name) {
  if (name == "delta" || name == "none") return ModulationProfile::kDelta;
  if (name == "tent") return ModulationProfile::kTent;
  if (name == "disk") return ModulationProfile::kDisk;
  if (name == "ring") return ModulationProfile::kRing;
  throw InvalidArgument("unknown modulation profile: " + name);
}

std::string to_string(ModulationProfile p) {
  switch (p) {
    case ModulationProfile::kDelta: return "delta";
    case ModulationProfile::kTent: return "tent";
    case ModulationProfile::kDisk: return "disk";
    case ModulationProfile::kRing: return "ring";
  }
  return "delta";
}

ModulationWeight ModulationWeight::from_values(const Grid& grid, std::vector<double> w, ModulationProfile profile,
                                               double radius) {
  ModulationWeight out;
  out.grid_ = grid;
  out.w_ = std::move(w);
  out.profile_ = profile;
  out.radius_ = radius;
  out.validate();
  return out;
}

void ModulationWeight::validate() const {
  const int n = grid_.n;
  if (w_.size() != grid_.size()) throw InvalidArgument("modulation weight size does not match grid");
  double total = 0.0, peak = 0.0;
  for (double v : w_) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("modulation weight must be finite and nonnegative");
    total += v;
    peak = std::max(peak, v);
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("modulation weight is not normalized (sum " +
                                                           std::to_string(total) + ")");
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double a = w_[static_cast<std::size_t>(r) * n + c];
      const double b = w_[static_cast<std::size_t>((n - r) % n) * n + (n - c) % n];
      if (std::abs(a - b) > 1e-14 * peak) throw InvalidArgument("modulation weight is not point symmetric");
    }
}

ModulationWeight make_modulation(const Grid& grid, ModulationProfile profile, double radius) {
  if (radius < 0.0 || !std::isfinite(radius)) throw InvalidArgument("modulation radius must be >= 0");
  const int n = grid.n;
  const double R = radius * grid.pad_factor;
  std::vector<double> w(grid.size(), 0.0);
  if (profile == ModulationProfile::kDelta || R == 0.0) {
    w[static_cast<std::size_t>(n / 2) * n + n / 2] = 1.0;
  } else {
    if (R >= n / 2) throw InvalidArgument("modulation radius exceeds the frequency lattice");
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const double rho = std::hypot(r - n / 2, c - n / 2);
        double v = 0.0;
        switch (profile) {
          case ModulationProfile::kTent: v = std::max(0.0, 1.0 - rho / R); break;
          case ModulationProfile::kDisk: v = rho <= R ? 1.0 : 0.0; break;
          case ModulationProfile::kRing: v = std::abs(rho - R) < 0.5 ? 1.0 : 0.0; break;
          case ModulationProfile::kDelta: break;
        }
        w[static_cast<std::size_t>(r) * n + c] = v;
      }
    double total = 0.0;
    for (double v : w) total += v;
    for (double& v : w) v /= total;
  }
  return ModulationWeight::from_values(grid, std::move(w), profile, radius);
}

Multiplier modulated_multiplier(const ModulationWeight& w, const Multiplier& base) {
  w.validate();
  require_same_grid(w.grid(), base.grid(), "modulation weight");
  const int n = w.grid().n;
  const auto& M = base.values();
  std::vector<cplx> out(w.grid().size(), 0.0);
  const auto& wv = w.weights();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double wt = wv[static_cast<std::size_t>(r) * n + c];
      if (wt == 0.0) continue;
      const int oy = r - n / 2, ox = c - n / 2;
      for (int qy = 0; qy < n; ++qy) {
        const int sy = ((qy - oy) % n + n) % n;
        for (int qx = 0; qx < n; ++qx) {
          const int sx = ((qx - ox) % n + n) % n;
          out[static_cast<std::size_t>(qy) * n + qx] += wt * M[static_cast<std::size_t>(sy) * n + sx];
        }
      }
    }
  return Multiplier(w.grid(), std::move(out));
}

Multiplier modulated_multiplier(const ModulationWeight& w) {
  return modulated_multiplier(w, hilbert_multiplier(w.grid()));
}

ComplexField modulated_hilbert2d(const ComplexField& field, const ModulationWeight& w) {
  return apply(modulated_multiplier(w), field);
}

ScalarField modulated_hilbert2d(const ScalarField& field, const ModulationWeight& w) {
  return apply(modulated_multiplier(w), field);
}

}  // namespace iquad
