#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "iquad/spectral.hpp"

using namespace iquad;

namespace {

ScalarField gaussian(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(g.size());
  for (double& x : v) x = d(rng);
  return ScalarField(g, std::move(v));
}

// sin/cos products with integer cycles per grid
ScalarField mode(const Grid& g, int kx, int ky, bool sin_x, bool sin_y) {
  const int n = g.n;
  std::vector<double> v(g.size());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double ax = 2 * M_PI * kx * c / n, ay = 2 * M_PI * ky * r / n;
      v[static_cast<std::size_t>(r) * n + c] = (sin_x ? std::sin(ax) : std::cos(ax)) * (sin_y ? std::sin(ay) : std::cos(ay));
    }
  return ScalarField(g, v);
}

// direct O(n^4) DFT with the same centering and 1/n scaling
std::vector<cplx> naive_centered_dft(const std::vector<cplx>& in, int n) {
  std::vector<cplx> out(in.size());
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      cplx acc = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const double ph = -2 * M_PI * (static_cast<double>((u - n / 2) * (r - n / 2)) +
                                         static_cast<double>((v - n / 2) * (c - n / 2))) / n;
          acc += in[static_cast<std::size_t>(r) * n + c] * std::polar(1.0, ph);
        }
      out[static_cast<std::size_t>(u) * n + v] = acc / static_cast<double>(n);
    }
  return out;
}

}  // namespace

TEST_CASE("centered unitary FFT matches a direct DFT") {
  const Grid g = make_grid(8, 1.0, 1);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<cplx> v(g.size());
  for (auto& z : v) z = {d(rng), d(rng)};
  const ComplexField f(g, v);
  const auto ref = naive_centered_dft(v, 8);
  const ComplexField F = fft2(f);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(F[i] - ref[i]) < 1e-12);
  CHECK(std::abs(F.norm() - f.norm()) < 1e-12 * f.norm());
  const ComplexField back = ifft2(F);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(back[i] - v[i]) < 1e-13);
}

TEST_CASE("constant field maps to the central frequency sample") {
  const Grid g = make_grid(16, 1.0, 1);
  const ComplexField F = fft2(ComplexField::from_real(ScalarField::constant(g, 2.0)));
  CHECK(std::abs(F.at(8, 8) - cplx(32.0, 0.0)) < 1e-12);
  CHECK(std::abs(F.at(8, 9)) < 1e-12);
}

TEST_CASE("Hilbert multiplier values") {
  const Grid g = make_grid(16, 1.0, 1);
  const Multiplier h = hilbert_multiplier(g);
  CHECK(h.centered(8 + 2, 8 + 3) == cplx(-1.0, 0.0));
  CHECK(h.centered(8 - 2, 8 + 3) == cplx(1.0, 0.0));
  CHECK(h.centered(8 - 1, 8 - 5) == cplx(-1.0, 0.0));
  CHECK(h.centered(8, 8 + 3) == cplx(0.0, 0.0));
  CHECK(h.centered(8 + 4, 8) == cplx(0.0, 0.0));
  // Nyquist row and column
  CHECK(h.centered(0, 11) == cplx(0.0, 0.0));
  CHECK(h.centered(3, 0) == cplx(0.0, 0.0));
  const Multiplier hx = hilbert1d_multiplier(g, Axis::kX);
  CHECK(hx.centered(5, 8 + 2) == cplx(0.0, 1.0));
  CHECK(hx.centered(5, 8 - 2) == cplx(0.0, -1.0));
  CHECK(hx.centered(5, 8) == cplx(0.0, 0.0));
}

TEST_CASE("Hilbert transform of separable modes") {
  const Grid g = make_grid(32, 1.0, 1);
  for (auto [kx, ky] : {std::pair{1, 1}, std::pair{3, 2}, std::pair{5, 7}}) {
    // 2D kernel 1/(pi^2 (x'-x)(y'-y)): product of the 1D transforms, cos -> -sin, sin -> cos
    CHECK((hilbert2d(mode(g, kx, ky, false, false)) - mode(g, kx, ky, true, true)).max_abs() < 1e-12);
    CHECK((hilbert2d(mode(g, kx, ky, true, true)) - mode(g, kx, ky, false, false)).max_abs() < 1e-12);
    CHECK((hilbert2d(mode(g, kx, ky, true, false)) + mode(g, kx, ky, false, true)).max_abs() < 1e-12);
    CHECK((hilbert1d_along_x(mode(g, kx, ky, false, false)) + mode(g, kx, ky, true, false)).max_abs() < 1e-12);
    CHECK((hilbert1d_along_y(mode(g, kx, ky, false, true)) - mode(g, kx, ky, false, false)).max_abs() < 1e-12);
  }
  // pure x frequency lies on an axis and is annihilated
  CHECK(hilbert2d(mode(g, 3, 0, false, false)).max_abs() < 1e-13);
}

TEST_CASE("Hilbert operator properties hold for random fields") {
  for (int n : {16, 32, 64}) {
    const Grid g = make_grid(n, 1.0, 2);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const ScalarField f = gaussian(g, seed), q = gaussian(g, seed + 100);
      const ScalarField p = off_axis_projector(f);
      CHECK((hilbert2d(hilbert2d(f)) - p).max_abs() < 1e-12 * f.max_abs());
      CHECK(std::abs(hilbert2d(f).norm() - p.norm()) < 1e-12 * p.norm());
      CHECK(std::abs(dot(hilbert2d(f), q) - dot(f, hilbert2d(q))) < 1e-12 * f.norm() * q.norm());
      CHECK((off_axis_projector(p) - p).max_abs() < 1e-13 * f.max_abs());
      // H commutes with the point reflection
      CHECK((hilbert2d(reflect(f)) - reflect(hilbert2d(f))).max_abs() < 1e-12 * f.max_abs());
    }
  }
}

TEST_CASE("complex Hilbert transform acts on real and imaginary parts") {
  const Grid g = make_grid(16, 1.0, 2);
  const ScalarField a = gaussian(g, 1), b = gaussian(g, 2);
  std::vector<cplx> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {a[i], b[i]};
  const ComplexField h = hilbert2d(ComplexField(g, v));
  CHECK((h.real() - hilbert2d(a)).max_abs() < 1e-13);
  CHECK((h.imag() - hilbert2d(b)).max_abs() < 1e-13);
}

TEST_CASE("Sobolev multiplier") {
  const Grid g = make_grid(16, 0.5, 2);
  const double s = kDefaultSobolevIndex;
  CHECK(s == doctest::Approx(11.0 / 6.0));
  const Multiplier m = sobolev_multiplier(g, s);
  CHECK(m.centered(8, 8) == cplx(1.0, 0.0));
  // xi = 2 pi * cycles per unit length
  const double xi = 2 * M_PI * 3.0 / (16 * 0.5);
  CHECK(m.centered(8, 11).real() == doctest::Approx(std::pow(1.0 + xi * xi, -s)).epsilon(1e-14));
  CHECK(m.centered(8, 11).real() > m.centered(8, 12).real());
  CHECK_THROWS_AS(sobolev_multiplier(g, 1.0), InvalidArgument);
  CHECK_THROWS_AS(sobolev_multiplier(g, 2.0), InvalidArgument);
  const ScalarField f = gaussian(g, 3), q = gaussian(g, 4);
  CHECK(std::abs(dot(sobolev_adjoint(f, s), q) - dot(f, sobolev_adjoint(q, s))) < 1e-13 * f.norm() * q.norm());
  CHECK(sobolev_adjoint(f, s).norm() < f.norm());
}

TEST_CASE("modulation weights") {
  const Grid g = make_grid(64, 1.0, 2);
  for (auto prof : {ModulationProfile::kDelta, ModulationProfile::kTent, ModulationProfile::kDisk,
                    ModulationProfile::kRing}) {
    const ModulationWeight w = make_modulation(g, prof, prof == ModulationProfile::kDelta ? 0.0 : 3.0);
    double sum = 0.0;
    for (double x : w.weights()) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(parse_modulation_profile(to_string(prof)) == prof);
  }
  CHECK(parse_modulation_profile("none") == ModulationProfile::kDelta);
  CHECK_THROWS_AS(parse_modulation_profile("square"), InvalidArgument);
  // radius in lambda/D: R = radius * pad samples, R >= n/2 rejected
  CHECK_THROWS_AS(make_modulation(g, ModulationProfile::kTent, 16.0), InvalidArgument);
  const ModulationWeight ring = make_modulation(g, ModulationProfile::kRing, 2.0);
  std::size_t support = 0;
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) {
      const double rho = std::hypot(r - 32, c - 32);
      const double w = ring.weights()[static_cast<std::size_t>(r) * 64 + c];
      if (w > 0.0) {
        ++support;
        CHECK(std::abs(rho - 4.0) < 0.5);
      }
    }
  CHECK(support > 0);

  std::vector<double> bad(g.size(), 0.0);
  bad[32 * 64 + 33] = 1.0;  // not point symmetric
  CHECK_THROWS_AS(ModulationWeight::from_values(g, bad), InvalidArgument);
  bad[32 * 64 + 33] = 0.5;
  bad[32 * 64 + 31] = 0.5;
  CHECK_NOTHROW(ModulationWeight::from_values(g, bad));
  bad[32 * 64 + 31] = 0.4;
  CHECK_THROWS_AS(ModulationWeight::from_values(g, bad), InvalidArgument);
}

TEST_CASE("modulated multiplier is the weighted circular average of shifted transfer functions") {
  const Grid g = make_grid(16, 1.0, 2);
  const Multiplier h = hilbert_multiplier(g);
  const Multiplier md = modulated_multiplier(make_modulation(g, ModulationProfile::kDelta, 0.0));
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) CHECK(md.centered(r, c) == h.centered(r, c));

  std::vector<double> w(g.size(), 0.0);
  w[8 * 16 + 9] = 0.25;
  w[8 * 16 + 7] = 0.25;
  w[8 * 16 + 8] = 0.5;
  const Multiplier mw = modulated_multiplier(ModulationWeight::from_values(g, w));
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) {
      const cplx expect =
          0.5 * h.centered(r, c) + 0.25 * h.centered(r, (c + 15) % 16) + 0.25 * h.centered(r, (c + 1) % 16);
      CHECK(std::abs(mw.centered(r, c) - expect) < 1e-15);
    }
  // modulation keeps the operator symmetric and contracts it
  const ModulationWeight tent = make_modulation(g, ModulationProfile::kTent, 2.0);
  const ScalarField f = gaussian(g, 5), q = gaussian(g, 6);
  CHECK(std::abs(dot(modulated_hilbert2d(f, tent), q) - dot(f, modulated_hilbert2d(q, tent))) <
        1e-12 * f.norm() * q.norm());
  CHECK(modulated_hilbert2d(f, tent).norm() <= hilbert2d(f).norm() + 1e-12);
}
