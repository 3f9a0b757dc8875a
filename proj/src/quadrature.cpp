#include "iquad/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace iquad {

namespace {

constexpr double kPi = std::numbers::pi;

void guard(const Grid& g, int limit, const char* what) {
  if (g.n > limit)
    throw InvalidArgument(std::string(what) + ": oracle limited to n <= " + std::to_string(limit) + ", got " +
                          std::to_string(g.n));
}

// kernel table indexed by m + (n - 1), m in [-(n-1), n-1]
std::vector<double> kernel_table(int n, const QuadratureScheme& scheme) {
  std::vector<double> k(2 * n - 1);
  for (int m = -(n - 1); m <= n - 1; ++m) k[m + n - 1] = pv_kernel(m, n, scheme);
  return k;
}

struct Kernel2 {
  int n;
  std::vector<double> k;
  double operator()(int dy, int dx) const { return k[dy + n - 1] * k[dx + n - 1]; }
};

Kernel2 kernel2(int n, const QuadratureScheme& scheme) { return {n, kernel_table(n, scheme)}; }

struct Pix {
  int r, c;
  std::size_t i;
};

std::vector<Pix> pixels_of(const PupilMask& mask) {
  std::vector<Pix> out;
  const int n = mask.grid().n;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * n + c;
      if (mask.contains(i)) out.push_back({r, c, i});
    }
  return out;
}

ScalarField sq(const ScalarField& f) { return f * f; }

}  // namespace

double pv_kernel(int m, int n, const QuadratureScheme& scheme) {
  const bool offset = scheme.singularity == QuadratureScheme::Singularity::kOffset;
  if (!scheme.periodic) {
    if (offset) return m / ((m * m - 0.25) * kPi);
    return m == 0 ? 0.0 : 1.0 / (kPi * m);
  }
  const int mm = ((m % n) + n) % n;
  if (offset) {
    return 0.5 / n * (1.0 / std::tan(kPi * (mm + 0.5) / n) + 1.0 / std::tan(kPi * (mm - 0.5) / n));
  }
  return mm == 0 ? 0.0 : 1.0 / (n * std::tan(kPi * mm / n));
}

ScalarField pv_hilbert2d(const ScalarField& field, const QuadratureScheme& scheme) {
  guard(field.grid(), kOracleMaxN, "pv_hilbert2d");
  const int n = field.n();
  const Kernel2 K = kernel2(n, scheme);
  std::vector<double> out(field.grid().size(), 0.0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int rp = 0; rp < n; ++rp)
        for (int cp = 0; cp < n; ++cp) acc += K(rp - r, cp - c) * field.at(rp, cp);
      out[static_cast<std::size_t>(r) * n + c] = acc;
    }
  return ScalarField(field.grid(), std::move(out));
}

ScalarField pv_hilbert1d(const ScalarField& field, Axis axis, const QuadratureScheme& scheme) {
  guard(field.grid(), kOracleMaxN, "pv_hilbert1d");
  const int n = field.n();
  const auto k = kernel_table(n, scheme);
  std::vector<double> out(field.grid().size(), 0.0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int p = 0; p < n; ++p)
        acc += axis == Axis::kX ? k[p - c + n - 1] * field.at(r, p) : k[p - r + n - 1] * field.at(p, c);
      out[static_cast<std::size_t>(r) * n + c] = acc;
    }
  return ScalarField(field.grid(), std::move(out));
}

ScalarField pv_i1(const ScalarField& phase, const PupilMask& pupil, const QuadratureScheme& scheme) {
  guard(phase.grid(), kOracleMaxN, "pv_i1");
  require_same_grid(phase.grid(), pupil.grid(), "pv_i1");
  const int n = phase.n();
  const Kernel2 K = kernel2(n, scheme);
  const auto px = pixels_of(pupil);
  std::vector<double> out(phase.grid().size(), 0.0);
  for (const Pix& a : px) {
    double acc = 0.0;
    for (const Pix& b : px) acc += K(b.r - a.r, b.c - a.c) * std::sin(phase[b.i] - phase[a.i]);
    out[a.i] = acc;
  }
  return ScalarField(phase.grid(), std::move(out));
}

ScalarField pv_ilin(const ScalarField& phase, const PupilMask& pupil, const QuadratureScheme& scheme) {
  guard(phase.grid(), kOracleMaxN, "pv_ilin");
  require_same_grid(phase.grid(), pupil.grid(), "pv_ilin");
  const int n = phase.n();
  const Kernel2 K = kernel2(n, scheme);
  const auto px = pixels_of(pupil);
  std::vector<double> out(phase.grid().size(), 0.0);
  for (const Pix& a : px) {
    double acc = 0.0;
    for (const Pix& b : px) acc += K(b.r - a.r, b.c - a.c) * (phase[b.i] - phase[a.i]);
    out[a.i] = acc;
  }
  return ScalarField(phase.grid(), std::move(out));
}

ScalarField pv_i2(const ScalarField& phase, const PupilMask& pupil, const PupilMask& detector,
                  const QuadratureScheme& scheme) {
  guard(phase.grid(), kOracleQuadMaxN, "pv_i2");
  const ScalarField c = pupil.apply(map(phase, std::cos));
  const ScalarField s = pupil.apply(map(phase, std::sin));
  const ScalarField hc = pv_hilbert2d(c, scheme), hs = pv_hilbert2d(s, scheme);
  const ScalarField h1 = pv_hilbert2d(pupil.field(), scheme);
  return detector.apply(0.5 * (sq(hc) + sq(hs) - sq(h1)));
}

ScalarField pv_i2_raw(const ScalarField& phase, const PupilMask& pupil, const PupilMask& detector,
                      const QuadratureScheme& scheme) {
  guard(phase.grid(), kOracleRawMaxN, "pv_i2_raw");
  const int n = phase.n();
  const Kernel2 K = kernel2(n, scheme);
  const auto px = pixels_of(pupil);
  const auto det = pixels_of(detector);
  std::vector<double> out(phase.grid().size(), 0.0);
  for (const Pix& x : det) {
    double acc = 0.0;
    for (const Pix& a : px) {
      const double ka = K(a.r - x.r, a.c - x.c);
      for (const Pix& b : px) acc += ka * K(b.r - x.r, b.c - x.c) * (std::cos(phase[a.i] - phase[b.i]) - 1.0);
    }
    out[x.i] = 0.5 * acc;
  }
  return ScalarField(phase.grid(), std::move(out));
}

ScalarField pv_frechet_i1(const ScalarField& phase, const ScalarField& direction, const PupilMask& pupil,
                          const QuadratureScheme& scheme) {
  guard(phase.grid(), kOracleQuadMaxN, "pv_frechet");
  require_same_grid(phase.grid(), direction.grid(), "pv_frechet");
  const int n = phase.n();
  const Kernel2 K = kernel2(n, scheme);
  const auto px = pixels_of(pupil);
  std::vector<double> out(phase.grid().size(), 0.0);
  for (const Pix& a : px) {
    double acc = 0.0;
    for (const Pix& b : px)
      acc += K(b.r - a.r, b.c - a.c) * std::cos(phase[b.i] - phase[a.i]) * (direction[b.i] - direction[a.i]);
    out[a.i] = acc;
  }
  return ScalarField(phase.grid(), std::move(out));
}

ScalarField pv_frechet_i2(const ScalarField& phase, const ScalarField& direction, const PupilMask& pupil,
                          const PupilMask& detector, const QuadratureScheme& scheme) {
  guard(phase.grid(), kOracleQuadMaxN, "pv_frechet");
  const ScalarField c = map(phase, std::cos), s = map(phase, std::sin);
  const ScalarField hc = pv_hilbert2d(pupil.apply(c), scheme);
  const ScalarField hs = pv_hilbert2d(pupil.apply(s), scheme);
  const ScalarField hps = pv_hilbert2d(pupil.apply(direction * s), scheme);
  const ScalarField hpc = pv_hilbert2d(pupil.apply(direction * c), scheme);
  return -detector.apply(hps * hc - hpc * hs);
}

ScalarField pv_frechet_i2_raw(const ScalarField& phase, const ScalarField& direction, const PupilMask& pupil,
                              const PupilMask& detector, const QuadratureScheme& scheme) {
  guard(phase.grid(), kOracleRawMaxN, "pv_frechet_i2_raw");
  const int n = phase.n();
  const Kernel2 K = kernel2(n, scheme);
  const auto px = pixels_of(pupil);
  const auto det = pixels_of(detector);
  std::vector<double> out(phase.grid().size(), 0.0);
  for (const Pix& x : det) {
    double acc = 0.0;
    for (const Pix& a : px) {
      const double ka = K(a.r - x.r, a.c - x.c);
      for (const Pix& b : px)
        acc += ka * K(b.r - x.r, b.c - x.c) * std::sin(phase[a.i] - phase[b.i]) * (direction[a.i] - direction[b.i]);
    }
    out[x.i] = -0.5 * acc;
  }
  return ScalarField(phase.grid(), std::move(out));
}

ScalarField pv_frechet(const ScalarField& phase, const ScalarField& direction, const PupilMask& pupil,
                       const PupilMask& detector, const QuadratureScheme& scheme) {
  return pv_frechet_i1(phase, direction, pupil, scheme) + pv_frechet_i2(phase, direction, pupil, detector, scheme);
}

ScalarField pv_adjoint_l2(const ScalarField& phase, const ScalarField& data, const PupilMask& pupil,
                          const PupilMask& detector, const QuadratureScheme& scheme) {
  guard(phase.grid(), kOracleQuadMaxN, "pv_adjoint");
  const ScalarField c = map(phase, std::cos), s = map(phase, std::sin);
  const ScalarField hc = pv_hilbert2d(pupil.apply(c), scheme);
  const ScalarField hs = pv_hilbert2d(pupil.apply(s), scheme);
  const ScalarField gd = detector.apply(data);
  const ScalarField gc = pv_hilbert2d(gd * hc, scheme);
  const ScalarField gs = pv_hilbert2d(gd * hs, scheme);
  const ScalarField t2 = -pupil.apply(s * gc - c * gs);
  return pv_frechet_i1(phase, data, pupil, scheme) + t2;
}

ScalarField pv_adjoint(const ScalarField& phase, const ScalarField& data, const PupilMask& pupil,
                       const PupilMask& detector, double s, const QuadratureScheme& scheme) {
  check_sobolev_index(s);
  return sobolev_adjoint(pv_adjoint_l2(phase, data, pupil, detector, scheme), s);
}

}  // namespace iquad
