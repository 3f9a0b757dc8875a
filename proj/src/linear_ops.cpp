#include "iquad/linear_ops.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

namespace iquad {

namespace {

ScalarField gaussian_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(g.size());
  for (double& x : v) x = d(rng);
  return ScalarField(g, std::move(v));
}

struct Trig {
  ScalarField c, s, hc, hs;
};

Trig trig(const ScalarField& phase, const SensorSpec& spec) {
  require_same_grid(phase.grid(), spec.grid(), "phase vs sensor");
  ScalarField c = map(phase, std::cos), s = map(phase, std::sin);
  ScalarField hc = hilbert2d(spec.pupil.apply(c));
  ScalarField hs = hilbert2d(spec.pupil.apply(s));
  return {std::move(c), std::move(s), std::move(hc), std::move(hs)};
}

ScalarField i1p(const Trig& t, const ScalarField& dir, const PupilMask& pupil) {
  const ScalarField a = hilbert2d(pupil.apply(dir * t.c));
  const ScalarField b = hilbert2d(pupil.apply(dir * t.s));
  return pupil.apply(t.c * a + t.s * b - dir * (t.c * t.hc + t.s * t.hs));
}

ScalarField i2p(const Trig& t, const ScalarField& dir, const SensorSpec& spec) {
  const ScalarField hps = hilbert2d(spec.pupil.apply(dir * t.s));
  const ScalarField hpc = hilbert2d(spec.pupil.apply(dir * t.c));
  return -spec.detector.apply(hps * t.hc - hpc * t.hs);
}

ScalarField t2_adjoint(const Trig& t, const ScalarField& data, const SensorSpec& spec) {
  const ScalarField gd = spec.detector.apply(data);
  const ScalarField gc = hilbert2d(gd * t.hc);
  const ScalarField gs = hilbert2d(gd * t.hs);
  return -spec.pupil.apply(t.s * gc - t.c * gs);
}

}  // namespace

double sobolev_inner(const ScalarField& a, const ScalarField& b, double s) {
  return dot(a, apply(sobolev_power(a.grid(), s), b));
}

double LinearOperator::domain_inner(const ScalarField& a, const ScalarField& b) const {
  return domain_sobolev ? sobolev_inner(a, b, *domain_sobolev) : dot(a, b);
}

double LinearOperator::range_inner(const ScalarField& a, const ScalarField& b) const {
  return range_sobolev ? sobolev_inner(a, b, *range_sobolev) : dot(a, b);
}

AdjointCheck verify_adjoint(const LinearOperator& op, int pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AdjointCheck out;
  for (int k = 0; k < pairs; ++k) {
    const ScalarField x = gaussian_field(op.domain, rng);
    const ScalarField y = gaussian_field(op.range, rng);
    const ScalarField ax = op.apply(x);
    const double lhs = op.range_inner(ax, y);
    const double rhs = op.domain_inner(x, op.adjoint_apply(y));
    const double scale = std::sqrt(op.range_inner(ax, ax) * op.range_inner(y, y));
    const double defect = scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
    out.worst_defect = std::max(out.worst_defect, defect);
    ++out.pairs;
  }
  return out;
}

double estimate_norm_squared(const LinearOperator& op, int steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarField v = gaussian_field(op.domain, rng);
  double best = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double vv = op.domain_inner(v, v);
    if (vv <= 0.0) break;
    v = (1.0 / std::sqrt(vv)) * v;
    const ScalarField av = op.apply(v);
    best = std::max(best, op.range_inner(av, av));
    v = op.adjoint_apply(av);
  }
  return best;
}

LinearOperator ilin_with(const SensorSpec& spec, const Multiplier& h, std::string name) {
  spec.validate();
  const Multiplier hm = h;
  const SensorSpec sp = spec;
  FieldMap f = [sp, hm](const ScalarField& x) { return ilin_apply_with(x, sp, hm); };
  return {std::move(name), f, f, spec.grid(), spec.grid(), true, std::nullopt, std::nullopt};
}

LinearOperator ilin(const SensorSpec& spec) {
  return ilin_with(spec, hilbert_multiplier(spec.grid()), "ilin");
}

LinearOperator ilin_modulated(const SensorSpec& spec) {
  if (!spec.modulation) throw InvalidArgument("ilin_modulated needs a modulation weight");
  return ilin_with(spec, modulated_multiplier(*spec.modulation), "ilin_modulated");
}

ScalarField frechet_i1_apply(const ScalarField& phase, const ScalarField& dir, const SensorSpec& spec) {
  return i1p(trig(phase, spec), dir, spec.pupil);
}

ScalarField frechet_i2_apply(const ScalarField& phase, const ScalarField& dir, const SensorSpec& spec) {
  return i2p(trig(phase, spec), dir, spec);
}

ScalarField frechet_i2_adjoint_apply(const ScalarField& phase, const ScalarField& data, const SensorSpec& spec) {
  return t2_adjoint(trig(phase, spec), data, spec);
}

LinearOperator frechet(const ScalarField& phase, const SensorSpec& spec) {
  require_iquad(spec);
  auto t = std::make_shared<const Trig>(trig(phase, spec));
  const SensorSpec sp = spec;
  FieldMap fwd = [t, sp](const ScalarField& d) { return i1p(*t, d, sp.pupil) + i2p(*t, d, sp); };
  FieldMap adj = [t, sp](const ScalarField& g) { return i1p(*t, g, sp.pupil) + t2_adjoint(*t, g, sp); };
  return {"frechet", fwd, adj, spec.grid(), spec.grid(), false, std::nullopt, std::nullopt};
}

LinearOperator frechet_i1(const ScalarField& phase, const SensorSpec& spec) {
  auto t = std::make_shared<const Trig>(trig(phase, spec));
  const PupilMask pupil = spec.pupil;
  FieldMap f = [t, pupil](const ScalarField& d) { return i1p(*t, d, pupil); };
  return {"frechet_i1", f, f, spec.grid(), spec.grid(), true, std::nullopt, std::nullopt};
}

LinearOperator frechet_adjoint(const ScalarField& phase, const SensorSpec& spec, double s) {
  check_sobolev_index(s);
  const LinearOperator d = frechet(phase, spec);
  const Multiplier e = sobolev_multiplier(spec.grid(), s);
  const FieldMap l2adj = d.adjoint_apply;
  FieldMap fwd = [l2adj, e](const ScalarField& g) { return apply(e, l2adj(g)); };
  return {"frechet_adjoint", fwd, d.apply, spec.grid(), spec.grid(), false, std::nullopt, s};
}

LinearOperator with_sobolev_domain(const LinearOperator& op, double s) {
  check_sobolev_index(s);
  if (op.domain_sobolev) throw InvalidArgument("operator domain already carries a Sobolev pairing");
  const Multiplier e = sobolev_multiplier(op.domain, s);
  const FieldMap adj = op.adjoint_apply;
  LinearOperator out = op;
  out.name = op.name + "_hs";
  out.adjoint_apply = [adj, e](const ScalarField& y) { return apply(e, adj(y)); };
  out.self_adjoint = false;
  out.domain_sobolev = s;
  return out;
}

double fit_loglog_slope(const std::vector<double>& ts, const std::vector<double>& values) {
  if (ts.size() != values.size() || ts.size() < 2) throw InvalidArgument("slope fit needs matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0.0) || !(values[i] > 0.0)) throw InvalidArgument("slope fit needs positive samples");
    const double x = std::log(ts[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

InteractionMatrix interaction_matrix(const LinearOperator& op, const std::vector<ZernikeIndex>& basis,
                                     const PupilMask& pupil, PixelSet set, const PupilMask* detector) {
  if (basis.empty()) throw InvalidArgument("interaction matrix needs a nonempty basis");
  const PupilMask& rows_mask = set == PixelSet::kDetector && detector ? *detector : pupil;
  InteractionMatrix im;
  im.basis = basis;
  im.pixels = rows_mask.pixels();
  im.mask_hash = rows_mask.hash();
  im.grid = pupil.grid();
  im.pupil = pupil;
  im.m.resize(static_cast<Eigen::Index>(im.pixels.size()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const ScalarField col = op.apply(zernike_mode(pupil.grid(), pupil, basis[j], 1.0));
    for (std::size_t r = 0; r < im.pixels.size(); ++r)
      im.m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = col[im.pixels[r]];
  }
  return im;
}

double gram_condition(const InteractionMatrix& im) {
  const Eigen::MatrixXd g = im.m.transpose() * im.m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

void write_matrix(const std::string& path, const InteractionMatrix& im) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(reinterpret_cast<const char*>(im.m.data()), static_cast<std::streamsize>(im.m.size() * sizeof(double)));
  if (!os) throw IoError("write failed: " + path);
  std::ostringstream side;
  side << "rows " << im.m.rows() << "\ncols " << im.m.cols() << "\nbasis";
  for (const auto& j : im.basis) side << ' ' << j.n << ':' << j.m;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(im.mask_hash));
  side << "\nmask_hash " << hash << "\n";
  write_text(path + ".txt", side.str());
}

}  // namespace iquad
