#include "ngi/reconstruct.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "ngi/errors.hpp"
#include "ngi/fft.hpp"
#include "ngi/rng.hpp"
#include "ngi/threads.hpp"

namespace ngi {

MagnitudeImage magnitude_from_correlation(const CorrelationMap& map, const Scene& scene) {
  if (map.statistics != Statistics::kFermion)
    throw StatsError("magnitude_from_correlation expects a fermion-statistics map");
  if (!map.normalization.contains("total_factor") || map.total_factor <= 0.0)
    throw MissingInputError("magnitude_from_correlation: missing normalization metadata");

  MagnitudeImage mag;
  mag.grid = map.grid;
  mag.lambda_d2 = scene.geom.lambda * scene.geom.d2;
  mag.spin = map.spin;
  mag.position_label = map.position_label;
  mag.values = Array2<double>(map.values.n0, map.values.n1);
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    double v = map.values.data[i];
    if (v > 0.0) {
      double gate = map.stderr_map ? 3.0 * map.stderr_map->data[i] : 0.0;
      if (v > gate) mag.clamped_positive_excursion = true;
      mag.values.data[i] = 0.0;
    } else {
      mag.values.data[i] = std::sqrt(-v / map.total_factor);
    }
  }
  return mag;
}

std::size_t SupportMask::count() const {
  std::size_t c = 0;
  for (auto v : inside.data) c += v ? 1 : 0;
  return c;
}

// ---------------------------------------------------------------------------
// Phase retrieval

namespace {

void fft2_inplace(Array2<cd>& a, int sign) { fft::transform2d(a.data.data(), a.n0, a.n1, sign); }

double fourier_residual(const Array2<cd>& G, const Array2<double>& mag, double mag_norm) {
  double acc = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i) {
    double d = std::abs(G.data[i]) - mag.data[i];
    acc += d * d;
  }
  return std::sqrt(acc) / mag_norm;
}

}  // namespace

RetrievalResult phase_retrieve(const Array2<double>& mag, const SupportMask& support,
                               const PhaseRetrieveParams& params) {
  const std::size_t n0 = mag.n0, n1 = mag.n1;
  if (!support.inside.same_dims(Array2<std::uint8_t>(n0, n1)))
    throw ConfigError("phase_retrieve: support dims must match the magnitude frame");
  std::size_t scount = support.count();
  if (scount == 0) throw ConfigError("phase_retrieve: empty support");

  // Oversampling precondition: frame at least twice the support bounding box
  // per axis.
  std::size_t lo0 = n0, hi0 = 0, lo1 = n1, hi1 = 0;
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j)
      if (support.inside.at(i, j)) {
        lo0 = std::min(lo0, i);
        hi0 = std::max(hi0, i);
        lo1 = std::min(lo1, j);
        hi1 = std::max(hi1, j);
      }
  if (n0 < 2 * (hi0 - lo0 + 1) || n1 < 2 * (hi1 - lo1 + 1))
    throw ConfigError("phase_retrieve: oversampling ratio below 2 per axis");

  double mag_norm = 0.0;
  for (double v : mag.data) mag_norm += v * v;
  mag_norm = std::sqrt(mag_norm);
  if (mag_norm == 0.0) throw ConfigError("phase_retrieve: zero magnitude");

  RetrievalResult result;
  result.restart_residuals.assign(params.restarts, 0.0);
  result.traces.resize(params.restarts);
  result.restart_objects.resize(params.restarts);

  const bool real_mode = params.constraint == RetrievalConstraint::kRealNonnegative;
  const double beta = params.beta_feedback;
  const double inv_n = 1.0 / static_cast<double>(n0 * n1);

  parallel_for(params.restarts, [&](std::int64_t r0, std::int64_t r1) {
    for (std::int64_t r = r0; r < r1; ++r) {
      RngStream rng(params.seed, static_cast<std::uint64_t>(r));
      Array2<cd> g(n0, n1);
      // random-phase start on the measured modulus
      for (std::size_t i = 0; i < g.size(); ++i) {
        double ph = kTwoPi * rng.uniform();
        g.data[i] = mag.data[i] * std::exp(cd(0.0, ph));
      }
      fft2_inplace(g, -kFourierSign);
      for (auto& v : g.data) v *= inv_n;

      Array2<cd> G(n0, n1);
      double res = 1.0;
      auto& trace = result.traces[r];
      for (int it = 0; it < params.n_iter; ++it) {
        G = g;
        fft2_inplace(G, kFourierSign);
        res = fourier_residual(G, mag, mag_norm);
        if (it % params.trace_stride == 0 || it == params.n_iter - 1)
          trace.emplace_back(it, res);
        for (std::size_t i = 0; i < G.size(); ++i) {
          double m = std::abs(G.data[i]);
          G.data[i] = m > 0.0 ? G.data[i] * (mag.data[i] / m) : cd(mag.data[i], 0.0);
        }
        fft2_inplace(G, -kFourierSign);
        for (auto& v : G.data) v *= inv_n;

        bool er_phase = (it % 50) >= 40;  // HIO 40 / ER 10 cycle
        for (std::size_t i = 0; i < g.size(); ++i) {
          cd gp = real_mode ? cd(G.data[i].real(), 0.0) : G.data[i];
          bool ok = support.inside.data[i] && (!real_mode || gp.real() >= 0.0);
          if (er_phase)
            g.data[i] = ok ? gp : cd(0.0);
          else
            g.data[i] = ok ? gp : g.data[i] - beta * gp;
        }
      }
      // score the constrained object
      Array2<cd> G2 = g;
      fft2_inplace(G2, kFourierSign);
      result.restart_residuals[r] = fourier_residual(G2, mag, mag_norm);
      result.restart_objects[r] = std::move(g);
    }
  });

  int best = 0;
  for (int r = 1; r < params.restarts; ++r)
    if (result.restart_residuals[r] < result.restart_residuals[best]) best = r;
  result.best_restart = best;
  result.residual = result.restart_residuals[best];
  result.object = result.restart_objects[best];
  return result;
}

// ---------------------------------------------------------------------------
// Trivial-ambiguity registration

namespace {

Array2<cd> conj_spatial_flip(const Array2<cd>& x) {
  Array2<cd> out(x.n0, x.n1);
  for (std::size_t i = 0; i < x.n0; ++i)
    for (std::size_t j = 0; j < x.n1; ++j) {
      std::size_t fi = (x.n0 - i) % x.n0;
      std::size_t fj = (x.n1 - j) % x.n1;
      out.at(i, j) = std::conj(x.at(fi, fj));
    }
  return out;
}

}  // namespace

RegisterScore register_and_score(const Array2<cd>& recon, const Array2<cd>& truth) {
  if (!recon.same_dims(truth)) throw ConfigError("register_and_score: dimension mismatch");
  double tn2 = 0.0;
  for (const auto& v : truth.data) tn2 += std::norm(v);
  if (tn2 == 0.0) throw ConfigError("register_and_score: zero-norm truth");

  Array2<cd> T = truth;
  fft2_inplace(T, -1);

  RegisterScore best;
  best.nrmse = std::numeric_limits<double>::infinity();
  for (int flip = 0; flip < 2; ++flip) {
    Array2<cd> x = flip ? conj_spatial_flip(recon) : recon;
    double xn2 = 0.0;
    for (const auto& v : x.data) xn2 += std::norm(v);
    Array2<cd> X = x;
    fft2_inplace(X, -1);
    for (std::size_t i = 0; i < X.size(); ++i) X.data[i] *= std::conj(T.data[i]);
    fft2_inplace(X, -1);
    double inv_n = 1.0 / static_cast<double>(X.size());
    // X now holds G(s) * N: inner products over all circular shifts
    std::size_t arg = 0;
    double gmax = -1.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      double m = std::abs(X.data[i]);
      if (m > gmax) {
        gmax = m;
        arg = i;
      }
    }
    gmax *= inv_n;
    double err2 = std::max(0.0, xn2 + tn2 - 2.0 * gmax);
    double nrmse = std::sqrt(err2 / tn2);
    if (nrmse < best.nrmse) {
      best.nrmse = nrmse;
      best.flipped = flip != 0;
      best.shift0 = static_cast<long>(arg / X.n1);
      best.shift1 = static_cast<long>(arg % X.n1);
      cd G = X.data[arg] * inv_n;
      best.phase = std::abs(G) > 0.0 ? std::conj(G) / std::abs(G) : cd(1.0, 0.0);
    }
  }
  return best;
}

Array2<cd> apply_registration(const Array2<cd>& recon, const RegisterScore& reg) {
  Array2<cd> x = reg.flipped ? conj_spatial_flip(recon) : recon;
  Array2<cd> out(x.n0, x.n1);
  for (std::size_t i = 0; i < x.n0; ++i)
    for (std::size_t j = 0; j < x.n1; ++j) {
      std::size_t si = (i + x.n0 - static_cast<std::size_t>(reg.shift0 % static_cast<long>(x.n0) +
                                                            static_cast<long>(x.n0)) %
                                       x.n0) %
                       x.n0;
      std::size_t sj = (j + x.n1 - static_cast<std::size_t>(reg.shift1 % static_cast<long>(x.n1) +
                                                            static_cast<long>(x.n1)) %
                                       x.n1) %
                       x.n1;
      out.at(i, j) = reg.phase * x.at(si, sj);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Per-pixel linear inversion

ComponentMaps solve_components(const Array2<cd>& s1_up, const Array2<cd>& s1_down,
                               const Array2<cd>& s2_down, const Array2<cd>& s3_up,
                               const Array2<cd>& s3_down, double theta, double beta) {
  const Array2<cd>* imgs[5] = {&s1_up, &s1_down, &s2_down, &s3_up, &s3_down};
  for (int i = 1; i < 5; ++i)
    if (!imgs[i]->same_dims(*imgs[0]))
      throw ConfigError("solve_components: dimension mismatch across S-images");
  if (!(theta > 1e-3))
    throw GeometryError("solve_components: theta below the 1e-3 conditioning floor");
  if (!(theta < kPi / 2)) throw GeometryError("solve_components: theta out of range");
  if (beta == 0.0) throw ConfigError("solve_components: beta must be nonzero");

  CoefficientMatrix cm = coefficient_matrix(theta);
  Eigen::Matrix<double, 10, 4> R;
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 4; ++c) {
      R(2 * r, c) = cm.entries[r][c].real();
      R(2 * r + 1, c) = cm.entries[r][c].imag();
    }

  Eigen::JacobiSVD<Eigen::Matrix<double, 10, 4>> svd(R);
  double cond = svd.singularValues()(0) / svd.singularValues()(3);

  // Thin QR once; per pixel x = U^-1 (Q^T b).
  Eigen::HouseholderQR<Eigen::Matrix<double, 10, 4>> qr(R);
  Eigen::Matrix<double, 10, 10> Qfull = qr.householderQ();
  Eigen::Matrix<double, 10, 4> Q = Qfull.leftCols<4>();
  Eigen::Matrix<double, 4, 4> U =
      qr.matrixQR().topLeftCorner<4, 4>().triangularView<Eigen::Upper>();
  Eigen::Matrix<double, 4, 4> Uinv = U.inverse();

  const std::size_t n0 = imgs[0]->n0, n1 = imgs[0]->n1;
  ComponentMaps out;
  out.Mx = Array2<double>(n0, n1);
  out.My = Array2<double>(n0, n1);
  out.Mz = Array2<double>(n0, n1);
  out.A = Array2<double>(n0, n1);
  out.residual = Array2<double>(n0, n1);
  out.condition_number = cond;

  parallel_for(static_cast<std::int64_t>(n0 * n1), [&](std::int64_t p0, std::int64_t p1) {
    Eigen::Matrix<double, 10, 1> b;
    for (std::int64_t pix = p0; pix < p1; ++pix) {
      for (int r = 0; r < 5; ++r) {
        cd s = imgs[r]->data[pix];
        b(2 * r) = s.real();
        b(2 * r + 1) = s.imag();
      }
      Eigen::Matrix<double, 4, 1> x = Uinv * (Q.transpose() * b);
      out.residual.data[pix] = (R * x - b).norm();
      out.Mx.data[pix] = x(0) / beta;
      out.My.data[pix] = x(1) / beta;
      out.Mz.data[pix] = x(2) / beta;
      out.A.data[pix] = x(3);
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Sample rotation

namespace {

struct Rot3 {
  double m[3][3];
  Vec3 apply(Vec3 v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }
  Rot3 transpose() const {
    Rot3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.m[i][j] = m[j][i];
    return t;
  }
};

Rot3 rotation_matrix(double angle, RotationAxis axis) {
  double s = std::sin(angle), c = std::cos(angle);
  // snap right-angle values so on-lattice rotations are exact
  if (std::abs(s) < 1e-12) {
    s = 0.0;
    c = c >= 0.0 ? 1.0 : -1.0;
  } else if (std::abs(c) < 1e-12) {
    c = 0.0;
    s = s >= 0.0 ? 1.0 : -1.0;
  }
  if (axis == RotationAxis::kZ)
    return Rot3{{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
  return Rot3{{{1.0, 0.0, 0.0}, {0.0, c, -s}, {0.0, s, c}}};
}

double trilinear(const Array3<double>& a, double fi, double fj, double fk) {
  if (fi <= -1.0 || fj <= -1.0 || fk <= -1.0 || fi >= static_cast<double>(a.n0) ||
      fj >= static_cast<double>(a.n1) || fk >= static_cast<double>(a.n2))
    return 0.0;
  double wi = std::floor(fi), wj = std::floor(fj), wk = std::floor(fk);
  double di = fi - wi, dj = fj - wj, dk = fk - wk;
  long i0 = static_cast<long>(wi), j0 = static_cast<long>(wj), k0 = static_cast<long>(wk);
  double acc = 0.0;
  for (int oi = 0; oi < 2; ++oi)
    for (int oj = 0; oj < 2; ++oj)
      for (int ok = 0; ok < 2; ++ok) {
        double w = (oi ? di : 1.0 - di) * (oj ? dj : 1.0 - dj) * (ok ? dk : 1.0 - dk);
        if (w == 0.0) continue;
        long i = i0 + oi, j = j0 + oj, k = k0 + ok;
        if (i < 0 || j < 0 || k < 0 || i >= static_cast<long>(a.n0) ||
            j >= static_cast<long>(a.n1) || k >= static_cast<long>(a.n2))
          continue;
        acc += w * a.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                        static_cast<std::size_t>(k));
      }
  return acc;
}

}  // namespace

SampleGrid rotate_sample(const SampleGrid& grid, double angle, RotationAxis axis) {
  Rot3 R = rotation_matrix(angle, axis);
  Rot3 Rinv = R.transpose();
  SampleGrid out = SampleGrid::zeros(grid.nx, grid.ny, grid.nz, grid.pitch);

  auto frac_index = [&](double coord, std::size_t n) {
    return coord / grid.pitch + (static_cast<double>(n) - 1.0) / 2.0;
  };

  parallel_for(static_cast<std::int64_t>(grid.nx), [&](std::int64_t i0, std::int64_t i1) {
    for (std::int64_t i = i0; i < i1; ++i)
      for (std::size_t j = 0; j < grid.ny; ++j)
        for (std::size_t k = 0; k < grid.nz; ++k) {
          Vec3 p = grid.voxel_pos(static_cast<std::size_t>(i), j, k);
          Vec3 src = Rinv.apply(p);
          double fi = frac_index(src.x, grid.nx);
          double fj = frac_index(src.y, grid.ny);
          double fk = frac_index(src.z, grid.nz);
          out.A.at(i, j, k) = trilinear(grid.A, fi, fj, fk);
          Vec3 m{trilinear(grid.Mx, fi, fj, fk), trilinear(grid.My, fi, fj, fk),
                 trilinear(grid.Mz, fi, fj, fk)};
          Vec3 mr = R.apply(m);
          out.Mx.at(i, j, k) = mr.x;
          out.My.at(i, j, k) = mr.y;
          out.Mz.at(i, j, k) = mr.z;
        }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Filtered back-projection

Volume tomo_fbp(const std::vector<Array2<double>>& projections,
                const std::vector<double>& angles, TomoFilter filter, double pitch,
                RotationAxis axis) {
  if (projections.size() < 2 || projections.size() != angles.size())
    throw GeometryError("tomo_fbp: need >= 2 projections with matching angles");
  const std::size_t ns = projections[0].n0;
  const std::size_t nslice = projections[0].n1;
  for (const auto& p : projections)
    if (p.n0 != ns || p.n1 != nslice) throw GeometryError("tomo_fbp: projection dims differ");

  // Coverage: uniform-grid reading, each angle owning one Riemann cell.
  std::vector<double> sorted = angles;
  std::sort(sorted.begin(), sorted.end());
  double span = sorted.back() - sorted.front();
  double mean_gap = span / static_cast<double>(sorted.size() - 1);
  double coverage = span + mean_gap;
  if (coverage < kPi - 1e-9) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "angle coverage %.4f rad < pi", coverage);
    throw GeometryError(msg);
  }

  // Discrete ramp kernel (band-limited |f|), optional Shepp-Logan window.
  const std::size_t npad = fft::next_pow2(2 * ns);
  std::vector<cd> H(npad, cd(0.0));
  for (std::size_t j = 0; j < npad; ++j) {
    long d = static_cast<long>(j);
    if (d > static_cast<long>(npad / 2)) d -= static_cast<long>(npad);
    if (d == 0)
      H[j] = cd(0.25 / (pitch * pitch), 0.0);
    else if (d % 2 != 0)
      H[j] = cd(-1.0 / (kPi * kPi * static_cast<double>(d) * static_cast<double>(d) * pitch *
                        pitch),
                0.0);
  }
  fft::transform(H.data(), npad, -1);
  if (filter == TomoFilter::kSheppLogan) {
    for (std::size_t m = 0; m < npad; ++m) {
      double fn = static_cast<double>(std::min(m, npad - m)) / (static_cast<double>(npad) / 2.0);
      if (fn > 0.0) {
        double u = kPi * fn / 2.0;
        H[m] *= std::sin(u) / u;
      }
    }
  }

  // Filter all projections.
  const std::size_t nang = projections.size();
  std::vector<std::vector<double>> filtered(nang);
  parallel_for(static_cast<std::int64_t>(nang), [&](std::int64_t a0, std::int64_t a1) {
    std::vector<cd> buf(npad);
    for (std::int64_t a = a0; a < a1; ++a) {
      filtered[a].assign(ns * nslice, 0.0);
      for (std::size_t sl = 0; sl < nslice; ++sl) {
        std::fill(buf.begin(), buf.end(), cd(0.0));
        for (std::size_t s = 0; s < ns; ++s) buf[s] = cd(projections[a].at(s, sl), 0.0);
        fft::transform(buf.data(), npad, -1);
        for (std::size_t m = 0; m < npad; ++m) buf[m] *= H[m];
        fft::transform(buf.data(), npad, +1);
        double inv = pitch / static_cast<double>(npad);
        for (std::size_t s = 0; s < ns; ++s)
          filtered[a][s * nslice + sl] = buf[s].real() * inv;
      }
    }
  });

  // Backproject; the (u, v) slice plane and s mapping are chosen so the
  // forward model rotate_sample(angle, axis) followed by project_y is
  // inverted. axis z: s = u cos a - v sin a with (u,v) = (x,y);
  // axis x: s = u cos a + v sin a with (u,v) = (z,y).
  Volume vol;
  vol.pitch = pitch;
  vol.axis = axis;
  if (axis == RotationAxis::kZ)
    vol.values = Array3<double>(ns, ns, nslice, 0.0);
  else
    vol.values = Array3<double>(nslice, ns, ns, 0.0);

  const double dtheta = kPi / static_cast<double>(nang);
  const double s0 = centered_coord(0, ns, pitch);
  parallel_for(static_cast<std::int64_t>(ns), [&](std::int64_t u0, std::int64_t u1) {
    for (std::int64_t iu = u0; iu < u1; ++iu) {
      double u = centered_coord(static_cast<std::size_t>(iu), ns, pitch);
      for (std::size_t iv = 0; iv < ns; ++iv) {
        double v = centered_coord(iv, ns, pitch);
        for (std::size_t sl = 0; sl < nslice; ++sl) {
          double acc = 0.0;
          for (std::size_t a = 0; a < nang; ++a) {
            double ca = std::cos(angles[a]), sa = std::sin(angles[a]);
            double s = axis == RotationAxis::kZ ? u * ca - v * sa : u * ca + v * sa;
            double idx = (s - s0) / pitch;
            if (idx < 0.0 || idx > static_cast<double>(ns - 1)) continue;
            std::size_t b = std::min(static_cast<std::size_t>(idx), ns - 2);
            double fr = idx - static_cast<double>(b);
            const double* f = filtered[a].data();
            acc += (1.0 - fr) * f[b * nslice + sl] + fr * f[(b + 1) * nslice + sl];
          }
          acc *= dtheta;
          if (axis == RotationAxis::kZ)
            vol.values.at(static_cast<std::size_t>(iu), iv, sl) = acc;
          else
            vol.values.at(sl, iv, static_cast<std::size_t>(iu)) = acc;
        }
      }
    }
  });
  return vol;
}

}  // namespace ngi
