#include "ngi/propagation.hpp"

#include <cmath>

#include "ngi/errors.hpp"
#include "ngi/fft.hpp"
#include "ngi/threads.hpp"

namespace ngi {

cd spherical_kernel(Vec3 r, Vec3 r0, double k, double lambda) {
  Vec3 d = r - r0;
  double dist = norm(d);
  if (dist == 0.0) throw GeometryError("spherical_kernel: coincident points");
  cd phase = std::exp(cd(0.0, k * dist));
  return phase / (cd(0.0, lambda) * dist);
}

cd fresnel_kernel(Vec2 xi, Vec2 eta, double d, double lambda, double k) {
  double dx = xi.x - eta.x;
  double dz = xi.z - eta.z;
  double chirp = kPi * (dx * dx + dz * dz) / (lambda * d);
  cd val = std::exp(cd(0.0, k * d + chirp));
  return val / cd(0.0, lambda * d);
}

namespace {

// r - d for r = sqrt((d + axial)^2 + trans2), computed without cancellation.
inline double dist_minus(double d, double axial, double trans2) {
  double r = std::sqrt((d + axial) * (d + axial) + trans2);
  return (2.0 * d * axial + axial * axial + trans2) / (r + d);
}

}  // namespace

std::vector<cd> h_target_row(const Scene& scene, const SpinorVolume& vol, Spin p, Vec2 xi_t,
                             std::span<const Vec2> etas) {
  const SampleGrid& grid = *scene.sample;
  const Array3<cd>& S = vol.channel(p);
  const double lambda = scene.geom.lambda;
  const double k = scene.geom.k();
  const double d1 = scene.geom.d1;
  const double d2 = scene.geom.d2;
  const double a = grid.pitch;
  const double measure = scene.geom.dim == 1 ? a * a : a * a * a;

  // Voxel coordinates relative to the sample center, fixed order.
  const std::size_t nvox = S.size();
  std::vector<double> vx(nvox), vy(nvox), vz(nvox);
  {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < grid.nx; ++i)
      for (std::size_t j = 0; j < grid.ny; ++j)
        for (std::size_t kk = 0; kk < grid.nz; ++kk, ++idx) {
          Vec3 pos = grid.voxel_pos(i, j, kk);
          vx[idx] = pos.x;
          vy[idx] = pos.y;
          vz[idx] = pos.z;
        }
  }

  const cd front = cd(0.0, 1.0) / lambda * std::exp(cd(0.0, k * (d1 + d2))) * measure;
  std::vector<cd> out(etas.size());
  parallel_for(static_cast<std::int64_t>(etas.size()), [&](std::int64_t e0, std::int64_t e1) {
    for (std::int64_t e = e0; e < e1; ++e) {
      const Vec2 eta = etas[e];
      cd acc(0.0);
      for (std::size_t v = 0; v < nvox; ++v) {
        cd s = S.data[v];
        if (s == cd(0.0)) continue;
        double tx1 = vx[v] - eta.x;
        double tz1 = vz[v] - eta.z;
        double rel1 = dist_minus(d1, vy[v], tx1 * tx1 + tz1 * tz1);
        double tx2 = xi_t.x - vx[v];
        double tz2 = xi_t.z - vz[v];
        double rel2 = dist_minus(d2, -vy[v], tx2 * tx2 + tz2 * tz2);
        double r1 = d1 + rel1;
        double r2 = d2 + rel2;
        if (r1 <= 0.0 || r2 <= 0.0)
          throw GeometryError("h_target_exact: voxel coincident with source or detector");
        acc += s * std::exp(cd(0.0, k * (rel1 + rel2))) / (r1 * r2);
      }
      out[e] = front * acc;
    }
  });
  return out;
}

cd h_target_exact(Vec2 xi_t, Vec2 eta, const Scene& scene, const SpinorVolume& vol, Spin p) {
  const Vec2 one[1] = {eta};
  return h_target_row(scene, vol, p, xi_t, std::span<const Vec2>(one, 1))[0];
}

namespace {

void check_chirp_sampling(const FieldGrid& in, double d, double lambda, double max_sep,
                          double out_pitch) {
  double bound = std::abs(lambda * d) / (2.0 * max_sep);
  if (in.pitch > bound || out_pitch > bound) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "fresnel_propagate: pitch %.6g exceeds chirp Nyquist bound %.6g",
                  std::max(in.pitch, out_pitch), bound);
    throw GeometryError(msg);
  }
}

}  // namespace

FieldGrid fresnel_propagate_direct(const FieldGrid& in, double d, double lambda, double k,
                                   std::size_t out_nx, std::size_t out_nz, Vec2 out_center,
                                   double out_pitch) {
  FieldGrid out;
  out.dim = in.dim;
  out.nx = out_nx;
  out.nz = in.dim == 2 ? out_nz : 1;
  out.pitch = out_pitch;
  out.center = out_center;
  out.y_plane = in.y_plane + d;
  out.values.assign(out.nx * out.nz, cd(0.0));
  double measure = in.dim == 1 ? in.pitch : in.pitch * in.pitch;
  parallel_for(static_cast<std::int64_t>(out.nx * out.nz),
               [&](std::int64_t p0, std::int64_t p1) {
                 for (std::int64_t p = p0; p < p1; ++p) {
                   std::size_t i = static_cast<std::size_t>(p) / out.nz;
                   std::size_t kk = static_cast<std::size_t>(p) % out.nz;
                   Vec2 xi{out.coord_x(i), out.coord_z(kk)};
                   cd acc(0.0);
                   for (std::size_t a = 0; a < in.nx; ++a)
                     for (std::size_t b = 0; b < in.nz; ++b) {
                       Vec2 eta{in.coord_x(a), in.coord_z(b)};
                       acc += fresnel_kernel(xi, eta, d, lambda, k) * in.at(a, b);
                     }
                   out.values[p] = acc * measure;
                 }
               });
  return out;
}

FieldGrid fresnel_propagate(const FieldGrid& in, double d, double lambda, double k,
                            std::size_t out_nx, std::size_t out_nz, Vec2 out_center,
                            double out_pitch) {
  if (d == 0.0) throw GeometryError("fresnel_propagate: d must be nonzero");
  if (in.dim == 1) out_nz = 1;

  // Maximum transverse separation between any output and input node.
  double in_half_x = (static_cast<double>(in.nx) - 1.0) / 2.0 * in.pitch;
  double in_half_z = (static_cast<double>(in.nz) - 1.0) / 2.0 * in.pitch;
  double out_half_x = (static_cast<double>(out_nx) - 1.0) / 2.0 * out_pitch;
  double out_half_z = (static_cast<double>(out_nz) - 1.0) / 2.0 * out_pitch;
  double sep_x = std::abs(out_center.x - in.center.x) + in_half_x + out_half_x;
  double sep_z = std::abs(out_center.z - in.center.z) + in_half_z + out_half_z;
  double max_sep = in.dim == 1 ? sep_x : std::hypot(sep_x, sep_z);
  check_chirp_sampling(in, d, lambda, max_sep, out_pitch);

  bool commensurate = std::abs(out_pitch - in.pitch) <= 1e-12 * in.pitch;
  if (!commensurate)
    return fresnel_propagate_direct(in, d, lambda, k, out_nx, out_nz, out_center, out_pitch);

  // Equal pitches: K(xi - eta) depends only on index differences, so the sum
  // is a discrete convolution; evaluate it as a zero-padded FFT product of
  // the chirp kernel with the input.
  FieldGrid out;
  out.dim = in.dim;
  out.nx = out_nx;
  out.nz = in.dim == 2 ? out_nz : 1;
  out.pitch = out_pitch;
  out.center = out_center;
  out.y_plane = in.y_plane + d;
  double measure = in.dim == 1 ? in.pitch : in.pitch * in.pitch;

  // Offset of output node 0 from input node 0 along each axis.
  double off_x = out.coord_x(0) - in.coord_x(0);
  double off_z = out.coord_z(0) - in.coord_z(0);

  if (in.dim == 1) {
    std::size_t m = fft::next_pow2(in.nx + out.nx - 1);
    std::vector<cd> f(m, cd(0.0)), g(m, cd(0.0));
    for (std::size_t i = 0; i < in.nx; ++i) f[i] = in.values[i];
    // kernel index j maps to displacement off_x + (j - (in.nx - 1)) * pitch
    for (std::size_t j = 0; j < in.nx + out.nx - 1; ++j) {
      double dx = off_x + (static_cast<double>(j) - static_cast<double>(in.nx - 1)) * in.pitch;
      g[j] = fresnel_kernel({dx, 0.0}, {0.0, 0.0}, d, lambda, k);
    }
    fft::transform(f.data(), m, -1);
    fft::transform(g.data(), m, -1);
    for (std::size_t i = 0; i < m; ++i) f[i] *= g[i];
    fft::transform(f.data(), m, +1);
    double inv = 1.0 / static_cast<double>(m);
    out.values.resize(out.nx);
    for (std::size_t i = 0; i < out.nx; ++i)
      out.values[i] = f[i + in.nx - 1] * inv * measure;
    return out;
  }

  std::size_t mx = fft::next_pow2(in.nx + out.nx - 1);
  std::size_t mz = fft::next_pow2(in.nz + out.nz - 1);
  std::vector<cd> f(mx * mz, cd(0.0)), g(mx * mz, cd(0.0));
  for (std::size_t i = 0; i < in.nx; ++i)
    for (std::size_t kk = 0; kk < in.nz; ++kk) f[i * mz + kk] = in.at(i, kk);
  for (std::size_t j = 0; j < in.nx + out.nx - 1; ++j)
    for (std::size_t l = 0; l < in.nz + out.nz - 1; ++l) {
      double dx = off_x + (static_cast<double>(j) - static_cast<double>(in.nx - 1)) * in.pitch;
      double dz = off_z + (static_cast<double>(l) - static_cast<double>(in.nz - 1)) * in.pitch;
      g[j * mz + l] = fresnel_kernel({dx, dz}, {0.0, 0.0}, d, lambda, k);
    }
  fft::transform2d(f.data(), mx, mz, -1);
  fft::transform2d(g.data(), mx, mz, -1);
  for (std::size_t i = 0; i < mx * mz; ++i) f[i] *= g[i];
  fft::transform2d(f.data(), mx, mz, +1);
  double inv = 1.0 / static_cast<double>(mx * mz);
  out.values.assign(out.nx * out.nz, cd(0.0));
  for (std::size_t i = 0; i < out.nx; ++i)
    for (std::size_t kk = 0; kk < out.nz; ++kk)
      out.at(i, kk) = f[(i + in.nx - 1) * mz + (kk + in.nz - 1)] * inv * measure;
  return out;
}

}  // namespace ngi
