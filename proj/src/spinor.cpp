#include "ngi/spinor.hpp"

#include <cmath>

#include "ngi/errors.hpp"
#include "ngi/threads.hpp"

namespace ngi {

std::string to_string(Spin s) { return s == Spin::kUp ? "up" : "down"; }

std::string channel_name(const ChannelId& c) {
  return to_string(c.position) + "_" + to_string(c.spin);
}

Vec3 kappa_hat(double theta, PositionLabel label) {
  if (!(theta > 0.0)) throw GeometryError("kappa_hat: theta must be > 0");
  if (theta > kPi / 2) throw GeometryError("kappa_hat: theta must be <= π/2");
  double s = std::sin(theta), c = std::cos(theta);
  Vec3 kf;
  switch (label) {
    case PositionLabel::kP1: kf = {s, c, 0.0}; break;
    case PositionLabel::kP2: kf = {-s, c, 0.0}; break;
    case PositionLabel::kP3: kf = {0.0, c, s}; break;
    default: throw GeometryError("unknown position label");
  }
  Vec3 ki{0.0, 1.0, 0.0};
  return normalized(ki - kf);
}

SpinorVolume sample_function(const SampleGrid& grid, Vec3 khat, double beta,
                             PositionLabel label) {
  double n = norm(khat);
  if (std::abs(n - 1.0) > 1e-9)
    throw GeometryError("sample_function: khat must be a unit vector");

  SpinorVolume vol;
  vol.kappa_hat = khat;
  vol.position_label = label;
  vol.pitch = grid.pitch;
  vol.up = Array3<cd>(grid.nx, grid.ny, grid.nz);
  vol.down = Array3<cd>(grid.nx, grid.ny, grid.nz);

  const std::size_t total = grid.A.size();
  const double kx = khat.x, ky = khat.y, kz = khat.z;
  parallel_for(static_cast<std::int64_t>(total), [&](std::int64_t i0, std::int64_t i1) {
    for (std::int64_t i = i0; i < i1; ++i) {
      double mx = grid.Mx.data[i], my = grid.My.data[i], mz = grid.Mz.data[i];
      double mdk = mx * kx + my * ky + mz * kz;
      double px = mx - mdk * kx;
      double py = my - mdk * ky;
      double pz = mz - mdk * kz;
      vol.up.data[i] = cd(beta * pz + grid.A.data[i], 0.0);
      vol.down.data[i] = cd(beta * px, beta * py);
    }
  });
  return vol;
}

template <typename T>
static Array2<T> project_y_impl(const Array3<T>& vol, double pitch) {
  Array2<T> img(vol.n0, vol.n2);
  for (std::size_t i = 0; i < vol.n0; ++i)
    for (std::size_t k = 0; k < vol.n2; ++k) {
      T acc{};
      for (std::size_t j = 0; j < vol.n1; ++j) acc += vol.at(i, j, k);
      img.at(i, k) = acc * pitch;
    }
  return img;
}

Array2<cd> project_y(const Array3<cd>& vol, double pitch) {
  return project_y_impl(vol, pitch);
}

Array2<double> project_y(const Array3<double>& vol, double pitch) {
  return project_y_impl(vol, pitch);
}

SpinorImage project_y(const SpinorVolume& vol) {
  SpinorImage img;
  img.pitch = vol.pitch;
  img.position_label = vol.position_label;
  img.up = project_y(vol.up, vol.pitch);
  img.down = project_y(vol.down, vol.pitch);
  return img;
}

CoefficientMatrix coefficient_matrix(double theta) {
  if (!(theta > 0.0 && theta <= kPi / 2))
    throw GeometryError("coefficient_matrix: theta out of range (0, π/2]");
  double s = std::sin(theta / 2), c = std::cos(theta / 2);
  cd i(0.0, 1.0);
  cd em = std::exp(cd(0.0, -theta / 2));  // e^{-i theta/2}
  cd ep = std::exp(cd(0.0, +theta / 2));
  CoefficientMatrix m;
  m.theta = theta;
  m.entries[0] = {cd(0), cd(0), cd(1), cd(1)};
  m.entries[1] = {i * em * s, i * em * c, cd(0), cd(0)};
  m.entries[2] = {-i * ep * s, i * ep * c, cd(0), cd(0)};
  m.entries[3] = {cd(0), cd(0.5 * std::sin(theta)), cd(s * s), cd(1)};
  m.entries[4] = {cd(1), i * c * c, i * 0.5 * std::sin(theta), cd(0)};
  return m;
}

std::array<cd, 5> forward_S_vector(double Mx, double My, double Mz, double A, double theta,
                                   double beta) {
  CoefficientMatrix m = coefficient_matrix(theta);
  std::array<cd, 4> v = {cd(beta * Mx), cd(beta * My), cd(beta * Mz), cd(A)};
  std::array<cd, 5> out{};
  for (int r = 0; r < 5; ++r) {
    cd acc(0.0);
    for (int col = 0; col < 4; ++col) acc += m.entries[r][col] * v[col];
    out[r] = acc;
  }
  return out;
}

}  // namespace ngi
