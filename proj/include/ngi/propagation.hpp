#pragma once

#include <span>
#include <vector>

#include "ngi/scene.hpp"
#include "ngi/spinor.hpp"
#include "ngi/types.hpp"

namespace ngi {

/// Complex field sampled on a transverse grid at one plane.
struct FieldGrid {
  int dim = 1;          // 1: values over x only, 2: row-major (x, z)
  std::size_t nx = 0;
  std::size_t nz = 1;   // 1 in 1D mode
  double pitch = 0.0;
  Vec2 center{0.0, 0.0};
  double y_plane = 0.0;
  std::vector<cd> values;

  double coord_x(std::size_t i) const { return centered_coord(i, nx, pitch, center.x); }
  double coord_z(std::size_t k) const { return centered_coord(k, nz, pitch, center.z); }
  cd& at(std::size_t i, std::size_t k) { return values[i * nz + k]; }
  const cd& at(std::size_t i, std::size_t k) const { return values[i * nz + k]; }
};

/// Incident spherical wave kernel (1/(i lambda)) exp(ik|r-r0|)/|r-r0|; this is
/// the spin-up spinor component, the spin-down one is identically zero.
cd spherical_kernel(Vec3 r, Vec3 r0, double k, double lambda);

/// Paraxial kernel e^{ikd}/(i lambda d) exp[i pi (xi-eta)^2 / (lambda d)].
cd fresnel_kernel(Vec2 xi, Vec2 eta, double d, double lambda, double k);

/// First-Born impulse response of the sample arm as an exact voxel sum:
/// (i/lambda) sum exp[ik(r1+r2)]/(r1 r2) S^p(r') a^(dim+1), with full
/// Euclidean r1 (source point to voxel) and r2 (voxel to detector point).
/// Phases are accumulated as k(r1+r2-d1-d2) in a frame centered on the
/// sample, times the constant e^{ik(d1+d2)}.
cd h_target_exact(Vec2 xi_t, Vec2 eta, const Scene& scene, const SpinorVolume& vol, Spin p);

/// h_target_exact for one detector point over many source points; the hot
/// path of the correlator. Fixed voxel order, parallel over eta.
std::vector<cd> h_target_row(const Scene& scene, const SpinorVolume& vol, Spin p, Vec2 xi_t,
                             std::span<const Vec2> etas);

/// Discrete Fresnel propagation out(xi) = sum_eta K(xi,eta) in(eta) deta^dim.
/// Uses FFT convolution of the chirp kernel when the output grid shares the
/// input pitch, direct summation otherwise. Violating the chirp Nyquist
/// bound is an error here, not a warning.
FieldGrid fresnel_propagate(const FieldGrid& in, double d, double lambda, double k,
                            std::size_t out_nx, std::size_t out_nz, Vec2 out_center,
                            double out_pitch);

/// Direct double-sum reference used by tests against the fast path.
FieldGrid fresnel_propagate_direct(const FieldGrid& in, double d, double lambda, double k,
                                   std::size_t out_nx, std::size_t out_nz, Vec2 out_center,
                                   double out_pitch);

}  // namespace ngi
