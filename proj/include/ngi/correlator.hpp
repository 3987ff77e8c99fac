#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ngi/scene.hpp"
#include "ngi/spinor.hpp"
#include "ngi/types.hpp"

#include "json.hpp"

namespace ngi {

enum class Statistics { kFermion, kBoson };
enum class Provenance { kQuadrature, kClosedForm, kMonteCarlo };

std::string to_string(Statistics s);
std::string to_string(Provenance p);

/// Scan grid in delta-xi = xi_r - xi_t, per transverse axis.
struct DeltaGrid {
  int dim = 1;
  std::size_t n[2] = {1, 1};
  double pitch[2] = {0.0, 0.0};
  double start[2] = {0.0, 0.0};

  static DeltaGrid from_detector(const DetectorSpec& det, int dim);
  double coord(int axis, std::size_t i) const {
    return start[axis] + static_cast<double>(i) * pitch[axis];
  }
  std::size_t count() const { return n[0] * (dim == 2 ? n[1] : 1); }
};

/// Intensity-fluctuation correlation over the delta-xi grid, together with
/// every normalization factor applied, so downstream inversion is exact.
struct CorrelationMap {
  DeltaGrid grid;
  Array2<double> values;  // n[0] x n[1] (n[1] = 1 in 1D mode)
  std::optional<Array2<double>> stderr_map;
  // Reference-arm Siegert contrast diagnostics, Monte Carlo only.
  std::optional<Array2<double>> siegert;
  std::optional<Array2<double>> siegert_stderr;

  Spin spin = Spin::kUp;
  PositionLabel position_label = PositionLabel::kP1;
  Statistics statistics = Statistics::kFermion;
  Provenance provenance = Provenance::kClosedForm;

  /// Factor chi' such that (ideally) values = -sign * chi' |F[P S^p](q)|^2.
  double total_factor = 0.0;
  nlohmann::json normalization;  // component factors, for the sidecar
  std::uint64_t seed = 0;
  std::uint64_t n_realizations = 0;

  nlohmann::json sidecar() const;
  void write(const std::string& path_base) const;
};

CorrelationMap read_correlation_map(const std::string& path_base);

/// Closed-form total factor for the transverse dimensionality of the scene;
/// equals chi(scene) when dim == 2.
double chi_effective(const Scene& scene);

/// Exact-distance quadrature of the intensity-fluctuation correlation:
/// value(dxi) = -v^2 I0^2 |sum_eta h_r*(xi_r,eta) h_t(xi_t,eta) deta^D|^2,
/// with h_t the exact first-Born voxel sum. Never uses the paraxial
/// expansion in the target arm.
CorrelationMap correlation_quadrature(const Scene& scene, const SpinorVolume& vol, Spin p,
                                      const DeltaGrid& grid);

/// Closed-form map: value(dxi) = -chi_eff |F[P S^p](q)|^2 with
/// q = 2 pi dxi / (lambda d2), evaluated by zero-padded FFT plus exact
/// band-limited (Dirichlet) interpolation onto the requested q points.
CorrelationMap correlation_closed_form(const Scene& scene, const SpinorImage& img, Spin p,
                                       const DeltaGrid& grid);

/// Speckle ensemble over i.i.d. circular complex Gaussian source fields.
/// Classical fields realize the bosonic (+) exchange branch; the fermionic
/// map is its analytic negation (fermionic antibunching is not realizable by
/// classical field draws). Realization r draws from counter stream r, so
/// results are independent of worker count.
CorrelationMap speckle_mc(const Scene& scene, const SpinorVolume& vol, Spin p,
                          const DeltaGrid& grid, std::uint64_t n_realizations,
                          Statistics statistics, std::uint64_t seed);

/// Direct DTFT oracle used by tests against the FFT+interpolation path:
/// F(q) = a^D sum_zeta f(zeta) exp(+i q . zeta).
cd dtft_oracle(const Array2<cd>& img, double pitch, double qx, double qz);

}  // namespace ngi
