#pragma once

#include <cstdint>
#include <vector>

#include "ngi/correlator.hpp"
#include "ngi/scene.hpp"
#include "ngi/types.hpp"

namespace ngi {

/// |F[P S^p]| samples on the map's q grid.
struct MagnitudeImage {
  Array2<double> values;  // indexed like the source map
  DeltaGrid grid;         // delta-xi grid it came from
  double lambda_d2 = 0.0; // q = 2 pi dxi / lambda_d2
  Spin spin = Spin::kUp;
  PositionLabel position_label = PositionLabel::kP1;
  bool clamped_positive_excursion = false;

  double q(int axis, std::size_t i) const {
    return kTwoPi * grid.coord(axis, i) / lambda_d2;
  }
};

/// Inverts the map normalization: values = sqrt(max(0, -map)/total_factor).
/// Fermion-statistics maps only. Positive excursions beyond +3 stderr are
/// clamped to zero and flagged.
MagnitudeImage magnitude_from_correlation(const CorrelationMap& map, const Scene& scene);

struct SupportMask {
  Array2<std::uint8_t> inside;
  std::size_t count() const;
};

enum class RetrievalConstraint { kSupportOnly, kRealNonnegative };

struct PhaseRetrieveParams {
  int n_iter = 2000;          // total iterations, HIO 40 / ER 10 cycle
  double beta_feedback = 0.9;
  int restarts = 8;
  std::uint64_t seed = 0;
  RetrievalConstraint constraint = RetrievalConstraint::kSupportOnly;
  int trace_stride = 10;
};

struct RetrievalResult {
  Array2<cd> object;       // best restart, DFT-ordered frame
  double residual = 0.0;   // Fourier-domain || |F[x]| - mag || / ||mag||
  int best_restart = -1;
  std::vector<double> restart_residuals;
  std::vector<std::vector<std::pair<int, double>>> traces;  // per restart
  std::vector<Array2<cd>> restart_objects;
};

/// Hybrid input-output / error-reduction retrieval with support constraint.
/// mag is a DFT-ordered magnitude frame (same dims as the object frame).
RetrievalResult phase_retrieve(const Array2<double>& mag, const SupportMask& support,
                               const PhaseRetrieveParams& params);

struct RegisterScore {
  double nrmse = 0.0;
  long shift0 = 0, shift1 = 0;
  bool flipped = false;
  cd phase{1.0, 0.0};
};

/// Minimal NRMSE over the trivial-ambiguity group: integer (circular)
/// translations, global phase, and conjugate spatial flip.
RegisterScore register_and_score(const Array2<cd>& recon, const Array2<cd>& truth);
Array2<cd> apply_registration(const Array2<cd>& recon, const RegisterScore& reg);

struct ComponentMaps {
  Array2<double> Mx, My, Mz, A;
  Array2<double> residual;
  double condition_number = 0.0;
};

/// Per-pixel overdetermined Eq.-16-style solve. The five complex equations
/// are stacked into 10 real equations in the 4 real unknowns and solved by
/// Householder QR; outputs carry M (beta divided out) and A.
ComponentMaps solve_components(const Array2<cd>& s1_up, const Array2<cd>& s1_down,
                               const Array2<cd>& s2_down, const Array2<cd>& s3_up,
                               const Array2<cd>& s3_down, double theta, double beta);

enum class RotationAxis { kX, kZ };

/// Trilinear resampling of the sample onto a lattice rotated by angle about
/// the axis; M is resampled and rotated as a vector field.
SampleGrid rotate_sample(const SampleGrid& grid, double angle, RotationAxis axis);

enum class TomoFilter { kRamLak, kSheppLogan };

struct Volume {
  Array3<double> values;  // (x, y, slice) with slice along the rotation axis
  double pitch = 1.0;
  RotationAxis axis = RotationAxis::kZ;
};

/// Parallel-beam filtered back-projection. projections[i] is a scalar image
/// (s, slice) at angles[i]; angles must span at least 180 degrees. Output
/// pitch equals the projection pixel pitch.
Volume tomo_fbp(const std::vector<Array2<double>>& projections,
                const std::vector<double>& angles, TomoFilter filter, double pitch,
                RotationAxis axis = RotationAxis::kZ);

}  // namespace ngi
