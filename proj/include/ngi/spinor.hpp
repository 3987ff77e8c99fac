#pragma once

#include <array>

#include "ngi/scene.hpp"
#include "ngi/types.hpp"

namespace ngi {

enum class Spin { kUp, kDown };

std::string to_string(Spin s);

/// Probed sample functions per voxel: up = S-up, down = S-down, built for one
/// scattering direction kappa_hat and detector position.
struct SpinorVolume {
  Array3<cd> up;
  Array3<cd> down;
  Vec3 kappa_hat;
  PositionLabel position_label = PositionLabel::kP1;
  double pitch = 1.0;

  const Array3<cd>& channel(Spin s) const { return s == Spin::kUp ? up : down; }
};

/// Beam-axis projection of a SpinorVolume: pixel(x,z) = pitch * sum_y voxel.
struct SpinorImage {
  Array2<cd> up;
  Array2<cd> down;
  double pitch = 1.0;
  PositionLabel position_label = PositionLabel::kP1;

  const Array2<cd>& channel(Spin s) const { return s == Spin::kUp ? up : down; }
};

/// The 5x4 system mapping (beta Mx, beta My, beta Mz, A) to the measured
/// S-channels (S1-up, S1-down, S2-down, S3-up, S3-down).
struct CoefficientMatrix {
  std::array<std::array<cd, 4>, 5> entries{};
  double theta = 0.0;
};

/// Unit scattering direction normalize(y_hat - k_f) with k_f the outgoing
/// unit vector at scattering angle theta toward the labeled position.
Vec3 kappa_hat(double theta, PositionLabel label);

/// Per-voxel spin structure: with M_perp = M - (M.khat) khat,
/// up = beta*M_perp_z + A and down = beta*(M_perp_x + i M_perp_y).
SpinorVolume sample_function(const SampleGrid& grid, Vec3 khat, double beta,
                             PositionLabel label = PositionLabel::kP1);

SpinorImage project_y(const SpinorVolume& vol);
Array2<cd> project_y(const Array3<cd>& vol, double pitch);
Array2<double> project_y(const Array3<double>& vol, double pitch);

CoefficientMatrix coefficient_matrix(double theta);

/// coefficient_matrix(theta) applied to (beta Mx, beta My, beta Mz, A).
std::array<cd, 5> forward_S_vector(double Mx, double My, double Mz, double A, double theta,
                                   double beta);

/// The five measured channels in matrix row order.
struct ChannelId {
  PositionLabel position;
  Spin spin;
};
inline constexpr std::array<ChannelId, 5> kChannels = {{
    {PositionLabel::kP1, Spin::kUp},
    {PositionLabel::kP1, Spin::kDown},
    {PositionLabel::kP2, Spin::kDown},
    {PositionLabel::kP3, Spin::kUp},
    {PositionLabel::kP3, Spin::kDown},
}};

std::string channel_name(const ChannelId& c);

}  // namespace ngi
