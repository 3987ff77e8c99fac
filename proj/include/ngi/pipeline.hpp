#pragma once

#include <array>

#include "ngi/correlator.hpp"
#include "ngi/reconstruct.hpp"
#include "ngi/scene.hpp"
#include "ngi/spinor.hpp"

namespace ngi {

/// Projected probed-sample images P S^p for the five measured channels,
/// in coefficient-matrix row order.
std::array<Array2<cd>, 5> truth_channel_images(const Scene& scene);

/// One correlation map for a channel via the requested path.
CorrelationMap compute_map(const Scene& scene, const ChannelId& ch, Provenance method);

/// Index reorder between centered map layout (q ascending, zero at n/2) and
/// DFT layout (zero frequency at index 0). Self-inverse for even dims.
template <typename T>
Array2<T> dft_shift(const Array2<T>& a) {
  Array2<T> out(a.n0, a.n1);
  for (std::size_t i = 0; i < a.n0; ++i)
    for (std::size_t j = 0; j < a.n1; ++j)
      out.at(i, j) = a.at((i + a.n0 / 2) % a.n0, (j + a.n1 / 2) % a.n1);
  return out;
}

/// Places a smaller image centered in an M0 x M1 frame (integer offsets).
Array2<cd> embed_block(const Array2<cd>& obj, std::size_t M0, std::size_t M1);

/// Validates that the magnitude sits on a full DFT-style q grid and returns
/// the DFT-ordered magnitude frame plus the implied object-frame pitch.
struct MagnitudeFrame {
  Array2<double> frame;  // DFT order
  double frame_pitch = 0.0;
};
MagnitudeFrame magnitude_to_frame(const MagnitudeImage& mag);

/// Recovers the object-plane image from a magnitude frame and the phase of
/// the forward transform of the given truth frame (both DFT-ordered spatial
/// layout for truth). Output is centered spatial layout, measure divided out.
Array2<cd> oracle_phase_object(const MagnitudeFrame& mf, const Array2<cd>& truth_centered);

/// Forward frame transform F[x](q_k) = pitch^D sum x_j exp(+iq.zeta), frame
/// pixel j at (j - M/2) * pitch. Returns DFT-ordered samples.
Array2<cd> frame_forward(const Array2<cd>& centered, double pitch);

nlohmann::json channel_nrmse_json(const std::array<Array2<cd>, 5>& got,
                                  const std::array<Array2<cd>, 5>& want);

}  // namespace ngi
