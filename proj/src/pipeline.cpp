#include "ngi/pipeline.hpp"

#include <cmath>

#include "ngi/errors.hpp"
#include "ngi/fft.hpp"

namespace ngi {

std::array<Array2<cd>, 5> truth_channel_images(const Scene& scene) {
  std::array<Array2<cd>, 5> out;
  for (std::size_t c = 0; c < kChannels.size(); ++c) {
    const ChannelId& ch = kChannels[c];
    Vec3 khat = kappa_hat(scene.geom.theta, ch.position);
    SpinorVolume vol = sample_function(*scene.sample, khat, scene.beta(), ch.position);
    SpinorImage img = project_y(vol);
    out[c] = img.channel(ch.spin);
  }
  return out;
}

CorrelationMap compute_map(const Scene& scene, const ChannelId& ch, Provenance method) {
  Vec3 khat = kappa_hat(scene.geom.theta, ch.position);
  SpinorVolume vol = sample_function(*scene.sample, khat, scene.beta(), ch.position);
  DeltaGrid grid = DeltaGrid::from_detector(scene.detector, scene.geom.dim);
  switch (method) {
    case Provenance::kQuadrature:
      return correlation_quadrature(scene, vol, ch.spin, grid);
    case Provenance::kClosedForm: {
      SpinorImage img = project_y(vol);
      return correlation_closed_form(scene, img, ch.spin, grid);
    }
    case Provenance::kMonteCarlo:
      throw ConfigError("compute_map: Monte Carlo maps go through speckle_mc");
  }
  throw ConfigError("compute_map: unknown method");
}

Array2<cd> embed_block(const Array2<cd>& obj, std::size_t M0, std::size_t M1) {
  if (obj.n0 > M0 || obj.n1 > M1) throw ConfigError("embed_block: object larger than frame");
  Array2<cd> out(M0, M1, cd(0.0));
  std::size_t o0 = (M0 - obj.n0) / 2;
  std::size_t o1 = (M1 - obj.n1) / 2;
  for (std::size_t i = 0; i < obj.n0; ++i)
    for (std::size_t j = 0; j < obj.n1; ++j) out.at(i + o0, j + o1) = obj.at(i, j);
  return out;
}

MagnitudeFrame magnitude_to_frame(const MagnitudeImage& mag) {
  const DeltaGrid& g = mag.grid;
  for (int ax = 0; ax < g.dim; ++ax) {
    double want = -static_cast<double>(g.n[ax] / 2) * g.pitch[ax];
    if (std::abs(g.start[ax] - want) > 1e-9 * std::abs(g.pitch[ax]))
      throw ConfigError("magnitude grid is not a full DFT-style q grid");
  }
  if (g.dim == 2 && (g.n[0] != g.n[1] || g.pitch[0] != g.pitch[1]))
    throw ConfigError("magnitude frame must be square with a uniform grid");
  MagnitudeFrame mf;
  mf.frame = dft_shift(mag.values);
  // q step = 2 pi pitch / (lambda d2) = 2 pi / (n * frame_pitch)
  mf.frame_pitch = mag.lambda_d2 / (static_cast<double>(g.n[0]) * g.pitch[0]);
  return mf;
}

Array2<cd> frame_forward(const Array2<cd>& centered, double pitch) {
  Array2<cd> shifted = dft_shift(centered);
  fft::transform2d(shifted.data.data(), shifted.n0, shifted.n1, kFourierSign);
  double measure = shifted.n1 == 1 ? pitch : pitch * pitch;
  for (auto& v : shifted.data) v *= measure;
  return shifted;
}

Array2<cd> oracle_phase_object(const MagnitudeFrame& mf, const Array2<cd>& truth_centered) {
  const std::size_t n0 = mf.frame.n0, n1 = mf.frame.n1;
  if (truth_centered.n0 != n0 || truth_centered.n1 != n1)
    throw ConfigError("oracle_phase_object: truth frame dims mismatch");
  Array2<cd> F = frame_forward(truth_centered, mf.frame_pitch);
  Array2<cd> G(n0, n1);
  for (std::size_t i = 0; i < G.size(); ++i) {
    double m = std::abs(F.data[i]);
    cd ph = m > 0.0 ? F.data[i] / m : cd(1.0, 0.0);
    G.data[i] = mf.frame.data[i] * ph;
  }
  fft::transform2d(G.data.data(), n0, n1, -kFourierSign);
  double measure = n1 == 1 ? mf.frame_pitch : mf.frame_pitch * mf.frame_pitch;
  double inv = 1.0 / (static_cast<double>(n0 * n1) * measure);
  for (auto& v : G.data) v *= inv;
  return dft_shift(G);
}

nlohmann::json channel_nrmse_json(const std::array<Array2<cd>, 5>& got,
                                  const std::array<Array2<cd>, 5>& want) {
  nlohmann::json out;
  for (std::size_t c = 0; c < kChannels.size(); ++c) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got[c].size(); ++i) {
      num += std::norm(got[c].data[i] - want[c].data[i]);
      den += std::norm(want[c].data[i]);
    }
    out[channel_name(kChannels[c])] = den > 0.0 ? std::sqrt(num / den) : 0.0;
  }
  return out;
}

}  // namespace ngi
