#include <cstring>

#include "ngi/fft.hpp"
#include "doctest.h"
#include "ngi/errors.hpp"
#include "ngi/pipeline.hpp"
#include "ngi/reconstruct.hpp"
#include "ngi/rng.hpp"

using namespace ngi;
using nlohmann::json;

namespace {

Scene tiny_scene() {
  json cfg = {{"mode", "normalized"},
              {"geometry",
               {{"lambda", 1.0}, {"d1", 4000.0}, {"d2", 4000.0}, {"theta", 0.4},
                {"transverse_dim", 1}}},
              {"source", {{"extent", 64.0}, {"n_points", 16}}},
              {"detector", {{"extent", 16.0}, {"n_pixels", 8}, {"grid", "dft"},
                            {"positions", {"P1"}}}},
              {"sample",
               {{"pitch", 1.0},
                {"dims", {8, 2, 1}},
                {"phantom",
                 {{"kind", "gauss_bumps_1d"},
                  {"bumps", {{{"center", 0.0}, {"sigma", 2.0}, {"amp", 1.0}}}}}}}}};
  return build_scene(cfg);
}

double nrmse_real(const Array2<double>& a, const Array2<double>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
    den += b.data[i] * b.data[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("magnitude_from_correlation inverts the normalization") {
  Scene sc = tiny_scene();
  CorrelationMap map;
  map.grid.dim = 1;
  map.grid.n[0] = 3;
  map.grid.pitch[0] = 1.0;
  map.grid.start[0] = -1.0;
  map.values = Array2<double>(3, 1);
  map.statistics = Statistics::kFermion;
  map.total_factor = 2.5;
  map.normalization = {{"total_factor", 2.5}};
  map.values.data = {-2.5 * 4.0, 0.0, -2.5 * 0.25};
  auto mag = magnitude_from_correlation(map, sc);
  CHECK(mag.values.data[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mag.values.data[1] == 0.0);
  CHECK(mag.values.data[2] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_FALSE(mag.clamped_positive_excursion);

  SUBCASE("boson map rejected") {
    map.statistics = Statistics::kBoson;
    CHECK_THROWS_AS(magnitude_from_correlation(map, sc), StatsError);
  }
  SUBCASE("missing metadata rejected") {
    map.normalization = json::object();
    CHECK_THROWS_AS(magnitude_from_correlation(map, sc), MissingInputError);
  }
  SUBCASE("positive excursions clamp and warn beyond 3 stderr") {
    map.values.data = {0.5, -2.5, 0.0};
    map.stderr_map = Array2<double>(3, 1, 1.0);
    auto m2 = magnitude_from_correlation(map, sc);
    CHECK(m2.values.data[0] == 0.0);
    CHECK_FALSE(m2.clamped_positive_excursion);  // 0.5 < 3*1.0
    map.stderr_map->data[0] = 0.1;
    auto m3 = magnitude_from_correlation(map, sc);
    CHECK(m3.values.data[0] == 0.0);
    CHECK(m3.clamped_positive_excursion);
  }
}

TEST_CASE("closed form then magnitude recovers |F[PS]| to 1e-12") {
  Scene sc = tiny_scene();
  auto vol = sample_function(*sc.sample, kappa_hat(sc.geom.theta, PositionLabel::kP1),
                             sc.beta(), PositionLabel::kP1);
  SpinorImage img = project_y(vol);
  DeltaGrid grid;
  grid.dim = 1;
  grid.n[0] = 11;
  grid.pitch[0] = 40.0;
  grid.start[0] = -200.0;
  auto map = correlation_closed_form(sc, img, Spin::kUp, grid);
  auto mag = magnitude_from_correlation(map, sc);
  for (std::size_t i = 0; i < grid.n[0]; ++i) {
    double q = kTwoPi * grid.coord(0, i) / (sc.geom.lambda * sc.geom.d2);
    double expect = std::abs(dtft_oracle(img.up, img.pitch, q, 0.0));
    CHECK(mag.values.data[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("register_and_score absorbs the trivial ambiguities") {
  RngStream rng(55, 0);
  Array2<cd> truth(12, 10);
  for (auto& v : truth.data) v = cd(rng.uniform() - 0.5, rng.uniform() - 0.5);

  SUBCASE("identity") {
    auto r = register_and_score(truth, truth);
    CHECK(r.nrmse < 1e-12);
  }
  SUBCASE("global phase and circular shift") {
    Array2<cd> moved(12, 10);
    cd ph = std::exp(cd(0.0, 1.234));
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 10; ++j)
        moved.at((i + 3) % 12, (j + 8) % 10) = ph * truth.at(i, j);
    auto r = register_and_score(moved, truth);
    CHECK(r.nrmse < 1e-12);
    auto aligned = apply_registration(moved, r);
    double err = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
      err = std::max(err, std::abs(aligned.data[i] - truth.data[i]));
    CHECK(err < 1e-12);
  }
  SUBCASE("conjugate spatial flip") {
    Array2<cd> flipped(12, 10);
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 10; ++j)
        flipped.at((12 - i) % 12, (10 - j) % 10) = std::conj(truth.at(i, j));
    auto r = register_and_score(flipped, truth);
    CHECK(r.nrmse < 1e-12);
    CHECK(r.flipped);
  }
  SUBCASE("zero truth rejected") {
    Array2<cd> zero(12, 10, cd(0.0));
    CHECK_THROWS_AS(register_and_score(truth, zero), ConfigError);
  }
  SUBCASE("genuinely different images score badly") {
    Array2<cd> other(12, 10);
    for (auto& v : other.data) v = cd(rng.uniform() - 0.5, rng.uniform() - 0.5);
    auto r = register_and_score(other, truth);
    CHECK(r.nrmse > 0.1);
  }
}

TEST_CASE("phase retrieval: flat modulus gives a point object") {
  const std::size_t N = 32;
  Array2<double> mag(N, N, 1.0);  // |F[delta]| = 1 everywhere
  SupportMask support;
  support.inside = Array2<std::uint8_t>(N, N, 0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) support.inside.at(i, j) = 1;
  PhaseRetrieveParams params;
  params.n_iter = 300;
  params.restarts = 2;
  params.seed = 3;
  params.constraint = RetrievalConstraint::kRealNonnegative;
  auto res = phase_retrieve(mag, support, params);
  CHECK(res.residual < 1e-8);
  // recovered object: one dominant pixel
  double maxv = 0, total = 0;
  for (auto& v : res.object.data) {
    maxv = std::max(maxv, std::abs(v));
    total += std::abs(v);
  }
  CHECK(maxv / total > 0.99);
}

TEST_CASE("phase retrieval preconditions") {
  Array2<double> mag(16, 16, 1.0);
  SupportMask big;
  big.inside = Array2<std::uint8_t>(16, 16, 1);
  PhaseRetrieveParams params;
  CHECK_THROWS_AS(phase_retrieve(mag, big, params), ConfigError);
  SupportMask empty;
  empty.inside = Array2<std::uint8_t>(16, 16, 0);
  CHECK_THROWS_AS(phase_retrieve(mag, empty, params), ConfigError);
  SupportMask wrong;
  wrong.inside = Array2<std::uint8_t>(8, 8, 1);
  CHECK_THROWS_AS(phase_retrieve(mag, wrong, params), ConfigError);
}

TEST_CASE("phase retrieval recovers a small binary phantom") {
  // smoke-scale version of the acceptance criterion
  const std::size_t N = 32, S = 16;
  RngStream rng(77, 0);
  Array2<cd> truth(N, N, cd(0.0));
  for (std::size_t i = 0; i < S; ++i)
    for (std::size_t j = 0; j < S; ++j)
      truth.at(i + 8, j + 8) = rng.uniform() < 0.4 ? cd(1.0) : cd(0.0);
  Array2<cd> shifted = dft_shift(truth);
  Array2<cd> F = shifted;
  fft::transform2d(F.data.data(), N, N, kFourierSign);
  Array2<double> mag(N, N);
  for (std::size_t i = 0; i < F.size(); ++i) mag.data[i] = std::abs(F.data[i]);

  SupportMask support;
  support.inside = Array2<std::uint8_t>(N, N, 0);
  for (std::size_t i = 0; i < S; ++i)
    for (std::size_t j = 0; j < S; ++j) support.inside.at(i + 8, j + 8) = 1;
  SupportMask shifted_support;
  shifted_support.inside = dft_shift(support.inside);

  PhaseRetrieveParams params;
  params.n_iter = 600;
  params.restarts = 4;
  params.seed = 11;
  params.constraint = RetrievalConstraint::kRealNonnegative;
  auto res = phase_retrieve(mag, shifted_support, params);

  int ok = 0;
  for (int r = 0; r < params.restarts; ++r) {
    auto reg = register_and_score(res.restart_objects[r], shifted);
    if (reg.nrmse < 0.05) ++ok;
  }
  CHECK(ok >= 3);
  CHECK(res.traces[res.best_restart].size() > 10);
  CHECK(res.traces[res.best_restart].back().second <=
        res.traces[res.best_restart].front().second);
}

TEST_CASE("solve_components: exact left inverse of forward_S_vector") {
  RngStream rng(6, 0);
  const std::size_t n = 16;
  double theta = 0.31, beta = 1.913 / 2;
  Array2<cd> s[5];
  for (auto& img : s) img = Array2<cd>(n, n);
  Array2<double> mx(n, n), my(n, n), mz(n, n), aa(n, n);
  for (std::size_t i = 0; i < n * n; ++i) {
    mx.data[i] = rng.uniform() - 0.5;
    my.data[i] = rng.uniform() - 0.5;
    mz.data[i] = rng.uniform() - 0.5;
    aa.data[i] = rng.uniform();
    auto sv = forward_S_vector(mx.data[i], my.data[i], mz.data[i], aa.data[i], theta, beta);
    for (int c = 0; c < 5; ++c) s[c].data[i] = sv[c];
  }
  auto comp = solve_components(s[0], s[1], s[2], s[3], s[4], theta, beta);
  double worst = 0, worst_res = 0;
  for (std::size_t i = 0; i < n * n; ++i) {
    worst = std::max(worst, std::abs(comp.Mx.data[i] - mx.data[i]));
    worst = std::max(worst, std::abs(comp.My.data[i] - my.data[i]));
    worst = std::max(worst, std::abs(comp.Mz.data[i] - mz.data[i]));
    worst = std::max(worst, std::abs(comp.A.data[i] - aa.data[i]));
    worst_res = std::max(worst_res, comp.residual.data[i]);
  }
  CHECK(worst < 1e-10);
  CHECK(worst_res < 1e-12);
  CHECK(comp.condition_number > 1.0);
  CHECK(comp.condition_number < 10.0);
}

TEST_CASE("solve_components: zeros, errors") {
  Array2<cd> z(4, 4, cd(0.0));
  auto comp = solve_components(z, z, z, z, z, 0.3, 1.0);
  for (double v : comp.Mx.data) CHECK(v == 0.0);
  for (double v : comp.residual.data) CHECK(v == 0.0);

  Array2<cd> w(4, 5, cd(0.0));
  CHECK_THROWS_AS(solve_components(z, z, z, w, z, 0.3, 1.0), ConfigError);
  CHECK_THROWS_AS(solve_components(z, z, z, z, z, 5e-4, 1.0), GeometryError);
}

TEST_CASE("solve_components: error scales linearly with noise") {
  RngStream rng(41, 0);
  const std::size_t n = 24;
  double theta = 0.25, beta = 0.9565;
  Array2<cd> clean[5];
  for (auto& img : clean) img = Array2<cd>(n, n);
  for (std::size_t i = 0; i < n * n; ++i) {
    auto sv = forward_S_vector(rng.uniform() - 0.5, rng.uniform() - 0.5, rng.uniform() - 0.5,
                               rng.uniform(), theta, beta);
    for (int c = 0; c < 5; ++c) clean[c].data[i] = sv[c];
  }
  std::vector<double> sigmas, errs;
  for (double sigma = 1e-4; sigma < 1.5e-3; sigma *= 1.6) {
    Array2<cd> noisy[5];
    RngStream nrng(17, static_cast<std::uint64_t>(sigma * 1e9));
    for (int c = 0; c < 5; ++c) {
      noisy[c] = clean[c];
      for (auto& v : noisy[c].data) v += nrng.complex_gaussian(sigma * sigma);
    }
    auto comp = solve_components(noisy[0], noisy[1], noisy[2], noisy[3], noisy[4], theta, beta);
    double rms = 0;
    for (std::size_t i = 0; i < n * n; ++i) rms += comp.residual.data[i] * comp.residual.data[i];
    // use the mean abs component deviation as the error statistic
    double dev = 0;
    auto ref = solve_components(clean[0], clean[1], clean[2], clean[3], clean[4], theta, beta);
    for (std::size_t i = 0; i < n * n; ++i)
      dev += std::abs(comp.Mx.data[i] - ref.Mx.data[i]) +
             std::abs(comp.My.data[i] - ref.My.data[i]) +
             std::abs(comp.Mz.data[i] - ref.Mz.data[i]) +
             std::abs(comp.A.data[i] - ref.A.data[i]);
    sigmas.push_back(sigma);
    errs.push_back(dev / (4.0 * n * n));
  }
  // linear regression err = a*sigma + b: R^2 > 0.95
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double m = static_cast<double>(sigmas.size());
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    sx += sigmas[i];
    sy += errs[i];
    sxx += sigmas[i] * sigmas[i];
    sxy += sigmas[i] * errs[i];
    syy += errs[i] * errs[i];
  }
  double r = (m * sxy - sx * sy) / std::sqrt((m * sxx - sx * sx) * (m * syy - sy * sy));
  CHECK(r * r > 0.95);
}

TEST_CASE("rotate_sample basics") {
  SUBCASE("angle 0 is the bitwise identity") {
    RngStream rng(12, 0);
    SampleGrid g = SampleGrid::zeros(5, 4, 3, 0.5);
    for (auto& v : g.A.data) v = rng.uniform();
    for (auto& v : g.Mx.data) v = rng.uniform() - 0.5;
    auto r = rotate_sample(g, 0.0, RotationAxis::kZ);
    for (std::size_t i = 0; i < g.A.size(); ++i) {
      CHECK(std::memcmp(&r.A.data[i], &g.A.data[i], 8) == 0);
      CHECK(std::memcmp(&r.Mx.data[i], &g.Mx.data[i], 8) == 0);
    }
  }
  SUBCASE("two 90-degree z-rotations equal one 180-degree rotation") {
    RngStream rng(13, 0);
    SampleGrid g = SampleGrid::zeros(6, 6, 2, 1.0);
    for (auto& v : g.A.data) v = rng.uniform();
    auto twice = rotate_sample(rotate_sample(g, kPi / 2, RotationAxis::kZ), kPi / 2,
                               RotationAxis::kZ);
    auto once = rotate_sample(g, kPi, RotationAxis::kZ);
    for (std::size_t i = 0; i < g.A.size(); ++i)
      CHECK(twice.A.data[i] == doctest::Approx(once.A.data[i]).epsilon(1e-14));
  }
  SUBCASE("vector field rotates with the lattice (right-hand rule)") {
    SampleGrid g = SampleGrid::zeros(4, 4, 4, 1.0);
    for (auto& v : g.Mx.data) v = 1.0;
    auto r = rotate_sample(g, kPi / 2, RotationAxis::kZ);
    for (std::size_t i = 0; i < g.A.size(); ++i) {
      CHECK(r.Mx.data[i] == doctest::Approx(0.0));
      CHECK(r.My.data[i] == doctest::Approx(1.0));
      CHECK(r.Mz.data[i] == doctest::Approx(0.0));
    }
    auto rx = rotate_sample(g, kPi / 2, RotationAxis::kX);
    for (std::size_t i = 0; i < g.A.size(); ++i)
      CHECK(rx.Mx.data[i] == doctest::Approx(1.0));  // x-vector invariant about x
  }
}

TEST_CASE("uniform cylinder: projections identical at all angles") {
  SampleGrid g = SampleGrid::zeros(17, 17, 3, 1.0);
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t k = 0; k < g.nz; ++k) {
        Vec3 p = g.voxel_pos(i, j, k);
        if (p.x * p.x + p.y * p.y <= 36.0) g.A.at(i, j, k) = 1.0;  // axis along z
      }
  auto base = project_y(g.A, g.pitch);
  for (double ang : {0.5, 1.1, 2.2}) {
    auto rot = rotate_sample(g, ang, RotationAxis::kZ);
    auto proj = project_y(rot.A, g.pitch);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < proj.size(); ++i) {
      num += (proj.data[i] - base.data[i]) * (proj.data[i] - base.data[i]);
      den += base.data[i] * base.data[i];
    }
    CHECK(std::sqrt(num / den) < 0.03);  // trilinear resampling tolerance
  }
}

TEST_CASE("fbp: single off-center voxel reconstructs at the true location") {
  const std::size_t n = 33;
  SampleGrid g = SampleGrid::zeros(n, n, 1, 1.0);
  g.A.at(22, 10, 0) = 1.0;
  const int nang = 90;
  std::vector<Array2<double>> projections;
  std::vector<double> angles;
  for (int a = 0; a < nang; ++a) {
    double ang = a * kPi / nang;
    angles.push_back(ang);
    auto rot = rotate_sample(g, ang, RotationAxis::kZ);
    projections.push_back(project_y(rot.A, g.pitch));
  }
  Volume vol = tomo_fbp(projections, angles, TomoFilter::kRamLak, 1.0, RotationAxis::kZ);
  REQUIRE(vol.values.n0 == n);
  REQUIRE(vol.values.n1 == n);
  std::size_t bi = 0, bj = 0;
  double best = -1e300;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (vol.values.at(i, j, 0) > best) {
        best = vol.values.at(i, j, 0);
        bi = i;
        bj = j;
      }
  CHECK(bi == 22);
  CHECK(bj == 10);
}

TEST_CASE("fbp is linear to 1e-10") {
  const std::size_t n = 17;
  RngStream rng(3, 1);
  std::vector<Array2<double>> pa, pb, psum;
  std::vector<double> angles;
  for (int a = 0; a < 24; ++a) {
    angles.push_back(a * kPi / 24);
    Array2<double> ia(n, 2), ib(n, 2), is(n, 2);
    for (std::size_t i = 0; i < ia.size(); ++i) {
      ia.data[i] = rng.uniform();
      ib.data[i] = rng.uniform();
      is.data[i] = ia.data[i] + ib.data[i];
    }
    pa.push_back(ia);
    pb.push_back(ib);
    psum.push_back(is);
  }
  auto va = tomo_fbp(pa, angles, TomoFilter::kRamLak, 1.0);
  auto vb = tomo_fbp(pb, angles, TomoFilter::kRamLak, 1.0);
  auto vs = tomo_fbp(psum, angles, TomoFilter::kRamLak, 1.0);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < vs.values.size(); ++i) {
    double d = vs.values.data[i] - (va.values.data[i] + vb.values.data[i]);
    num += d * d;
    den += vs.values.data[i] * vs.values.data[i];
  }
  CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("fbp coverage errors") {
  std::vector<Array2<double>> p(2, Array2<double>(8, 1, 1.0));
  CHECK_THROWS_AS(tomo_fbp(p, {0.0, kPi / 4}, TomoFilter::kRamLak, 1.0), GeometryError);
  std::vector<Array2<double>> p179;
  std::vector<double> a179;
  for (int i = 0; i < 179; ++i) {
    p179.push_back(Array2<double>(8, 1, 1.0));
    a179.push_back(i * kPi / 180.0);  // 179 one-degree cells: coverage 179 deg
  }
  CHECK_THROWS_AS(tomo_fbp(p179, a179, TomoFilter::kRamLak, 1.0), GeometryError);
}

TEST_CASE("oracle-phase frame inversion is exact") {
  RngStream rng(19, 0);
  Array2<cd> obj(8, 8, cd(0.0));
  for (std::size_t i = 2; i < 6; ++i)
    for (std::size_t j = 2; j < 6; ++j) obj.at(i, j) = cd(rng.uniform(), rng.uniform() - 0.5);
  double pitch = 0.5;
  Array2<cd> F = frame_forward(obj, pitch);
  MagnitudeFrame mf;
  mf.frame = Array2<double>(8, 8);
  for (std::size_t i = 0; i < F.size(); ++i) mf.frame.data[i] = std::abs(F.data[i]);
  mf.frame_pitch = pitch;
  auto rec = oracle_phase_object(mf, obj);
  double err = 0;
  for (std::size_t i = 0; i < obj.size(); ++i)
    err = std::max(err, std::abs(rec.data[i] - obj.data[i]));
  CHECK(err < 1e-12);
}

TEST_CASE("shepp-logan window tames the ram-lak high end") {
  // same sinogram, windowed filter gives a smoother (lower sup-norm) result
  const std::size_t n = 33;
  SampleGrid g = SampleGrid::zeros(n, n, 1, 1.0);
  g.A.at(16, 16, 0) = 1.0;
  std::vector<Array2<double>> projections;
  std::vector<double> angles;
  for (int a = 0; a < 60; ++a) {
    angles.push_back(a * kPi / 60);
    auto rot = rotate_sample(g, angles.back(), RotationAxis::kZ);
    projections.push_back(project_y(rot.A, g.pitch));
  }
  auto ram = tomo_fbp(projections, angles, TomoFilter::kRamLak, 1.0);
  auto sl = tomo_fbp(projections, angles, TomoFilter::kSheppLogan, 1.0);
  CHECK(sl.values.at(16, 16, 0) < ram.values.at(16, 16, 0));
  CHECK(sl.values.at(16, 16, 0) > 0.3);
}
