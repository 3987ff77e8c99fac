#include "ngi/correlator.hpp"

#include <cmath>

#include "ngi/errors.hpp"
#include "ngi/fft.hpp"
#include "ngi/ngio.hpp"
#include "ngi/propagation.hpp"
#include "ngi/rng.hpp"
#include "ngi/threads.hpp"

namespace ngi {

using nlohmann::json;

std::string to_string(Statistics s) { return s == Statistics::kFermion ? "fermion" : "boson"; }

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kQuadrature: return "quadrature";
    case Provenance::kClosedForm: return "closed_form";
    case Provenance::kMonteCarlo: return "monte_carlo";
  }
  return "?";
}

DeltaGrid DeltaGrid::from_detector(const DetectorSpec& det, int dim) {
  DeltaGrid g;
  g.dim = dim;
  for (int ax = 0; ax < dim; ++ax) {
    g.n[ax] = det.n_pixels;
    g.pitch[ax] = det.pitch();
    g.start[ax] = det.coord(0);
  }
  return g;
}

double chi_effective(const Scene& scene) {
  const auto& g = scene.geom;
  double v = scene.speed();
  double per_axis = g.lambda * g.d_r * g.d1 / g.d2;
  double denom = g.lambda * g.d_r * g.d1 * g.d2;
  double factor = v * v * g.I0 * g.I0 / (denom * denom);
  for (int ax = 0; ax < g.dim; ++ax) factor *= per_axis;
  return factor;
}

namespace {

json normalization_json(const Scene& scene, double total, double v2_included) {
  return json{{"total_factor", total},
              {"chi_2d", chi(scene)},
              {"chi_effective", chi_effective(scene)},
              {"v_squared", scene.speed() * scene.speed()},
              {"v_squared_included", v2_included},
              {"I0", scene.geom.I0},
              {"transverse_dim", scene.geom.dim},
              {"fourier_sign", kFourierSign}};
}

std::vector<Vec2> source_points(const Scene& scene) {
  const auto& s = scene.source;
  std::vector<Vec2> pts;
  if (scene.geom.dim == 1) {
    pts.reserve(s.n_points);
    for (std::size_t i = 0; i < s.n_points; ++i)
      pts.push_back({centered_coord(i, s.n_points, s.pitch(), s.center.x), 0.0});
  } else {
    pts.reserve(s.n_points * s.n_points);
    for (std::size_t i = 0; i < s.n_points; ++i)
      for (std::size_t k = 0; k < s.n_points; ++k)
        pts.push_back({centered_coord(i, s.n_points, s.pitch(), s.center.x),
                       centered_coord(k, s.n_points, s.pitch(), s.center.z)});
  }
  return pts;
}

void check_quadrature_sampling(const Scene& scene, PositionLabel label) {
  auto rep = validate_sampling(scene);
  std::string want = to_string(label);
  for (const auto& c : rep.conditions) {
    if (c.name.find(want) == std::string::npos) continue;
    if (!c.pass) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "aliasing violation: %s pitch %.6g > bound %.6g",
                    c.name.c_str(), c.pitch, c.bound);
      throw GeometryError(msg);
    }
  }
}

}  // namespace

CorrelationMap correlation_quadrature(const Scene& scene, const SpinorVolume& vol, Spin p,
                                      const DeltaGrid& grid) {
  check_quadrature_sampling(scene, vol.position_label);
  const auto& g = scene.geom;
  Vec3 det = detector_position(vol.position_label, g.theta, g.d2, g.d1);
  Vec2 xi_t{det.x, det.z};

  auto etas = source_points(scene);
  auto ht = h_target_row(scene, vol, p, xi_t, etas);

  double measure = g.dim == 1 ? scene.source.pitch() : scene.source.pitch() * scene.source.pitch();
  double v2i2 = scene.speed() * scene.speed() * g.I0 * g.I0;

  CorrelationMap map;
  map.grid = grid;
  map.values = Array2<double>(grid.n[0], grid.dim == 2 ? grid.n[1] : 1);
  map.spin = p;
  map.position_label = vol.position_label;
  map.statistics = Statistics::kFermion;
  map.provenance = Provenance::kQuadrature;
  map.total_factor = chi_effective(scene);
  map.normalization = normalization_json(scene, map.total_factor, 1.0);

  const double lambda = g.lambda, k = g.k(), dr = g.d_r;
  parallel_for(static_cast<std::int64_t>(map.values.size()),
               [&](std::int64_t p0, std::int64_t p1) {
                 for (std::int64_t pix = p0; pix < p1; ++pix) {
                   std::size_t i = static_cast<std::size_t>(pix) / map.values.n1;
                   std::size_t kk = static_cast<std::size_t>(pix) % map.values.n1;
                   Vec2 xi_r{xi_t.x + grid.coord(0, i),
                             xi_t.z + (grid.dim == 2 ? grid.coord(1, kk) : 0.0)};
                   cd acc(0.0);
                   for (std::size_t e = 0; e < etas.size(); ++e)
                     acc += std::conj(fresnel_kernel(xi_r, etas[e], dr, lambda, k)) * ht[e];
                   double t2 = std::norm(acc * measure);
                   map.values.data[pix] = -v2i2 * t2;
                 }
               });
  return map;
}

// ---------------------------------------------------------------------------
// Closed form

namespace {

/// (1/M) sum_{j=0}^{M-1} e^{i j u}: the periodic interpolation kernel of a
/// length-M DFT. Exact for any u; equals 1 at u = 2 pi m.
cd dirichlet(double u, std::size_t M) {
  double d = std::remainder(u, kTwoPi);
  if (std::abs(d) < 1e-13) return cd(1.0, 0.0);
  double md = static_cast<double>(M) * d;
  cd num(-2.0 * std::sin(md / 2) * std::sin(md / 2), std::sin(md));
  cd den(-2.0 * std::sin(d / 2) * std::sin(d / 2), std::sin(d));
  return num / den / static_cast<double>(M);
}

}  // namespace

cd dtft_oracle(const Array2<cd>& img, double pitch, double qx, double qz) {
  cd acc(0.0);
  for (std::size_t i = 0; i < img.n0; ++i)
    for (std::size_t k = 0; k < img.n1; ++k) {
      double x = centered_coord(i, img.n0, pitch);
      double z = centered_coord(k, img.n1, pitch);
      acc += img.at(i, k) * std::exp(cd(0.0, kFourierSign * (qx * x + qz * z)));
    }
  double measure = img.n1 == 1 ? pitch : pitch * pitch;
  return acc * measure;
}

CorrelationMap correlation_closed_form(const Scene& scene, const SpinorImage& img, Spin p,
                                       const DeltaGrid& grid) {
  const auto& g = scene.geom;
  const Array2<cd>& f = img.channel(p);
  const double a = img.pitch;
  const std::size_t nx = f.n0, nz = f.n1;
  const double qband = kPi / a * (1.0 + 1e-12);

  // q coordinates per axis
  std::vector<double> qx(grid.n[0]), qz(grid.dim == 2 ? grid.n[1] : 1, 0.0);
  for (std::size_t i = 0; i < grid.n[0]; ++i)
    qx[i] = kTwoPi * grid.coord(0, i) / (g.lambda * g.d2);
  if (grid.dim == 2)
    for (std::size_t i = 0; i < grid.n[1]; ++i)
      qz[i] = kTwoPi * grid.coord(1, i) / (g.lambda * g.d2);
  for (double q : qx)
    if (std::abs(q) > qband) throw GeometryError("requested q beyond representable band");
  for (double q : qz)
    if (std::abs(q) > qband) throw GeometryError("requested q beyond representable band");

  const std::size_t Mx = fft::next_pow2(4 * nx);
  const std::size_t Mz = nz > 1 ? fft::next_pow2(4 * nz) : 1;
  const double x0 = centered_coord(0, nx, a);
  const double z0 = centered_coord(0, nz, a);

  // Transform along x per z column.
  std::vector<cd> X1(Mx * nz, cd(0.0));
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t k = 0; k < nz; ++k) X1[i * nz + k] = f.at(i, k);
  {
    // column-strided 1D transforms: gather, transform, scatter
    std::vector<cd> colbuf(Mx);
    for (std::size_t k = 0; k < nz; ++k) {
      for (std::size_t i = 0; i < Mx; ++i) colbuf[i] = X1[i * nz + k];
      fft::transform(colbuf.data(), Mx, kFourierSign);
      for (std::size_t i = 0; i < Mx; ++i) X1[i * nz + k] = colbuf[i];
    }
  }

  // Interpolate along x onto the requested qx set.
  std::vector<cd> row(qx.size() * nz);
  parallel_for(static_cast<std::int64_t>(qx.size()), [&](std::int64_t i0, std::int64_t i1) {
    std::vector<cd> kern(Mx);
    for (std::int64_t i = i0; i < i1; ++i) {
      for (std::size_t kk = 0; kk < Mx; ++kk)
        kern[kk] = dirichlet(qx[i] * a - kTwoPi * static_cast<double>(kk) / static_cast<double>(Mx),
                             Mx);
      for (std::size_t z = 0; z < nz; ++z) {
        cd acc(0.0);
        for (std::size_t kk = 0; kk < Mx; ++kk) acc += X1[kk * nz + z] * kern[kk];
        row[static_cast<std::size_t>(i) * nz + z] = acc;
      }
    }
  });

  CorrelationMap map;
  map.grid = grid;
  map.values = Array2<double>(grid.n[0], grid.dim == 2 ? grid.n[1] : 1);
  map.spin = p;
  map.position_label = img.position_label;
  map.statistics = Statistics::kFermion;
  map.provenance = Provenance::kClosedForm;
  map.total_factor = chi_effective(scene);
  map.normalization = normalization_json(scene, map.total_factor, 1.0);

  const double chi_eff = map.total_factor;
  if (grid.dim == 1) {
    for (std::size_t i = 0; i < qx.size(); ++i) {
      cd F = a * std::exp(cd(0.0, kFourierSign * qx[i] * x0)) * row[i];
      map.values.at(i, 0) = -chi_eff * std::norm(F);
    }
    return map;
  }

  // Second axis: pad each interpolated row along z, transform, interpolate.
  parallel_for(static_cast<std::int64_t>(qx.size()), [&](std::int64_t i0, std::int64_t i1) {
    std::vector<cd> zbuf(Mz);
    for (std::int64_t i = i0; i < i1; ++i) {
      std::fill(zbuf.begin(), zbuf.end(), cd(0.0));
      for (std::size_t z = 0; z < nz; ++z) zbuf[z] = row[static_cast<std::size_t>(i) * nz + z];
      fft::transform(zbuf.data(), Mz, kFourierSign);
      for (std::size_t j = 0; j < qz.size(); ++j) {
        cd acc(0.0);
        for (std::size_t kk = 0; kk < Mz; ++kk)
          acc += zbuf[kk] *
                 dirichlet(qz[j] * a - kTwoPi * static_cast<double>(kk) / static_cast<double>(Mz),
                           Mz);
        cd F = a * a *
               std::exp(cd(0.0, kFourierSign * (qx[i] * x0 + qz[j] * z0))) * acc;
        map.values.at(static_cast<std::size_t>(i), j) = -chi_eff * std::norm(F);
      }
    }
  });
  return map;
}

// ---------------------------------------------------------------------------
// Monte Carlo speckle ensemble

CorrelationMap speckle_mc(const Scene& scene, const SpinorVolume& vol, Spin p,
                          const DeltaGrid& grid, std::uint64_t n_realizations,
                          Statistics statistics, std::uint64_t seed) {
  if (n_realizations < 2)
    throw StatsError("n_realizations too small for stderr (need >= 2)");
  const auto& g = scene.geom;
  Vec3 det = detector_position(vol.position_label, g.theta, g.d2, g.d1);
  Vec2 xi_t{det.x, det.z};

  auto etas = source_points(scene);
  auto ht = h_target_row(scene, vol, p, xi_t, etas);
  const std::size_t ne = etas.size();
  const std::size_t npix = grid.count();
  const double measure = g.dim == 1 ? scene.source.pitch()
                                    : scene.source.pitch() * scene.source.pitch();
  const double var_phi = g.I0 / measure;  // per-point mean |phi|^2

  // Reference kernel matrix, pixel-major for the hot loop.
  if (npix * ne > (std::size_t{1} << 26))
    throw StatsError("speckle_mc: scan x source grid too large for the kernel matrix");
  std::vector<cd> Hr(npix * ne);
  const std::size_t n1 = grid.dim == 2 ? grid.n[1] : 1;
  parallel_for(static_cast<std::int64_t>(npix), [&](std::int64_t p0, std::int64_t p1) {
    for (std::int64_t pix = p0; pix < p1; ++pix) {
      std::size_t i = static_cast<std::size_t>(pix) / n1;
      std::size_t kk = static_cast<std::size_t>(pix) % n1;
      Vec2 xi_r{xi_t.x + grid.coord(0, i), xi_t.z + (grid.dim == 2 ? grid.coord(1, kk) : 0.0)};
      for (std::size_t e = 0; e < ne; ++e)
        Hr[static_cast<std::size_t>(pix) * ne + e] =
            fresnel_kernel(xi_r, etas[e], g.d_r, g.lambda, g.k());
    }
  });

  // Fixed-size realization blocks; block boundaries do not depend on the
  // worker count, and each block accumulates sequentially, so digests are
  // reproducible for any --threads.
  const std::uint64_t nblocks = std::min<std::uint64_t>(50, n_realizations);
  const std::uint64_t bs = (n_realizations + nblocks - 1) / nblocks;
  const std::uint64_t B = (n_realizations + bs - 1) / bs;

  std::vector<double> S_rt(B * npix, 0.0), S_r(B * npix, 0.0), S_r2(B * npix, 0.0);
  std::vector<double> S_t(B, 0.0);
  std::vector<std::uint64_t> S_n(B, 0);

  parallel_for(static_cast<std::int64_t>(B), [&](std::int64_t b0, std::int64_t b1) {
    std::vector<cd> phi(ne);
    std::vector<double> Ir(npix);
    for (std::int64_t b = b0; b < b1; ++b) {
      std::uint64_t r0 = static_cast<std::uint64_t>(b) * bs;
      std::uint64_t r1 = std::min<std::uint64_t>(r0 + bs, n_realizations);
      double* rt = S_rt.data() + static_cast<std::size_t>(b) * npix;
      double* rs = S_r.data() + static_cast<std::size_t>(b) * npix;
      double* r2 = S_r2.data() + static_cast<std::size_t>(b) * npix;
      for (std::uint64_t r = r0; r < r1; ++r) {
        RngStream rng(seed, r);
        for (std::size_t e = 0; e < ne; ++e) phi[e] = rng.complex_gaussian(var_phi);
        cd psit(0.0);
        for (std::size_t e = 0; e < ne; ++e) psit += ht[e] * phi[e];
        psit *= measure;
        double It = std::norm(psit);
        for (std::size_t pix = 0; pix < npix; ++pix) {
          const cd* hrow = Hr.data() + pix * ne;
          cd psir(0.0);
          for (std::size_t e = 0; e < ne; ++e) psir += hrow[e] * phi[e];
          psir *= measure;
          double v = std::norm(psir);
          Ir[pix] = v;
          rs[pix] += v;
          r2[pix] += v * v;
          rt[pix] += v * It;
        }
        S_t[b] += It;
        ++S_n[b];
      }
    }
  });

  // Fixed-order block totals.
  std::vector<double> tot_rt(npix, 0.0), tot_r(npix, 0.0), tot_r2(npix, 0.0);
  double tot_t = 0.0;
  for (std::uint64_t b = 0; b < B; ++b) {
    for (std::size_t pix = 0; pix < npix; ++pix) {
      tot_rt[pix] += S_rt[b * npix + pix];
      tot_r[pix] += S_r[b * npix + pix];
      tot_r2[pix] += S_r2[b * npix + pix];
    }
    tot_t += S_t[b];
  }
  const double n = static_cast<double>(n_realizations);

  CorrelationMap map;
  map.grid = grid;
  map.values = Array2<double>(grid.n[0], n1);
  map.stderr_map = Array2<double>(grid.n[0], n1);
  map.siegert = Array2<double>(grid.n[0], n1);
  map.siegert_stderr = Array2<double>(grid.n[0], n1);
  map.spin = p;
  map.position_label = vol.position_label;
  map.statistics = statistics;
  map.provenance = Provenance::kMonteCarlo;
  map.seed = seed;
  map.n_realizations = n_realizations;
  // The classical ensemble estimates the exchange term without the velocity
  // factors; record the factor that relates it to the closed form.
  double v2 = scene.speed() * scene.speed();
  map.total_factor = chi_effective(scene) / v2;
  map.normalization = normalization_json(scene, map.total_factor, 0.0);

  double sign = statistics == Statistics::kFermion ? -1.0 : 1.0;
  std::vector<double> rep(B), repg(B);
  for (std::size_t pix = 0; pix < npix; ++pix) {
    double C = tot_rt[pix] / n - (tot_r[pix] / n) * (tot_t / n);
    // delete-one-block jackknife
    double mean_rep = 0.0, mean_repg = 0.0;
    for (std::uint64_t b = 0; b < B; ++b) {
      double nn = n - static_cast<double>(S_n[b]);
      double art = (tot_rt[pix] - S_rt[b * npix + pix]) / nn;
      double ar = (tot_r[pix] - S_r[b * npix + pix]) / nn;
      double ar2 = (tot_r2[pix] - S_r2[b * npix + pix]) / nn;
      double at = (tot_t - S_t[b]) / nn;
      rep[b] = art - ar * at;
      repg[b] = ar2 / (ar * ar) - 1.0;
      mean_rep += rep[b];
      mean_repg += repg[b];
    }
    mean_rep /= static_cast<double>(B);
    mean_repg /= static_cast<double>(B);
    double var = 0.0, varg = 0.0;
    for (std::uint64_t b = 0; b < B; ++b) {
      var += (rep[b] - mean_rep) * (rep[b] - mean_rep);
      varg += (repg[b] - mean_repg) * (repg[b] - mean_repg);
    }
    double fac = (static_cast<double>(B) - 1.0) / static_cast<double>(B);
    map.values.data[pix] = sign * C;
    map.stderr_map->data[pix] = std::sqrt(fac * var);
    map.siegert->data[pix] = tot_r2[pix] / n / ((tot_r[pix] / n) * (tot_r[pix] / n)) - 1.0;
    map.siegert_stderr->data[pix] = std::sqrt(fac * varg);
  }
  return map;
}

// ---------------------------------------------------------------------------
// Serialization

json CorrelationMap::sidecar() const {
  json j;
  j["type"] = "correlation_map";
  j["spin"] = to_string(spin);
  j["position"] = to_string(position_label);
  j["statistics"] = to_string(statistics);
  j["provenance"] = to_string(provenance);
  j["delta_grid"] = {{"dim", grid.dim},
                     {"n", {grid.n[0], grid.n[1]}},
                     {"pitch", {grid.pitch[0], grid.pitch[1]}},
                     {"start", {grid.start[0], grid.start[1]}}};
  j["normalization"] = normalization;
  j["seed"] = seed;
  j["n_realizations"] = n_realizations;
  j["has_stderr"] = stderr_map.has_value();
  return j;
}

void CorrelationMap::write(const std::string& path_base) const {
  std::vector<std::uint64_t> dims{values.n0, values.n1};
  write_ngi(path_base + ".ngi", dims, values.data.data());
  if (stderr_map) write_ngi(path_base + "_stderr.ngi", dims, stderr_map->data.data());
  if (siegert) write_ngi(path_base + "_siegert.ngi", dims, siegert->data.data());
  if (siegert_stderr)
    write_ngi(path_base + "_siegert_stderr.ngi", dims, siegert_stderr->data.data());
  write_json(path_base + ".json", sidecar());
}

CorrelationMap read_correlation_map(const std::string& path_base) {
  json j = read_json(path_base + ".json");
  NgiArray arr = read_ngi(path_base + ".ngi");
  if (arr.dtype != 1 || arr.dims.size() != 2)
    throw MissingInputError("correlation map must be a 2D float64 array: " + path_base);
  CorrelationMap map;
  map.values = Array2<double>(arr.dims[0], arr.dims[1]);
  map.values.data = arr.f64;
  map.spin = j["spin"] == "up" ? Spin::kUp : Spin::kDown;
  map.position_label = position_from_string(j["position"].get<std::string>());
  map.statistics = j["statistics"] == "fermion" ? Statistics::kFermion : Statistics::kBoson;
  std::string prov = j["provenance"].get<std::string>();
  map.provenance = prov == "quadrature"    ? Provenance::kQuadrature
                   : prov == "closed_form" ? Provenance::kClosedForm
                                           : Provenance::kMonteCarlo;
  const auto& dg = j["delta_grid"];
  map.grid.dim = dg["dim"].get<int>();
  for (int ax = 0; ax < 2; ++ax) {
    map.grid.n[ax] = dg["n"][ax].get<std::size_t>();
    map.grid.pitch[ax] = dg["pitch"][ax].get<double>();
    map.grid.start[ax] = dg["start"][ax].get<double>();
  }
  map.normalization = j["normalization"];
  if (!map.normalization.contains("total_factor"))
    throw MissingInputError("missing normalization metadata in " + path_base + ".json");
  map.total_factor = map.normalization["total_factor"].get<double>();
  map.seed = j.value("seed", 0ull);
  map.n_realizations = j.value("n_realizations", 0ull);
  if (j.value("has_stderr", false)) {
    NgiArray se = read_ngi(path_base + "_stderr.ngi");
    Array2<double> m(se.dims[0], se.dims[1]);
    m.data = se.f64;
    map.stderr_map = std::move(m);
  }
  return map;
}

}  // namespace ngi
