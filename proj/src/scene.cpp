#include "ngi/scene.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "ngi/errors.hpp"
#include "ngi/ngio.hpp"

namespace ngi {

using nlohmann::json;

std::string to_string(PositionLabel p) {
  switch (p) {
    case PositionLabel::kP1: return "P1";
    case PositionLabel::kP2: return "P2";
    case PositionLabel::kP3: return "P3";
  }
  return "?";
}

PositionLabel position_from_string(const std::string& s) {
  if (s == "P1") return PositionLabel::kP1;
  if (s == "P2") return PositionLabel::kP2;
  if (s == "P3") return PositionLabel::kP3;
  throw ConfigError("unknown detector position label: " + s);
}

void PhysicalConstants::validate() const {
  if (!(m_n > 0 && hbar > 0 && r_e > 0 && gamma > 0 && mu_B > 0))
    throw ConfigError("all physical constants must be strictly positive");
}

void Geometry::validate() const {
  if (!(lambda > 0)) throw ConfigError("lambda must be > 0");
  if (!(d1 > 0)) throw ConfigError("d1 must be > 0");
  if (!(d2 > 0)) throw ConfigError("d2 must be > 0");
  if (!(I0 > 0)) throw ConfigError("I0 must be > 0");
  if (!(theta > 0 && theta < kPi / 2)) throw ConfigError("theta must be in (0, π/2)");
  if (d_r != d1 + d2) throw ConfigError("d_r must equal d1+d2");
  if (dim != 1 && dim != 2) throw ConfigError("transverse dim must be 1 or 2");
}

void SourceSpec::validate() const {
  if (n_points < 2) throw ConfigError("source n_points must be >= 2");
  if (!(extent > 0)) throw ConfigError("source extent must be > 0");
}

void DetectorSpec::validate() const {
  if (n_pixels < 1) throw ConfigError("detector n_pixels must be >= 1");
  if (!(extent > 0)) throw ConfigError("detector extent must be > 0");
}

SampleGrid SampleGrid::zeros(std::size_t nx, std::size_t ny, std::size_t nz, double pitch) {
  SampleGrid g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.pitch = pitch;
  g.A = Array3<double>(nx, ny, nz, 0.0);
  g.Mx = Array3<double>(nx, ny, nz, 0.0);
  g.My = Array3<double>(nx, ny, nz, 0.0);
  g.Mz = Array3<double>(nx, ny, nz, 0.0);
  return g;
}

bool SampleGrid::has_magnetization() const {
  for (double v : Mx.data)
    if (v != 0.0) return true;
  for (double v : My.data)
    if (v != 0.0) return true;
  for (double v : Mz.data)
    if (v != 0.0) return true;
  return false;
}

void SampleGrid::validate_finite() const {
  auto check = [](const Array3<double>& a, const char* name) {
    for (double v : a.data)
      if (!std::isfinite(v)) throw ConfigError(std::string("non-finite value in sample ") + name);
  };
  check(A, "A");
  check(Mx, "Mx");
  check(My, "My");
  check(Mz, "Mz");
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key \"" + it.key() + "\" in " + context);
  }
}

double require_num(const json& obj, const std::string& key, const std::string& context) {
  if (!obj.contains(key)) throw ConfigError("missing field \"" + key + "\" in " + context);
  if (!obj[key].is_number()) throw ConfigError("field \"" + key + "\" in " + context + " must be a number");
  return obj[key].get<double>();
}

double opt_num(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return obj[key].get<double>();
}

}  // namespace

SampleGrid make_sample_from_config(const json& s) {
  check_keys(s, {"pitch", "dims", "phantom", "files", "far_field_override"}, "sample");
  double pitch = require_num(s, "pitch", "sample");
  if (!(pitch > 0)) throw ConfigError("sample pitch must be > 0");

  if (s.contains("files")) {
    const json& f = s["files"];
    check_keys(f, {"a", "m"}, "sample.files");
    if (!f.contains("a")) throw ConfigError("missing field \"a\" in sample.files");
    NgiArray arr = read_ngi(f["a"].get<std::string>());
    if (arr.dtype != 1 || arr.dims.size() != 3)
      throw ConfigError("sample A file must be a 3D float64 NGI array");
    SampleGrid g = SampleGrid::zeros(arr.dims[0], arr.dims[1], arr.dims[2], pitch);
    g.A.data = arr.f64;
    if (f.contains("m")) {
      NgiArray m = read_ngi(f["m"].get<std::string>());
      if (m.dtype != 1 || m.dims.size() != 4 || m.dims[0] != 3 || m.dims[1] != g.nx ||
          m.dims[2] != g.ny || m.dims[3] != g.nz)
        throw ConfigError("sample M file must be float64 with dims (3, nx, ny, nz)");
      std::size_t n = g.A.size();
      std::copy_n(m.f64.begin(), n, g.Mx.data.begin());
      std::copy_n(m.f64.begin() + n, n, g.My.data.begin());
      std::copy_n(m.f64.begin() + 2 * n, n, g.Mz.data.begin());
    }
    g.validate_finite();
    return g;
  }

  if (!s.contains("dims") || !s["dims"].is_array() || s["dims"].size() != 3)
    throw ConfigError("sample.dims must be [nx, ny, nz]");
  std::size_t nx = s["dims"][0].get<std::size_t>();
  std::size_t ny = s["dims"][1].get<std::size_t>();
  std::size_t nz = s["dims"][2].get<std::size_t>();
  if (nx == 0 || ny == 0 || nz == 0) throw ConfigError("sample dims must be positive");
  SampleGrid g = SampleGrid::zeros(nx, ny, nz, pitch);

  if (!s.contains("phantom")) throw ConfigError("sample needs either \"files\" or \"phantom\"");
  const json& ph = s["phantom"];
  check_keys(ph, {"kind", "bumps", "slits", "blobs", "amp"}, "sample.phantom");
  std::string kind = ph.value("kind", "");

  if (kind == "uniform") {
    double amp = opt_num(ph, "amp", 1.0);
    for (auto& v : g.A.data) v = amp;
  } else if (kind == "gauss_bumps_1d") {
    if (!ph.contains("bumps")) throw ConfigError("gauss_bumps_1d needs \"bumps\"");
    for (const auto& b : ph["bumps"]) {
      check_keys(b, {"center", "sigma", "amp"}, "phantom bump");
      double c = require_num(b, "center", "bump");
      double sg = require_num(b, "sigma", "bump");
      double amp = require_num(b, "amp", "bump");
      for (std::size_t i = 0; i < nx; ++i) {
        double x = centered_coord(i, nx, pitch);
        double v = amp * std::exp(-0.5 * ((x - c) / sg) * ((x - c) / sg));
        for (std::size_t j = 0; j < ny; ++j)
          for (std::size_t k = 0; k < nz; ++k) g.A.at(i, j, k) += v;
      }
    }
  } else if (kind == "slits_1d") {
    if (!ph.contains("slits")) throw ConfigError("slits_1d needs \"slits\"");
    for (const auto& b : ph["slits"]) {
      check_keys(b, {"x0", "x1", "amp"}, "phantom slit");
      double x0 = require_num(b, "x0", "slit");
      double x1 = require_num(b, "x1", "slit");
      double amp = require_num(b, "amp", "slit");
      for (std::size_t i = 0; i < nx; ++i) {
        double x = centered_coord(i, nx, pitch);
        if (x >= x0 && x <= x1)
          for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nz; ++k) g.A.at(i, j, k) += amp;
      }
    }
  } else if (kind == "blobs_2d") {
    // Gaussian blobs in (x, z); each may carry a magnetization direction.
    if (!ph.contains("blobs")) throw ConfigError("blobs_2d needs \"blobs\"");
    for (const auto& b : ph["blobs"]) {
      check_keys(b, {"cx", "cz", "sx", "sz", "amp", "m"}, "phantom blob");
      double cx = require_num(b, "cx", "blob");
      double cz = require_num(b, "cz", "blob");
      double sx = require_num(b, "sx", "blob");
      double sz = require_num(b, "sz", "blob");
      double amp = require_num(b, "amp", "blob");
      Vec3 m{0, 0, 0};
      bool has_m = b.contains("m");
      if (has_m) {
        if (!b["m"].is_array() || b["m"].size() != 3)
          throw ConfigError("blob \"m\" must be [mx, my, mz]");
        m = {b["m"][0].get<double>(), b["m"][1].get<double>(), b["m"][2].get<double>()};
      }
      for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t k = 0; k < nz; ++k) {
          double x = centered_coord(i, nx, pitch);
          double z = centered_coord(k, nz, pitch);
          double v = amp * std::exp(-0.5 * (((x - cx) / sx) * ((x - cx) / sx) +
                                            ((z - cz) / sz) * ((z - cz) / sz)));
          for (std::size_t j = 0; j < ny; ++j) {
            if (has_m) {
              g.Mx.at(i, j, k) += v * m.x;
              g.My.at(i, j, k) += v * m.y;
              g.Mz.at(i, j, k) += v * m.z;
            } else {
              g.A.at(i, j, k) += v;
            }
          }
        }
    }
  } else {
    throw ConfigError("unknown phantom kind: \"" + kind + "\"");
  }
  g.validate_finite();
  return g;
}

Scene build_scene(const json& config) {
  check_keys(config, {"geometry", "source", "detector", "sample", "constants", "mode"},
             "config");
  Scene sc;

  if (!config.contains("mode")) throw ConfigError("missing field \"mode\" in config");
  std::string mode = config["mode"].get<std::string>();
  if (mode == "physical")
    sc.mode = UnitMode::kPhysical;
  else if (mode == "normalized")
    sc.mode = UnitMode::kNormalized;
  else
    throw ConfigError("mode must be \"physical\" or \"normalized\"");

  if (config.contains("constants")) {
    const json& c = config["constants"];
    check_keys(c, {"m_n", "hbar", "r_e", "gamma", "mu_B"}, "constants");
    if (sc.mode == UnitMode::kPhysical) {
      sc.constants.m_n = require_num(c, "m_n", "constants");
      sc.constants.hbar = require_num(c, "hbar", "constants");
      sc.constants.r_e = require_num(c, "r_e", "constants");
      sc.constants.gamma = require_num(c, "gamma", "constants");
      sc.constants.mu_B = require_num(c, "mu_B", "constants");
    } else {
      sc.constants.m_n = opt_num(c, "m_n", 1.0);
      sc.constants.hbar = opt_num(c, "hbar", 1.0);
      sc.constants.r_e = opt_num(c, "r_e", 1.0);
      sc.constants.gamma = opt_num(c, "gamma", 1.913);
      sc.constants.mu_B = opt_num(c, "mu_B", 1.0);
    }
  } else if (sc.mode == UnitMode::kPhysical) {
    throw ConfigError("physical mode requires a \"constants\" section");
  }
  sc.constants.validate();

  if (!config.contains("geometry")) throw ConfigError("missing field \"geometry\" in config");
  {
    const json& g = config["geometry"];
    check_keys(g, {"lambda", "d1", "d2", "d_r", "theta", "I0", "transverse_dim"}, "geometry");
    sc.geom.lambda = require_num(g, "lambda", "geometry");
    sc.geom.d1 = require_num(g, "d1", "geometry");
    sc.geom.d2 = require_num(g, "d2", "geometry");
    sc.geom.theta = require_num(g, "theta", "geometry");
    sc.geom.I0 = opt_num(g, "I0", 1.0);
    sc.geom.dim = static_cast<int>(opt_num(g, "transverse_dim", 1.0));
    // d_r is derived; an explicit value is only accepted if consistent.
    sc.geom.d_r = sc.geom.d1 + sc.geom.d2;
    if (g.contains("d_r") && g["d_r"].get<double>() != sc.geom.d_r)
      throw ConfigError("d_r must equal d1+d2");
    sc.geom.validate();
  }

  if (!config.contains("source")) throw ConfigError("missing field \"source\" in config");
  {
    const json& s = config["source"];
    check_keys(s, {"extent", "n_points", "center"}, "source");
    sc.source.extent = require_num(s, "extent", "source");
    sc.source.n_points = static_cast<std::size_t>(require_num(s, "n_points", "source"));
    if (s.contains("center")) {
      if (s["center"].is_array()) {
        if (s["center"].size() != 2) throw ConfigError("source.center must be [x, z]");
        sc.source.center = {s["center"][0].get<double>(), s["center"][1].get<double>()};
      } else {
        sc.source.center = {s["center"].get<double>(), 0.0};
      }
    }
    sc.source.validate();
  }

  if (!config.contains("detector")) throw ConfigError("missing field \"detector\" in config");
  {
    const json& d = config["detector"];
    check_keys(d, {"extent", "n_pixels", "grid", "positions"}, "detector");
    sc.detector.extent = require_num(d, "extent", "detector");
    sc.detector.n_pixels = static_cast<std::size_t>(require_num(d, "n_pixels", "detector"));
    std::string style = d.value("grid", "centered");
    if (style == "centered")
      sc.detector.style = GridStyle::kCentered;
    else if (style == "dft")
      sc.detector.style = GridStyle::kDft;
    else
      throw ConfigError("detector.grid must be \"centered\" or \"dft\"");
    sc.detector.validate();
    if (d.contains("positions")) {
      for (const auto& p : d["positions"])
        sc.positions.push_back(position_from_string(p.get<std::string>()));
      if (sc.positions.empty()) throw ConfigError("detector.positions must not be empty");
    } else {
      sc.positions = {PositionLabel::kP1, PositionLabel::kP2, PositionLabel::kP3};
    }
  }

  if (!config.contains("sample")) throw ConfigError("missing field \"sample\" in config");
  {
    auto grid = make_sample_from_config(config["sample"]);
    sc.far_field_override = config["sample"].value("far_field_override", false);
    double lim = sc.far_field_ratio * std::min(sc.geom.d1, sc.geom.d2);
    if (grid.extent() > lim) {
      std::ostringstream msg;
      msg << "sample extent " << grid.extent() << " exceeds far-field limit "
          << sc.far_field_ratio << "*min(d1,d2) = " << lim;
      if (!sc.far_field_override) throw ConfigError(msg.str());
      fprintf(stderr, "warning: %s (override enabled)\n", msg.str().c_str());
    }
    if (sc.geom.dim == 1 && grid.nz != 1)
      throw ConfigError("1D-transverse mode requires sample nz == 1");
    sc.sample = std::make_shared<const SampleGrid>(std::move(grid));
  }

  return sc;
}

Scene load_scene(const std::string& config_path) { return build_scene(read_json(config_path)); }

nlohmann::json Scene::to_json() const {
  json j;
  j["mode"] = mode == UnitMode::kPhysical ? "physical" : "normalized";
  j["constants"] = {{"m_n", constants.m_n},
                    {"hbar", constants.hbar},
                    {"r_e", constants.r_e},
                    {"gamma", constants.gamma},
                    {"mu_B", constants.mu_B}};
  j["geometry"] = {{"lambda", geom.lambda}, {"d1", geom.d1},   {"d2", geom.d2},
                   {"theta", geom.theta},   {"I0", geom.I0},   {"transverse_dim", geom.dim}};
  j["source"] = {{"extent", source.extent},
                 {"n_points", source.n_points},
                 {"center", {source.center.x, source.center.z}}};
  json pos = json::array();
  for (auto p : positions) pos.push_back(to_string(p));
  j["detector"] = {{"extent", detector.extent},
                   {"n_pixels", detector.n_pixels},
                   {"grid", detector.style == GridStyle::kDft ? "dft" : "centered"},
                   {"positions", pos}};
  j["sample"] = {{"pitch", sample ? sample->pitch : 0.0},
                 {"dims", sample ? json::array({sample->nx, sample->ny, sample->nz})
                                 : json::array()},
                 {"far_field_override", far_field_override}};
  return j;
}

double chi(const Scene& scene) {
  const auto& c = scene.constants;
  const auto& g = scene.geom;
  double num = 4.0 * kPi * kPi * c.hbar * c.hbar * g.I0 * g.I0;
  double den = std::pow(g.lambda, 4) * std::pow(g.d2, 4) * c.m_n * c.m_n;
  return num / den;
}

Vec3 detector_position(PositionLabel label, double theta, double d2, double d1) {
  if (!(theta > 0 && theta < kPi / 2))
    throw GeometryError("theta must be in (0, π/2)");
  double xi = d2 * std::sin(theta);
  double y = d1 + d2;
  switch (label) {
    case PositionLabel::kP1: return {xi, y, 0.0};
    case PositionLabel::kP2: return {-xi, y, 0.0};
    case PositionLabel::kP3: return {0.0, y, xi};
  }
  throw GeometryError("unknown detector position label");
}

bool SamplingReport::all_pass() const {
  for (const auto& c : conditions)
    if (!c.pass) return false;
  return true;
}

nlohmann::json SamplingReport::to_json() const {
  json rows = json::array();
  for (const auto& c : conditions)
    rows.push_back({{"name", c.name}, {"pitch", c.pitch}, {"bound", c.bound}, {"pass", c.pass}});
  return json{{"conditions", rows}, {"all_pass", all_pass()}};
}

std::string SamplingReport::table() const {
  std::ostringstream out;
  out << "condition                         pitch        bound        status\n";
  for (const auto& c : conditions) {
    char line[160];
    std::snprintf(line, sizeof line, "%-32s %-12.6g %-12.6g %s\n", c.name.c_str(), c.pitch,
                  c.bound, c.pass ? "pass" : "FAIL");
    out << line;
  }
  return out.str();
}

SamplingReport validate_sampling(const Scene& scene) {
  SamplingReport rep;
  const auto& g = scene.geom;
  const auto& src = scene.source;
  const auto& det = scene.detector;
  const SampleGrid& grid = *scene.sample;

  double src_half = src.extent / 2.0;
  double samp_half_x = static_cast<double>(grid.nx) * grid.pitch / 2.0;
  double samp_half_z = static_cast<double>(grid.nz) * grid.pitch / 2.0;

  double scan_min = det.coord(0);
  double scan_max = det.coord(det.n_pixels - 1);

  for (PositionLabel label : scene.positions) {
    Vec3 pos = detector_position(label, g.theta, g.d2, g.d1);
    // Reference-arm chirp at d_r: max |xi_r - eta| over the scan and aperture.
    double max_sep = 0.0;
    for (double dxi : {scan_min, scan_max}) {
      Vec2 xi{pos.x + (g.dim >= 1 ? dxi : 0.0), pos.z};
      Vec2 xi2{pos.x, pos.z + (g.dim == 2 ? dxi : 0.0)};
      for (const Vec2& p : {xi, xi2}) {
        double sx = std::abs(p.x - src.center.x) + src_half;
        double sz = g.dim == 2 ? std::abs(p.z - src.center.z) + src_half : std::abs(p.z - src.center.z);
        max_sep = std::max(max_sep, std::hypot(sx, sz));
      }
    }
    double bound_ref = g.lambda * g.d_r / (2.0 * max_sep);
    rep.conditions.push_back({"source_chirp_" + to_string(label), src.pitch(), bound_ref,
                              src.pitch() <= bound_ref});

    // Target-arm chirp at d2: voxel pitch against max |xi_t - zeta|.
    double tx = std::abs(pos.x) + samp_half_x;
    double tz = std::abs(pos.z) + (g.dim == 2 ? samp_half_z : 0.0);
    double max_t = std::hypot(tx, tz);
    double bound_t = g.lambda * g.d2 / (2.0 * max_t);
    rep.conditions.push_back(
        {"sample_chirp_" + to_string(label), grid.pitch, bound_t, grid.pitch <= bound_t});
  }
  return rep;
}

}  // namespace ngi
