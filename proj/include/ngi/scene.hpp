#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ngi/types.hpp"

#include "json.hpp"

namespace ngi {

enum class UnitMode { kPhysical, kNormalized };
enum class PositionLabel { kP1, kP2, kP3 };

std::string to_string(PositionLabel p);
PositionLabel position_from_string(const std::string& s);

struct PhysicalConstants {
  double m_n = 1.0;     // neutron mass
  double hbar = 1.0;    // reduced Planck constant
  double r_e = 1.0;     // classical electron radius
  double gamma = 1.913; // dimensionless neutron factor
  double mu_B = 1.0;    // Bohr magneton

  /// beta = gamma * r_e / (2 * mu_B), always recomputed.
  double beta() const { return gamma * r_e / (2.0 * mu_B); }
  void validate() const;
};

struct Geometry {
  double lambda = 1.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d_r = 0.0;  // constrained to d1 + d2
  double theta = 0.0;
  double I0 = 1.0;
  int dim = 1;  // transverse dimensionality, 1 or 2

  double k() const { return kTwoPi / lambda; }
  void validate() const;
};

struct SourceSpec {
  double extent = 0.0;  // aperture size per axis
  std::size_t n_points = 0;
  Vec2 center{0.0, 0.0};

  double pitch() const { return extent / static_cast<double>(n_points); }
  void validate() const;
};

enum class GridStyle { kCentered, kDft };

struct DetectorSpec {
  double extent = 0.0;  // reference scan range per axis (in delta-xi)
  std::size_t n_pixels = 0;
  GridStyle style = GridStyle::kCentered;

  double pitch() const { return extent / static_cast<double>(n_pixels); }
  /// Delta-xi coordinate of pixel i.
  double coord(std::size_t i) const {
    if (style == GridStyle::kDft)
      return (static_cast<double>(i) - static_cast<double>(n_pixels / 2)) * pitch();
    return centered_coord(i, n_pixels, pitch());
  }
  void validate() const;
};

/// Voxelized sample: scalar nuclear density A and magnetization vector M on a
/// regular lattice centered on the sample center r_c.
struct SampleGrid {
  std::size_t nx = 0, ny = 0, nz = 0;
  double pitch = 1.0;
  Array3<double> A;
  Array3<double> Mx, My, Mz;

  static SampleGrid zeros(std::size_t nx, std::size_t ny, std::size_t nz, double pitch);

  bool has_magnetization() const;
  /// Voxel position relative to r_c; x,z transverse, y along the beam.
  Vec3 voxel_pos(std::size_t i, std::size_t j, std::size_t k) const {
    return {centered_coord(i, nx, pitch), centered_coord(j, ny, pitch),
            centered_coord(k, nz, pitch)};
  }
  double extent() const {
    return static_cast<double>(std::max(nx, std::max(ny, nz))) * pitch;
  }
  void validate_finite() const;
};

struct Scene {
  UnitMode mode = UnitMode::kNormalized;
  PhysicalConstants constants;
  Geometry geom;
  SourceSpec source;
  DetectorSpec detector;
  std::shared_ptr<const SampleGrid> sample;
  std::vector<PositionLabel> positions;  // positions this scene targets
  double far_field_ratio = 0.01;
  bool far_field_override = false;

  double beta() const { return constants.beta(); }
  /// Neutron speed hbar*k/m_n, the elastic v_i = v_f.
  double speed() const { return constants.hbar * geom.k() / constants.m_n; }

  nlohmann::json to_json() const;
};

/// Parses and fully validates a scene configuration document. Derived
/// quantities (k, d_r, beta, pitches) are always recomputed, never read.
/// Unknown keys anywhere in the document are an error.
Scene build_scene(const nlohmann::json& config);
Scene load_scene(const std::string& config_path);

/// chi = 4 pi^2 hbar^2 I0^2 / (lambda^4 d2^4 m_n^2).
double chi(const Scene& scene);

/// Target-detector position for a label; transverse offset (x, z) at the
/// plane y = d1 + d2 measured from the source plane.
Vec3 detector_position(PositionLabel label, double theta, double d2, double d1);

struct SamplingCondition {
  std::string name;
  double pitch = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct SamplingReport {
  std::vector<SamplingCondition> conditions;
  bool all_pass() const;
  nlohmann::json to_json() const;
  std::string table() const;
};

/// Nyquist control of the Fresnel chirps: source pitch against the
/// reference-arm chirp at d_r, sample pitch against the target-arm chirp at
/// d2, evaluated per detector position over the configured scan.
SamplingReport validate_sampling(const Scene& scene);

/// Sample phantoms and file loading used by the config "sample" section.
SampleGrid make_sample_from_config(const nlohmann::json& sample_cfg);

}  // namespace ngi
