#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ngi {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Sign of the object-to-frequency Fourier kernel exp(sign * i * q.zeta).
/// Every transform in the pipeline derives its direction from this constant.
inline constexpr int kFourierSign = +1;

struct Vec2 {
  double x = 0.0;
  double z = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.z + b.z}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.z - b.z}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.z}; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) {
  double n = norm(a);
  if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
  return (1.0 / n) * a;
}

/// Row-major 2D array, indices (i0, i1), i1 fastest.
template <typename T>
struct Array2 {
  std::size_t n0 = 0, n1 = 0;
  std::vector<T> data;

  Array2() = default;
  Array2(std::size_t a, std::size_t b, T fill = T{}) : n0(a), n1(b), data(a * b, fill) {}

  T& at(std::size_t i, std::size_t j) { return data[i * n1 + j]; }
  const T& at(std::size_t i, std::size_t j) const { return data[i * n1 + j]; }
  std::size_t size() const { return data.size(); }
  bool same_dims(const Array2& o) const { return n0 == o.n0 && n1 == o.n1; }
};

/// Row-major 3D array, indices (i0, i1, i2), i2 fastest.
template <typename T>
struct Array3 {
  std::size_t n0 = 0, n1 = 0, n2 = 0;
  std::vector<T> data;

  Array3() = default;
  Array3(std::size_t a, std::size_t b, std::size_t c, T fill = T{})
      : n0(a), n1(b), n2(c), data(a * b * c, fill) {}

  T& at(std::size_t i, std::size_t j, std::size_t k) { return data[(i * n1 + j) * n2 + k]; }
  const T& at(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * n1 + j) * n2 + k];
  }
  std::size_t size() const { return data.size(); }
  bool same_dims(const Array3& o) const { return n0 == o.n0 && n1 == o.n1 && n2 == o.n2; }
};

/// Coordinate of grid node i on a centered axis of n nodes.
inline double centered_coord(std::size_t i, std::size_t n, double pitch, double center = 0.0) {
  return center + (static_cast<double>(i) - (static_cast<double>(n) - 1.0) / 2.0) * pitch;
}

}  // namespace ngi
