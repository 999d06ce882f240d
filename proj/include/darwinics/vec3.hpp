#pragma once

#include <array>
#include <cmath>
#include <iosfwd>

namespace darwinics {

/// Cartesian 3-vector in the internal Gaussian unit system.
struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  constexpr Vec3& operator/=(double s) {
    x /= s;
    y /= s;
    z /= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return a /= s; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

  static constexpr Vec3 unit_x() { return {1.0, 0.0, 0.0}; }
  static constexpr Vec3 unit_y() { return {0.0, 1.0, 0.0}; }
  static constexpr Vec3 unit_z() { return {0.0, 0.0, 1.0}; }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

constexpr double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

/// In-plane (xy) part of a vector; line sources are parallel to z.
constexpr Vec3 transverse(const Vec3& a) { return {a.x, a.y, 0.0}; }

inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

inline double max_abs(const Vec3& a) {
  return std::fmax(std::fabs(a.x), std::fmax(std::fabs(a.y), std::fabs(a.z)));
}

/// Combined absolute/relative closeness used throughout the tests.
inline bool approx_equal(const Vec3& a, const Vec3& b, double abs_tol = 1e-12, double rel_tol = 1e-9) {
  const double scale = std::fmax(norm(a), norm(b));
  return norm(a - b) <= abs_tol + rel_tol * scale;
}

/// Row-major 3x3 matrix, used for field Jacobians (J[i][j] = dF_i/dx_j).
struct Mat3 {
  std::array<Vec3, 3> rows{};

  constexpr Vec3 operator*(const Vec3& v) const { return {dot(rows[0], v), dot(rows[1], v), dot(rows[2], v)}; }
  constexpr double operator()(int i, int j) const { return rows[i][j]; }
  constexpr double& operator()(int i, int j) { return rows[i][j]; }

  constexpr Mat3 transposed() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
  }
};

std::ostream& operator<<(std::ostream& os, const Vec3& v);

// Boost's Gauss-Kronrod integrator measures vector-valued results through ADL abs().
inline double abs(const Vec3& v) { return norm(v); }

}  // namespace darwinics
