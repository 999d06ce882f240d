#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2+FMA variant.
// The dispatcher picks the variant once per process; DARWINICS_SIMD=scalar
// forces the reference path.

#include <cstddef>
#include <string>
#include <vector>

#include "darwinics/vec3.hpp"

namespace darwinics::kernels {

enum class Isa { Scalar, Avx2 };

std::string to_string(Isa isa);

/// Variant the dispatcher uses (honours DARWINICS_SIMD).
Isa active_isa();

/// True when the AVX2 variant is compiled in and the CPU supports AVX2 and FMA.
bool avx2_available();

// --- E x B accumulation ----------------------------------------------------

struct ChargeSources {
  std::vector<double> q, x, y, z, vx, vy, vz;
  std::size_t size() const { return q.size(); }
  void push(double q_, const Vec3& r, const Vec3& v);
};

struct DipoleSources {
  std::vector<double> mx, my, mz, x, y, z;
  std::size_t size() const { return mx.size(); }
  void push(const Vec3& mu, const Vec3& r);
};

struct FieldSources {
  ChargeSources charges;
  DipoleSources dipoles;
  Vec3 uniform_e;
  Vec3 uniform_b;
  double c{1.0};
  /// Subtract E_i x B_i of each moving point charge (its divergent self term).
  bool drop_self_terms{true};
};

struct ExBSum {
  Vec3 sum;          // sum_k w_k (E x B)(r_k)
  double abs_sum{0}; // sum_k |w_k| |E x B|(r_k)
};

/// Weighted sum over points (x[k], y[k], z[k]) with weights w[k].
ExBSum accumulate_exb(const FieldSources& src, const double* x, const double* y, const double* z, const double* w,
                      std::size_t n);
ExBSum accumulate_exb_scalar(const FieldSources& src, const double* x, const double* y, const double* z,
                             const double* w, std::size_t n);
ExBSum accumulate_exb_avx2(const FieldSources& src, const double* x, const double* y, const double* z,
                           const double* w, std::size_t n);

// --- discretised solenoid ----------------------------------------------------

/// Sum over slices k of (m_k z_hat) x d_k / |d_k|^3 with d_k = r - (ax, ay, z_k):
/// the vector potential of a column of point dipoles along a z-parallel axis.
Vec3 dipole_column_potential(double ax, double ay, const double* z_k, const double* m_k, std::size_t n,
                             const Vec3& r);
Vec3 dipole_column_potential_scalar(double ax, double ay, const double* z_k, const double* m_k, std::size_t n,
                                    const Vec3& r);
Vec3 dipole_column_potential_avx2(double ax, double ay, const double* z_k, const double* m_k, std::size_t n,
                                  const Vec3& r);

}  // namespace darwinics::kernels
