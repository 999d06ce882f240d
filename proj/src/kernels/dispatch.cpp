#include <cstdlib>
#include <cstring>

#include "darwinics/kernels/kernels.hpp"

namespace darwinics::kernels {

std::string to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(DARWINICS_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() {
  static const Isa isa = [] {
    const char* env = std::getenv("DARWINICS_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    return avx2_available() ? Isa::Avx2 : Isa::Scalar;
  }();
  return isa;
}

#if !defined(DARWINICS_BUILD_AVX2)
ExBSum accumulate_exb_avx2(const FieldSources& src, const double* x, const double* y, const double* z,
                           const double* w, std::size_t n) {
  return accumulate_exb_scalar(src, x, y, z, w, n);
}
Vec3 dipole_column_potential_avx2(double ax, double ay, const double* z_k, const double* m_k, std::size_t n,
                                  const Vec3& r) {
  return dipole_column_potential_scalar(ax, ay, z_k, m_k, n, r);
}
#endif

ExBSum accumulate_exb(const FieldSources& src, const double* x, const double* y, const double* z, const double* w,
                      std::size_t n) {
  if (active_isa() == Isa::Avx2) return accumulate_exb_avx2(src, x, y, z, w, n);
  return accumulate_exb_scalar(src, x, y, z, w, n);
}

Vec3 dipole_column_potential(double ax, double ay, const double* z_k, const double* m_k, std::size_t n,
                             const Vec3& r) {
  if (active_isa() == Isa::Avx2) return dipole_column_potential_avx2(ax, ay, z_k, m_k, n, r);
  return dipole_column_potential_scalar(ax, ay, z_k, m_k, n, r);
}

}  // namespace darwinics::kernels
