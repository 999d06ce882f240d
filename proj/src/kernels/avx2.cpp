// Built with -mavx2 -mfma; only reached after the dispatcher has checked the CPU.

#include <immintrin.h>

#include <cmath>

#include "darwinics/kernels/kernels.hpp"

namespace darwinics::kernels {

namespace {

struct V3 {
  __m256d x, y, z;
};

inline V3 vcross(const V3& a, const V3& b) {
  return {_mm256_fmsub_pd(a.y, b.z, _mm256_mul_pd(a.z, b.y)), _mm256_fmsub_pd(a.z, b.x, _mm256_mul_pd(a.x, b.z)),
          _mm256_fmsub_pd(a.x, b.y, _mm256_mul_pd(a.y, b.x))};
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

ExBSum accumulate_exb_avx2(const FieldSources& src, const double* x, const double* y, const double* z,
                           const double* w, std::size_t n) {
  const auto& ch = src.charges;
  const auto& dp = src.dipoles;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d three = _mm256_set1_pd(3.0);
  const double inv_c = 1.0 / src.c;

  __m256d sx = _mm256_setzero_pd(), sy = _mm256_setzero_pd(), sz = _mm256_setzero_pd();
  __m256d sabs = _mm256_setzero_pd();
  const __m256d sign_mask = _mm256_set1_pd(-0.0);

  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const V3 r{_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k), _mm256_loadu_pd(z + k)};
    V3 e{_mm256_set1_pd(src.uniform_e.x), _mm256_set1_pd(src.uniform_e.y), _mm256_set1_pd(src.uniform_e.z)};
    V3 b{_mm256_set1_pd(src.uniform_b.x), _mm256_set1_pd(src.uniform_b.y), _mm256_set1_pd(src.uniform_b.z)};
    V3 self{_mm256_setzero_pd(), _mm256_setzero_pd(), _mm256_setzero_pd()};

    for (std::size_t i = 0; i < ch.size(); ++i) {
      const V3 d{_mm256_sub_pd(r.x, _mm256_set1_pd(ch.x[i])), _mm256_sub_pd(r.y, _mm256_set1_pd(ch.y[i])),
                 _mm256_sub_pd(r.z, _mm256_set1_pd(ch.z[i]))};
      const __m256d r2 = _mm256_fmadd_pd(d.x, d.x, _mm256_fmadd_pd(d.y, d.y, _mm256_mul_pd(d.z, d.z)));
      const __m256d inv_r3 = _mm256_div_pd(one, _mm256_mul_pd(r2, _mm256_sqrt_pd(r2)));
      const __m256d qe = _mm256_mul_pd(_mm256_set1_pd(ch.q[i]), inv_r3);
      const V3 ei{_mm256_mul_pd(d.x, qe), _mm256_mul_pd(d.y, qe), _mm256_mul_pd(d.z, qe)};
      const V3 vi{_mm256_set1_pd(ch.vx[i]), _mm256_set1_pd(ch.vy[i]), _mm256_set1_pd(ch.vz[i])};
      const __m256d qb = _mm256_mul_pd(_mm256_set1_pd(ch.q[i] * inv_c), inv_r3);
      const V3 vxd = vcross(vi, d);
      const V3 bi{_mm256_mul_pd(vxd.x, qb), _mm256_mul_pd(vxd.y, qb), _mm256_mul_pd(vxd.z, qb)};
      e = {_mm256_add_pd(e.x, ei.x), _mm256_add_pd(e.y, ei.y), _mm256_add_pd(e.z, ei.z)};
      b = {_mm256_add_pd(b.x, bi.x), _mm256_add_pd(b.y, bi.y), _mm256_add_pd(b.z, bi.z)};
      if (src.drop_self_terms) {
        const V3 s = vcross(ei, bi);
        self = {_mm256_add_pd(self.x, s.x), _mm256_add_pd(self.y, s.y), _mm256_add_pd(self.z, s.z)};
      }
    }
    for (std::size_t j = 0; j < dp.size(); ++j) {
      const V3 d{_mm256_sub_pd(r.x, _mm256_set1_pd(dp.x[j])), _mm256_sub_pd(r.y, _mm256_set1_pd(dp.y[j])),
                 _mm256_sub_pd(r.z, _mm256_set1_pd(dp.z[j]))};
      const V3 mu{_mm256_set1_pd(dp.mx[j]), _mm256_set1_pd(dp.my[j]), _mm256_set1_pd(dp.mz[j])};
      const __m256d r2 = _mm256_fmadd_pd(d.x, d.x, _mm256_fmadd_pd(d.y, d.y, _mm256_mul_pd(d.z, d.z)));
      const __m256d inv_r2 = _mm256_div_pd(one, r2);
      const __m256d inv_r3 = _mm256_div_pd(inv_r2, _mm256_sqrt_pd(r2));
      const __m256d md = _mm256_fmadd_pd(mu.x, d.x, _mm256_fmadd_pd(mu.y, d.y, _mm256_mul_pd(mu.z, d.z)));
      const __m256d f = _mm256_mul_pd(_mm256_mul_pd(three, md), inv_r2);
      b.x = _mm256_fmadd_pd(_mm256_fmsub_pd(d.x, f, mu.x), inv_r3, b.x);
      b.y = _mm256_fmadd_pd(_mm256_fmsub_pd(d.y, f, mu.y), inv_r3, b.y);
      b.z = _mm256_fmadd_pd(_mm256_fmsub_pd(d.z, f, mu.z), inv_r3, b.z);
    }
    const V3 exb0 = vcross(e, b);
    const V3 exb{_mm256_sub_pd(exb0.x, self.x), _mm256_sub_pd(exb0.y, self.y), _mm256_sub_pd(exb0.z, self.z)};
    const __m256d wk = _mm256_loadu_pd(w + k);
    sx = _mm256_fmadd_pd(exb.x, wk, sx);
    sy = _mm256_fmadd_pd(exb.y, wk, sy);
    sz = _mm256_fmadd_pd(exb.z, wk, sz);
    const __m256d mag = _mm256_sqrt_pd(
        _mm256_fmadd_pd(exb.x, exb.x, _mm256_fmadd_pd(exb.y, exb.y, _mm256_mul_pd(exb.z, exb.z))));
    sabs = _mm256_fmadd_pd(_mm256_andnot_pd(sign_mask, wk), mag, sabs);
  }

  ExBSum out;
  out.sum = {hsum(sx), hsum(sy), hsum(sz)};
  out.abs_sum = hsum(sabs);
  if (k < n) {
    const ExBSum tail = accumulate_exb_scalar(src, x + k, y + k, z + k, w + k, n - k);
    out.sum += tail.sum;
    out.abs_sum += tail.abs_sum;
  }
  return out;
}

Vec3 dipole_column_potential_avx2(double ax, double ay, const double* z_k, const double* m_k, std::size_t n,
                                  const Vec3& r) {
  const double dx = r.x - ax;
  const double dy = r.y - ay;
  const __m256d rho2 = _mm256_set1_pd(dx * dx + dy * dy);
  const __m256d rz = _mm256_set1_pd(r.z);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d dz = _mm256_sub_pd(rz, _mm256_loadu_pd(z_k + k));
    const __m256d r2 = _mm256_fmadd_pd(dz, dz, rho2);
    const __m256d r3 = _mm256_mul_pd(r2, _mm256_sqrt_pd(r2));
    acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_loadu_pd(m_k + k), r3));
  }
  double s = hsum(acc);
  const double rho2s = dx * dx + dy * dy;
  for (; k < n; ++k) {
    const double dz = r.z - z_k[k];
    const double r2 = rho2s + dz * dz;
    s += m_k[k] / (r2 * std::sqrt(r2));
  }
  return {-dy * s, dx * s, 0.0};
}

}  // namespace darwinics::kernels
