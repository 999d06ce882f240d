#include <cmath>

#include "darwinics/kernels/kernels.hpp"

namespace darwinics::kernels {

void ChargeSources::push(double q_, const Vec3& r, const Vec3& v) {
  q.push_back(q_);
  x.push_back(r.x);
  y.push_back(r.y);
  z.push_back(r.z);
  vx.push_back(v.x);
  vy.push_back(v.y);
  vz.push_back(v.z);
}

void DipoleSources::push(const Vec3& mu, const Vec3& r) {
  mx.push_back(mu.x);
  my.push_back(mu.y);
  mz.push_back(mu.z);
  x.push_back(r.x);
  y.push_back(r.y);
  z.push_back(r.z);
}

ExBSum accumulate_exb_scalar(const FieldSources& src, const double* x, const double* y, const double* z,
                             const double* w, std::size_t n) {
  ExBSum out;
  const auto& ch = src.charges;
  const auto& dp = src.dipoles;
  const double inv_c = 1.0 / src.c;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 r{x[k], y[k], z[k]};
    Vec3 e = src.uniform_e;
    Vec3 b = src.uniform_b;
    Vec3 self;
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const Vec3 d = r - Vec3{ch.x[i], ch.y[i], ch.z[i]};
      const double r2 = norm2(d);
      const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
      const Vec3 ei = d * (ch.q[i] * inv_r3);
      const Vec3 bi = cross(Vec3{ch.vx[i], ch.vy[i], ch.vz[i]}, d) * (ch.q[i] * inv_c * inv_r3);
      e += ei;
      b += bi;
      if (src.drop_self_terms) self += cross(ei, bi);
    }
    for (std::size_t j = 0; j < dp.size(); ++j) {
      const Vec3 d = r - Vec3{dp.x[j], dp.y[j], dp.z[j]};
      const Vec3 mu{dp.mx[j], dp.my[j], dp.mz[j]};
      const double r2 = norm2(d);
      const double inv_r2 = 1.0 / r2;
      const double inv_r3 = inv_r2 / std::sqrt(r2);
      b += (d * (3.0 * dot(mu, d) * inv_r2) - mu) * inv_r3;
    }
    const Vec3 exb = cross(e, b) - self;
    out.sum += exb * w[k];
    out.abs_sum += std::fabs(w[k]) * norm(exb);
  }
  return out;
}

Vec3 dipole_column_potential_scalar(double ax, double ay, const double* z_k, const double* m_k, std::size_t n,
                                    const Vec3& r) {
  // (m z_hat) x d = m (-d_y, d_x, 0)
  const double dx = r.x - ax;
  const double dy = r.y - ay;
  const double rho2 = dx * dx + dy * dy;
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dz = r.z - z_k[k];
    const double r2 = rho2 + dz * dz;
    s += m_k[k] / (r2 * std::sqrt(r2));
  }
  return {-dy * s, dx * s, 0.0};
}

}  // namespace darwinics::kernels
