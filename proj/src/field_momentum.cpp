#include "darwinics/field_momentum.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "darwinics/errors.hpp"

namespace darwinics::field {

Vec3 FieldConfiguration::electric_field(const Vec3& r) const {
  Vec3 e = uniform_e;
  for (const auto& c : charges) e += coulomb_field(c.q, c.r, r, 0.0);
  return e;
}

Vec3 FieldConfiguration::magnetic_field(const Vec3& r, const Units& u) const {
  Vec3 b = uniform_b;
  for (const auto& c : charges) b += charge_magnetic_field(c.q, c.v, c.r, r, u, 0.0);
  for (const auto& d : dipoles) b += dipole_magnetic_field(d.mu, d.r, r, 0.0);
  return b;
}

double FieldConfiguration::potential(const Vec3& r) const {
  double phi = -dot(uniform_e, r);
  for (const auto& c : charges) phi += coulomb_potential(c.q, c.r, r, 0.0);
  return phi;
}

std::vector<Vec3> FieldConfiguration::singular_points() const {
  std::vector<Vec3> pts;
  for (const auto& c : charges) pts.push_back(c.r);
  for (const auto& d : dipoles) pts.push_back(d.r);
  return pts;
}

void validate(const FieldConfiguration& cfg) {
  const auto pts = cfg.singular_points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (norm(pts[i] - pts[j]) <= 0.0) throw ValidationError("field configuration: two sources share a position");
  if (norm(cross(cfg.uniform_e, cfg.uniform_b)) > 0.0)
    throw ValidationError("field configuration: crossed uniform E and B carry infinite momentum");
  for (const auto& c : cfg.charges)
    if (!std::isfinite(c.q) || !is_finite(c.r) || !is_finite(c.v)) throw ValidationError("field configuration: non-finite charge");
  for (const auto& d : cfg.dipoles)
    if (!is_finite(d.mu) || !is_finite(d.r)) throw ValidationError("field configuration: non-finite dipole");
}

void validate(const IntegrationRegion& region) {
  if (region.n_radial < 8 || region.n_polar < 8 || region.n_azimuth < 8)
    throw ValidationError("integration region: need at least 8 cells per direction");
  if (region.ball_radial_panels < 1) throw ValidationError("integration region: ball_radial_panels must be >= 1");
  if (region.scale < 0.0 || region.ball_radius < 0.0 || !(region.rel_tol > 0.0))
    throw ValidationError("integration region: scale, ball radius and tolerance must be non-negative / positive");
}

void gauss_legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    const auto zeros = boost::math::legendre_p_zeros<double>(n);  // non-negative half
    std::vector<double> x, w;
    for (double z : zeros) {
      const double dp = boost::math::legendre_p_prime(n, z);
      const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
      x.push_back(z);
      w.push_back(wt);
      if (z != 0.0) {
        x.push_back(-z);
        w.push_back(wt);
      }
    }
    it = cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first;
  }
  nodes = it->second.first;
  weights = it->second.second;
}

namespace {

// Smooth bump: 1 for t <= 1/2, 0 for t >= 1, C-infinity in between.
double bump(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double s = 2.0 * (t - 0.5);
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return b / (a + b);
}

kernels::FieldSources to_sources(const FieldConfiguration& cfg, const Units& u) {
  kernels::FieldSources src;
  for (const auto& c : cfg.charges) src.charges.push(c.q, c.r, c.v);
  for (const auto& d : cfg.dipoles) src.dipoles.push(d.mu, d.r);
  src.uniform_e = cfg.uniform_e;
  src.uniform_b = cfg.uniform_b;
  src.c = u.c;
  src.drop_self_terms = cfg.drop_self_terms;
  return src;
}

struct Layout {
  std::vector<Vec3> balls;
  double ball_radius{0.0};
  double scale{1.0};
};

Layout make_layout(const FieldConfiguration& cfg, const IntegrationRegion& region) {
  Layout lay;
  lay.balls = cfg.singular_points();
  double min_sep = std::numeric_limits<double>::infinity();
  double max_dist = 0.0;
  for (std::size_t i = 0; i < lay.balls.size(); ++i) {
    max_dist = std::max(max_dist, norm(lay.balls[i] - region.center));
    for (std::size_t j = i + 1; j < lay.balls.size(); ++j) min_sep = std::min(min_sep, norm(lay.balls[i] - lay.balls[j]));
  }
  lay.scale = region.scale > 0.0 ? region.scale : (max_dist > 0.0 ? max_dist : 1.0);
  if (region.ball_radius > 0.0) {
    lay.ball_radius = region.ball_radius;
  } else {
    lay.ball_radius = std::isfinite(min_sep) ? 0.25 * min_sep : 0.25 * lay.scale;
  }
  if (std::isfinite(min_sep) && !(lay.ball_radius < 0.5 * min_sep))
    throw ValidationError("integration region: source balls overlap; reduce ball_radius");
  return lay;
}

struct Points {
  std::vector<double> x, y, z, w;
  void add(const Vec3& p, double wt) {
    x.push_back(p.x);
    y.push_back(p.y);
    z.push_back(p.z);
    w.push_back(wt);
  }
};

struct Pass {
  Vec3 far;
  Vec3 ball;
  double l1{0.0};
};

Pass integrate_pass(const kernels::FieldSources& src, const Layout& lay, const Vec3& center, int nr, int nt, int np,
                    int ball_panels, double inv_4pi_c) {
  std::vector<double> ct, wt;
  gauss_legendre_rule(nt, ct, wt);
  const double dphi = 2.0 * kPi / np;
  std::vector<double> cphi(np), sphi(np);
  for (int k = 0; k < np; ++k) {
    cphi[k] = std::cos((k + 0.5) * dphi);
    sphi[k] = std::sin((k + 0.5) * dphi);
  }

  Pass out;
  const double a = lay.ball_radius;

  // Far part on the mapped global grid; chunked so memory stays bounded.
  Points pts;
  const double du = 1.0 / nr;
  for (int i = 0; i < nr; ++i) {
    const double s = (i + 0.5) * du;
    const double r = lay.scale * s / (1.0 - s);
    const double jac = lay.scale / ((1.0 - s) * (1.0 - s));
    const double radial_w = r * r * jac * du;
    pts = Points{};
    for (std::size_t j = 0; j < ct.size(); ++j) {
      const double st = std::sqrt(std::fmax(0.0, 1.0 - ct[j] * ct[j]));
      for (int k = 0; k < np; ++k) {
        const Vec3 p = center + Vec3{st * cphi[k], st * sphi[k], ct[j]} * r;
        double chi = 0.0;
        for (const auto& b : lay.balls) chi += bump(norm(p - b) / a);
        const double weight = radial_w * wt[j] * dphi * (1.0 - chi);
        if (weight != 0.0) pts.add(p, weight);
      }
    }
    const auto acc = kernels::accumulate_exb(src, pts.x.data(), pts.y.data(), pts.z.data(), pts.w.data(), pts.x.size());
    out.far += acc.sum;
    out.l1 += acc.abs_sum;
  }

  // Ball interiors on local spherical grids (radial Gauss-Legendre panels).
  std::vector<double> rx, rw;
  gauss_legendre_rule(16, rx, rw);
  for (const auto& b : lay.balls) {
    pts = Points{};
    const double h = a / ball_panels;
    for (int pnl = 0; pnl < ball_panels; ++pnl) {
      for (std::size_t q = 0; q < rx.size(); ++q) {
        const double r = h * (pnl + 0.5 + 0.5 * rx[q]);
        const double radial_w = r * r * 0.5 * h * rw[q] * bump(r / a);
        if (radial_w == 0.0) continue;
        for (std::size_t j = 0; j < ct.size(); ++j) {
          const double st = std::sqrt(std::fmax(0.0, 1.0 - ct[j] * ct[j]));
          for (int k = 0; k < np; ++k) {
            pts.add(b + Vec3{st * cphi[k], st * sphi[k], ct[j]} * r, radial_w * wt[j] * dphi);
          }
        }
      }
    }
    const auto acc = kernels::accumulate_exb(src, pts.x.data(), pts.y.data(), pts.z.data(), pts.w.data(), pts.x.size());
    out.ball += acc.sum;
    out.l1 += acc.abs_sum;
  }

  out.far *= inv_4pi_c;
  out.ball *= inv_4pi_c;
  out.l1 *= inv_4pi_c;
  return out;
}

Vec3 exb_at(const FieldConfiguration& cfg, const Vec3& r, const Units& u) {
  Vec3 exb = cross(cfg.electric_field(r), cfg.magnetic_field(r, u));
  if (cfg.drop_self_terms) {
    for (const auto& c : cfg.charges) {
      exb -= cross(coulomb_field(c.q, c.r, r, 0.0), charge_magnetic_field(c.q, c.v, c.r, r, u, 0.0));
    }
  }
  return exb;
}

}  // namespace

FieldMomentumResult em_field_momentum(const FieldConfiguration& cfg, const IntegrationRegion& region,
                                      const Units& u) {
  validate(cfg);
  validate(region);
  const Layout lay = make_layout(cfg, region);
  const auto src = to_sources(cfg, u);
  const double inv_4pi_c = 1.0 / (4.0 * kPi * u.c);

  FieldMomentumResult res;
  for (const auto& d : cfg.dipoles) {
    Vec3 e = cfg.uniform_e;
    for (const auto& c : cfg.charges) e += coulomb_field(c.q, c.r, d.r, 0.0);
    res.contact_part += cross(e, d.mu) * (2.0 / (3.0 * u.c));
  }

  const Pass fine = integrate_pass(src, lay, region.center, region.n_radial, region.n_polar, region.n_azimuth,
                                   region.ball_radial_panels, inv_4pi_c);
  const Pass coarse = integrate_pass(src, lay, region.center, region.n_radial / 2, region.n_polar / 2,
                                     region.n_azimuth / 2, std::max(1, region.ball_radial_panels / 2), inv_4pi_c);
  res.far_part = fine.far;
  res.ball_part = fine.ball;
  res.value = fine.far + fine.ball + res.contact_part;
  res.coarse_value = coarse.far + coarse.ball + res.contact_part;
  res.error = norm(res.value - res.coarse_value) / 3.0;  // O(h^2) midpoint rule

  const double floor = 1e-12 * (fine.l1 + norm(res.contact_part));
  res.converged = res.error <= region.rel_tol * norm(res.value) + floor;
  if (!res.converged) {
    std::ostringstream msg;
    msg << "em_field_momentum: two-resolution error " << res.error << " exceeds tolerance for |p| = "
        << norm(res.value);
    throw NonConvergenceError(msg.str());
  }
  return res;
}

std::pair<Vec3, Vec3> loop_frame(const Vec3& normal) {
  const Vec3 n = normal / norm(normal);
  const Vec3 trial = std::fabs(n.x) < 0.9 ? Vec3::unit_x() : Vec3::unit_y();
  Vec3 e1 = trial - n * dot(trial, n);
  e1 /= norm(e1);
  return {e1, cross(n, e1)};
}

LineIntegral hidden_momentum_line_current(const std::function<double(const Vec3&)>& phi, const CurrentLoop& loop,
                                          const Units& u, int n_points) {
  validate(loop);
  if (n_points < 8 || n_points % 2 != 0) throw ValidationError("hidden momentum: n_points must be even and >= 8");
  const auto [e1, e2] = loop_frame(loop.normal);
  auto trapezoid = [&](int n) {
    Vec3 s;
    const double dt = 2.0 * kPi / n;
    for (int k = 0; k < n; ++k) {
      const double t = k * dt;
      const Vec3 p = loop.center + (e1 * std::cos(t) + e2 * std::sin(t)) * loop.radius;
      const Vec3 dl = (e2 * std::cos(t) - e1 * std::sin(t)) * (loop.radius * dt);
      s += dl * phi(p);
    }
    return s * (-loop.current / (u.c * u.c));
  };
  const Vec3 fine = trapezoid(n_points);
  const Vec3 coarse = trapezoid(n_points / 2);
  return {fine, norm(fine - coarse)};
}

LemmaReport stationary_lemma_check(const FieldConfiguration& cfg, const std::vector<double>& radii,
                                   const IntegrationRegion& region, const Units& u, double loop_radius) {
  if (radii.size() < 3) throw ValidationError("stationary_lemma_check: need at least 3 radii for a decay fit");
  for (double r : radii)
    if (!(r > 0.0)) throw ValidationError("stationary_lemma_check: radii must be positive");

  LemmaReport rep;
  rep.radii = radii;
  std::vector<double> ct, wt;
  gauss_legendre_rule(region.n_polar, ct, wt);
  const int np = region.n_azimuth;
  const double dphi = 2.0 * kPi / np;
  for (double R : radii) {
    for (const auto& p : cfg.singular_points())
      if (std::fabs(norm(p - region.center) - R) < 1e-6 * R)
        throw ValidationError("stationary_lemma_check: a source lies on a surface");
    Vec3 s;
    for (std::size_t j = 0; j < ct.size(); ++j) {
      const double st = std::sqrt(std::fmax(0.0, 1.0 - ct[j] * ct[j]));
      for (int k = 0; k < np; ++k) {
        const double ph = (k + 0.5) * dphi;
        const Vec3 n{st * std::cos(ph), st * std::sin(ph), ct[j]};
        const Vec3 x = n * R;
        s += x * (dot(exb_at(cfg, region.center + x, u), n) * R * R * wt[j] * dphi);
      }
    }
    rep.surface_values.push_back(s / (4.0 * kPi * u.c));
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double m = norm(rep.surface_values[i]);
    if (m > 0.0) {
      lx.push_back(std::log(radii[i]));
      ly.push_back(std::log(m));
    }
  }
  rep.all_zero = lx.empty();
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    rep.decay_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }

  rep.p_em = em_field_momentum(cfg, region, u).value;
  auto phi = [&cfg](const Vec3& r) { return cfg.potential(r); };
  for (const auto& d : cfg.dipoles) {
    const double mu = norm(d.mu);
    if (mu == 0.0) continue;
    CurrentLoop loop{loop_radius, mu * u.c / (kPi * loop_radius * loop_radius), d.r, d.mu / mu};
    rep.p_hid += hidden_momentum_line_current(phi, loop, u).value;
  }
  const double denom = std::fmax(norm(rep.p_em), norm(rep.p_hid));
  rep.imbalance = denom > 0.0 ? norm(rep.p_em + rep.p_hid) / denom : 0.0;
  return rep;
}

}  // namespace darwinics::field
