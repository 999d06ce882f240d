#include "darwinics/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "darwinics/errors.hpp"

namespace darwinics::quad {

namespace {

// Boost's GK routines initialise accumulators from 0 and measure results with
// abs(); this thin wrapper supplies both for Vec3.
struct KVec : Vec3 {
  KVec() = default;
  KVec(int zero) : Vec3() { (void)zero; }
  KVec(const Vec3& v) : Vec3(v) {}
  KVec& operator+=(const KVec& o) {
    Vec3::operator+=(o);
    return *this;
  }
  KVec& operator-=(const KVec& o) {
    Vec3::operator-=(o);
    return *this;
  }
  friend KVec operator+(KVec a, const KVec& b) { return a += b; }
  friend KVec operator-(KVec a, const KVec& b) { return a -= b; }
  friend KVec operator-(const KVec& a) { return KVec(-static_cast<const Vec3&>(a)); }
  friend KVec operator*(KVec a, double s) { return KVec(static_cast<Vec3&>(a) * s); }
  friend KVec operator*(double s, KVec a) { return KVec(static_cast<Vec3&>(a) * s); }
  friend KVec operator/(KVec a, double s) { return KVec(static_cast<Vec3&>(a) / s); }
};

inline double abs(const KVec& v) { return norm(v); }

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class R, class F>
Estimate<R> run(const F& g, double lo, double hi, const QuadConfig& cfg) {
  double err = 0.0;
  double l1 = 0.0;
  auto value = GK::integrate(g, lo, hi, cfg.max_depth, cfg.rel_tol, &err, &l1);
  Estimate<R> out{R(value), err};
  if (cfg.accept_factor > 0.0) {
    const double allowed = cfg.accept_factor * cfg.rel_tol * std::fmax(l1, 0.0) + cfg.abs_floor;
    if (!(err <= allowed) && err > 0.0) {
      std::ostringstream msg;
      msg << "quadrature did not converge: error estimate " << err << " exceeds " << allowed;
      throw NonConvergenceError(msg.str());
    }
  }
  return out;
}

// Maps [a, b] (ends possibly infinite) onto theta in (-pi/2, pi/2) when needed.
struct Mapping {
  bool mapped{false};
  double lo{0.0};
  double hi{0.0};
  double center{0.0};
  double scale{1.0};

  double t(double theta) const { return center + scale * std::tan(theta); }
  double jacobian(double theta) const {
    const double c = std::cos(theta);
    return scale / (c * c);
  }
};

Mapping make_mapping(double a, double b, double center, double scale) {
  if (std::isnan(a) || std::isnan(b)) throw ValidationError("quadrature: NaN integration limit");
  if (!(scale > 0.0)) throw ValidationError("quadrature: scale must be positive");
  Mapping m;
  m.center = center;
  m.scale = scale;
  if (std::isfinite(a) && std::isfinite(b)) {
    m.lo = a;
    m.hi = b;
    return m;
  }
  const double half_pi = 0.5 * boost::math::constants::pi<double>();
  m.mapped = true;
  m.lo = std::isfinite(a) ? std::atan((a - center) / scale) : -half_pi;
  m.hi = std::isfinite(b) ? std::atan((b - center) / scale) : half_pi;
  return m;
}

}  // namespace

Estimate<double> integrate(const ScalarFn& f, double a, double b, const QuadConfig& cfg, double center, double scale) {
  const Mapping m = make_mapping(a, b, center, scale);
  if (!m.mapped) return run<double>(f, m.lo, m.hi, cfg);
  auto g = [&](double th) {
    if (std::fabs(std::cos(th)) < 1e-300) return 0.0;
    return f(m.t(th)) * m.jacobian(th);
  };
  return run<double>(g, m.lo, m.hi, cfg);
}

Estimate<Vec3> integrate(const VectorFn& f, double a, double b, const QuadConfig& cfg, double center, double scale) {
  const Mapping m = make_mapping(a, b, center, scale);
  if (!m.mapped) {
    auto g = [&](double t) { return KVec(f(t)); };
    return run<Vec3>(g, m.lo, m.hi, cfg);
  }
  auto g = [&](double th) {
    if (std::fabs(std::cos(th)) < 1e-300) return KVec();
    return KVec(f(m.t(th)) * m.jacobian(th));
  };
  return run<Vec3>(g, m.lo, m.hi, cfg);
}

Vec3 gauss_legendre(const VectorFn& f, double a, double b, int panels) {
  if (panels < 1) throw ValidationError("gauss_legendre: panels must be >= 1");
  const auto rule = boost::math::quadrature::gauss<double, 20>::abscissa();
  const auto weights = boost::math::quadrature::gauss<double, 20>::weights();
  const double h = (b - a) / panels;
  Vec3 sum;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    // Boost stores the non-negative half of the symmetric rule; x = 0 is absent for even N.
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double dx = half * rule[i];
      sum += (f(mid + dx) + f(mid - dx)) * (half * weights[i]);
    }
  }
  return sum;
}

}  // namespace darwinics::quad
