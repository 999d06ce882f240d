#pragma once

// Adaptive Gauss-Kronrod quadrature (Boost.Math) for scalar and Vec3
// integrands, with a tan substitution for infinite ranges.

#include <functional>

#include "darwinics/vec3.hpp"

namespace darwinics::quad {

struct QuadConfig {
  double rel_tol{1e-12};
  unsigned max_depth{18};
  /// Throw NonConvergenceError when the reported error exceeds this multiple of rel_tol * |result|
  /// (plus abs_floor). Zero disables the check.
  double accept_factor{1e4};
  double abs_floor{0.0};
};

template <class T>
struct Estimate {
  T value{};
  double error{0.0};
};

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<Vec3(double)>;

/// Integral over [a, b]; either end may be infinite. Infinite ends use
/// t = center + scale * tan(theta), which maps algebraic tails onto a finite interval.
Estimate<double> integrate(const ScalarFn& f, double a, double b, const QuadConfig& cfg = {}, double center = 0.0,
                           double scale = 1.0);

Estimate<Vec3> integrate(const VectorFn& f, double a, double b, const QuadConfig& cfg = {}, double center = 0.0,
                         double scale = 1.0);

/// Composite 20-point Gauss-Legendre on [a, b] with `panels` equal panels.
Vec3 gauss_legendre(const VectorFn& f, double a, double b, int panels);

}  // namespace darwinics::quad
