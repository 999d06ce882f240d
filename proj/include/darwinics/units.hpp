#pragma once

// Compile-time dimensional analysis for SI quantities. Exponents of
// (m, kg, s, A, K) are template parameters, so adding a length to a time or
// assigning an energy to a force does not compile.

#include <cmath>
#include <string>

namespace darwinics::si {

template <int L, int M, int T, int I, int K>
struct Dim {
  static constexpr int length = L, mass = M, time = T, current = I, temperature = K;
};

template <class D1, class D2>
using DimMul = Dim<D1::length + D2::length, D1::mass + D2::mass, D1::time + D2::time, D1::current + D2::current,
                   D1::temperature + D2::temperature>;

template <class D1, class D2>
using DimDiv = Dim<D1::length - D2::length, D1::mass - D2::mass, D1::time - D2::time, D1::current - D2::current,
                   D1::temperature - D2::temperature>;

template <class D>
struct Quantity {
  double value{0.0};

  constexpr Quantity() = default;
  constexpr explicit Quantity(double v) : value(v) {}

  constexpr Quantity& operator+=(Quantity o) {
    value += o.value;
    return *this;
  }
  constexpr Quantity& operator-=(Quantity o) {
    value -= o.value;
    return *this;
  }
  friend constexpr Quantity operator+(Quantity a, Quantity b) { return Quantity(a.value + b.value); }
  friend constexpr Quantity operator-(Quantity a, Quantity b) { return Quantity(a.value - b.value); }
  friend constexpr Quantity operator-(Quantity a) { return Quantity(-a.value); }
  friend constexpr Quantity operator*(double s, Quantity a) { return Quantity(s * a.value); }
  friend constexpr Quantity operator*(Quantity a, double s) { return Quantity(s * a.value); }
  friend constexpr Quantity operator/(Quantity a, double s) { return Quantity(a.value / s); }
  friend constexpr auto operator<=>(Quantity, Quantity) = default;
};

template <class D1, class D2>
constexpr Quantity<DimMul<D1, D2>> operator*(Quantity<D1> a, Quantity<D2> b) {
  return Quantity<DimMul<D1, D2>>(a.value * b.value);
}

template <class D1, class D2>
constexpr Quantity<DimDiv<D1, D2>> operator/(Quantity<D1> a, Quantity<D2> b) {
  return Quantity<DimDiv<D1, D2>>(a.value / b.value);
}

template <class D>
  requires(D::length % 2 == 0 && D::mass % 2 == 0 && D::time % 2 == 0 && D::current % 2 == 0 &&
           D::temperature % 2 == 0)
Quantity<Dim<D::length / 2, D::mass / 2, D::time / 2, D::current / 2, D::temperature / 2>> sqrt(Quantity<D> q) {
  return Quantity<Dim<D::length / 2, D::mass / 2, D::time / 2, D::current / 2, D::temperature / 2>>(
      std::sqrt(q.value));
}

using Dimensionless = Dim<0, 0, 0, 0, 0>;
using Length = Quantity<Dim<1, 0, 0, 0, 0>>;
using Area = Quantity<Dim<2, 0, 0, 0, 0>>;
using Volume = Quantity<Dim<3, 0, 0, 0, 0>>;
using Mass = Quantity<Dim<0, 1, 0, 0, 0>>;
using Time = Quantity<Dim<0, 0, 1, 0, 0>>;
using Current = Quantity<Dim<0, 0, 0, 1, 0>>;
using Temperature = Quantity<Dim<0, 0, 0, 0, 1>>;
using Velocity = Quantity<Dim<1, 0, -1, 0, 0>>;
using Acceleration = Quantity<Dim<1, 0, -2, 0, 0>>;
using Force = Quantity<Dim<1, 1, -2, 0, 0>>;
using Energy = Quantity<Dim<2, 1, -2, 0, 0>>;
using Charge = Quantity<Dim<0, 0, 1, 1, 0>>;
using NumberDensity = Quantity<Dim<-3, 0, 0, 0, 0>>;
using MagneticField = Quantity<Dim<0, 1, -2, -1, 0>>;        // tesla
using MagneticMoment = Quantity<Dim<2, 0, 0, 1, 0>>;         // A m^2 = J/T
using Permeability = Quantity<Dim<1, 1, -2, -2, 0>>;         // T m / A
using HeatCapacity = Quantity<Dim<2, 1, -2, 0, -1>>;         // J/K
using Scalar = Quantity<Dimensionless>;

template <class A, class B>
concept Addable = requires(A a, B b) { a + b; };

namespace constants {
inline constexpr Charge elementary_charge{1.602176634e-19};
inline constexpr Mass electron_mass{9.1093837015e-31};
inline constexpr HeatCapacity boltzmann{1.380649e-23};
inline constexpr Velocity speed_of_light{299792458.0};
inline constexpr Permeability mu0{1.25663706212e-6};
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

inline Energy electron_volts(double ev) { return Energy(ev * constants::elementary_charge.value); }
inline constexpr Length micrometres(double x) { return Length(x * 1e-6); }

}  // namespace darwinics::si
