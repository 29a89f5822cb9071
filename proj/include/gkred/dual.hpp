#ifndef GKRED_DUAL_HPP
#define GKRED_DUAL_HPP

#include <array>
#include <cmath>

#include "gkred/linalg.hpp"

// Forward-mode automatic differentiation. Dual<N, T> carries a value and N
// partial derivatives; nesting (Dual<M, Dual<N>>) yields second derivatives.
// Only the operations the field and map expressions actually use are defined.

namespace gkred {

template <int N, class T = double>
struct Dual {
  T v{};
  std::array<T, N> d{};

  Dual() = default;
  Dual(double x) : v(x) {}
  template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
  Dual(const T& x) : v(x) {}

  static Dual seeded(const T& x, int i) {
    Dual r(x);
    r.d[i] = T(1);
    return r;
  }

  Dual operator-() const {
    Dual r;
    r.v = -v;
    for (int i = 0; i < N; ++i) r.d[i] = -d[i];
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    v = v / o.v;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - v * o.d[i]) / o.v;
    return *this;
  }
};

template <int N, class T>
Dual<N, T> operator+(Dual<N, T> a, const Dual<N, T>& b) { return a += b; }
template <int N, class T>
Dual<N, T> operator-(Dual<N, T> a, const Dual<N, T>& b) { return a -= b; }
template <int N, class T>
Dual<N, T> operator*(Dual<N, T> a, const Dual<N, T>& b) { return a *= b; }
template <int N, class T>
Dual<N, T> operator/(Dual<N, T> a, const Dual<N, T>& b) { return a /= b; }

template <int N, class T>
Dual<N, T> operator+(double a, Dual<N, T> b) { return Dual<N, T>(a) += b; }
template <int N, class T>
Dual<N, T> operator+(Dual<N, T> a, double b) { return a += Dual<N, T>(b); }
template <int N, class T>
Dual<N, T> operator-(double a, const Dual<N, T>& b) { return Dual<N, T>(a) -= b; }
template <int N, class T>
Dual<N, T> operator-(Dual<N, T> a, double b) { return a -= Dual<N, T>(b); }
template <int N, class T>
Dual<N, T> operator*(double a, Dual<N, T> b) { return b *= Dual<N, T>(a); }
template <int N, class T>
Dual<N, T> operator*(Dual<N, T> a, double b) { return a *= Dual<N, T>(b); }
template <int N, class T>
Dual<N, T> operator/(double a, const Dual<N, T>& b) { return Dual<N, T>(a) /= b; }
template <int N, class T>
Dual<N, T> operator/(Dual<N, T> a, double b) { return a /= Dual<N, T>(b); }

template <int N, class T>
bool operator<(const Dual<N, T>& a, const Dual<N, T>& b) {
  return scalar_value(a) < scalar_value(b);
}
template <int N, class T>
bool operator>(const Dual<N, T>& a, const Dual<N, T>& b) {
  return scalar_value(a) > scalar_value(b);
}

template <int N, class T>
double scalar_value(const Dual<N, T>& x) { return scalar_value(x.v); }

// Chain rule helper: given f(v) and f'(v), lift to the dual.
template <int N, class T>
Dual<N, T> lift(const Dual<N, T>& x, const T& f, const T& fp) {
  Dual<N, T> r;
  r.v = f;
  for (int i = 0; i < N; ++i) r.d[i] = fp * x.d[i];
  return r;
}

template <int N, class T>
Dual<N, T> sqrt(const Dual<N, T>& x) {
  using std::sqrt;
  T s = sqrt(x.v);
  return lift(x, s, T(0.5) / s);
}
template <int N, class T>
Dual<N, T> sin(const Dual<N, T>& x) {
  using std::cos;
  using std::sin;
  return lift(x, sin(x.v), cos(x.v));
}
template <int N, class T>
Dual<N, T> cos(const Dual<N, T>& x) {
  using std::cos;
  using std::sin;
  return lift(x, cos(x.v), -sin(x.v));
}
template <int N, class T>
Dual<N, T> exp(const Dual<N, T>& x) {
  using std::exp;
  T e = exp(x.v);
  return lift(x, e, e);
}
template <int N, class T>
Dual<N, T> log(const Dual<N, T>& x) {
  using std::log;
  return lift(x, log(x.v), T(1) / x.v);
}

template <int N, class T>
Dual<N, T> atan2(const Dual<N, T>& y, const Dual<N, T>& x) {
  using std::atan2;
  Dual<N, T> r;
  r.v = atan2(y.v, x.v);
  T den = x.v * x.v + y.v * y.v;
  for (int i = 0; i < N; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) / den;
  return r;
}

using Dual6 = Dual<6>;

// Gradient of a scalar-valued callable f(V6<T>) at a point, and Jacobian of a
// V6-valued callable, both by seeding the six coordinate directions.
template <class F>
V6d gradient6(F&& f, const V6d& r) {
  V6<Dual6> x;
  for (int i = 0; i < 6; ++i) x[i] = Dual6::seeded(r[i], i);
  Dual6 y = f(x);
  V6d g;
  for (int i = 0; i < 6; ++i) g[i] = y.d[i];
  return g;
}

template <class F>
M6d jacobian6(F&& f, const V6d& r) {
  V6<Dual6> x;
  for (int i = 0; i < 6; ++i) x[i] = Dual6::seeded(r[i], i);
  V6<Dual6> y = f(x);
  M6d j;
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) j(i, k) = y[i].d[k];
  return j;
}

// Jacobian at a point whose components are themselves scalars of type T
// (nested forward mode).
template <class T, class F>
M6<T> jacobian6_t(F&& f, const V6<T>& r) {
  using D = Dual<6, T>;
  V6<D> x;
  for (int i = 0; i < 6; ++i) {
    x[i] = D(r[i]);
    x[i].d[i] = T(1);
  }
  V6<D> y = f(x);
  M6<T> j;
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) j(i, k) = y[i].d[k];
  return j;
}

template <class T, class F>
V6<T> gradient6_t(F&& f, const V6<T>& r) {
  using D = Dual<6, T>;
  V6<D> x;
  for (int i = 0; i < 6; ++i) {
    x[i] = D(r[i]);
    x[i].d[i] = T(1);
  }
  D y = f(x);
  V6<T> g;
  for (int i = 0; i < 6; ++i) g[i] = y.d[i];
  return g;
}

template <class F>
M3d jacobian3(F&& f, const V3d& r) {
  using D3 = Dual<3>;
  V3<D3> x;
  for (int i = 0; i < 3; ++i) x[i] = D3::seeded(r[i], i);
  V3<D3> y = f(x);
  M3d j;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) j(i, k) = y[i].d[k];
  return j;
}

}  // namespace gkred

#endif
