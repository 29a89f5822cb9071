#ifndef GKRED_FIELDS_HPP
#define GKRED_FIELDS_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>

#include "gkred/dual.hpp"
#include "gkred/linalg.hpp"

// Electromagnetic field model: potentials, derived fields and their
// derivative oracles. Registry scenarios carry analytic derivatives; custom
// fields fall back to forward-mode differentiation.

namespace gkred {

struct DomainExit : std::runtime_error {
  V3d where;
  double when;  // integration time if known, else 0
  DomainExit(const V3d& x, double t)
      : std::runtime_error("field evaluated outside configured domain"),
        where(x),
        when(t) {}
};

// The two small parameters and the exponent tying them: eta = epsilon^(1-kappa).
struct ScalingParams {
  double epsilon;
  double kappa;
  double eta;

  ScalingParams(double eps, double kap) : epsilon(eps), kappa(kap) {
    if (!(eps > 0.0 && eps < 1.0))
      throw std::invalid_argument("ScalingParams: epsilon must lie in (0,1)");
    if (!(kap > 0.0))
      throw std::invalid_argument("ScalingParams: kappa must be positive");
    eta = std::pow(eps, 1.0 - kap);
  }
};

struct Domain {
  V3d lo{-10.0, -10.0, -10.0};
  V3d hi{10.0, 10.0, 10.0};

  bool contains(const V3d& x) const {
    for (int i = 0; i < 3; ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
  void require(const V3d& x, double t = 0.0) const {
    if (!contains(x)) throw DomainExit(x, t);
  }
};

// ---------------------------------------------------------------------------
// Scalar potentials

struct ZeroPotential {
  template <class T>
  T phi(const V3<T>&) const { return T(0); }
  template <class T>
  V3<T> grad(const V3<T>&) const { return {}; }
};

struct LinearPotential {
  V3d g;  // phi = g . x
  template <class T>
  T phi(const V3<T>& x) const { return g[0] * x[0] + g[1] * x[1] + g[2] * x[2]; }
  template <class T>
  V3<T> grad(const V3<T>&) const { return {T(g[0]), T(g[1]), T(g[2])}; }
};

struct SinePotential {
  double amp = 0;
  V3d k{1, 0, 0};  // phi = amp * sin(k . x)
  template <class T>
  T phi(const V3<T>& x) const {
    using std::sin;
    return amp * sin(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
  }
  template <class T>
  V3<T> grad(const V3<T>& x) const {
    using std::cos;
    T c = amp * cos(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
    return {k[0] * c, k[1] * c, k[2] * c};
  }
};

struct CustomPotential {
  std::function<double(const V3d&)> f;
  template <class T>
  T phi(const V3<T>& x) const {
    if constexpr (std::is_same_v<T, double>) return f(x);
    else throw std::logic_error("custom potential: unsupported scalar type");
  }
  template <class T>
  V3<T> grad(const V3<T>& x) const {
    if constexpr (std::is_same_v<T, double>) {
      using D3 = Dual<3>;
      V3<D3> xd;
      for (int i = 0; i < 3; ++i) xd[i] = D3::seeded(x[i], i);
      D3 p = fd(xd);
      return {p.d[0], p.d[1], p.d[2]};
    } else {
      throw std::logic_error("custom potential: unsupported scalar type");
    }
  }
  std::function<Dual<3>(const V3<Dual<3>>&)> fd;
};

using Potential = std::variant<ZeroPotential, LinearPotential, SinePotential, CustomPotential>;

template <class T>
T potential_value(const Potential& p, const V3<T>& x) {
  return std::visit([&](const auto& q) { return q.template phi<T>(x); }, p);
}
template <class T>
V3<T> potential_grad(const Potential& p, const V3<T>& x) {
  return std::visit([&](const auto& q) { return q.template grad<T>(x); }, p);
}

// ---------------------------------------------------------------------------
// Vector potentials / magnetic fields
//
// Registry scenarios are constant-direction, B = (b(x), 0, 0):
//   uniform:  A = (0, -b0 x3/2, b0 x2/2)         -> b = b0
//   graded_b: A = (0, 0, b0 (x2 + a x2^2/2))     -> b = b0 (1 + a x2)
// Divergence-free by construction (b depends on x2 only).

struct UniformField {
  double b0 = 1.0;

  template <class T>
  V3<T> A(const V3<T>& x) const {
    return {T(0), -0.5 * b0 * x[2], 0.5 * b0 * x[1]};
  }
  template <class T>
  M3<T> gradA(const V3<T>&) const {  // (i,j) = dA_i/dx_j
    M3<T> j;
    j(1, 2) = T(-0.5 * b0);
    j(2, 1) = T(0.5 * b0);
    return j;
  }
  template <class T>
  V3<T> B(const V3<T>&) const { return {T(b0), T(0), T(0)}; }
  template <class T>
  T bmag(const V3<T>&) const { return T(b0); }
  template <class T>
  V3<T> grad_bmag(const V3<T>&) const { return {}; }
  template <class T>
  M3<T> hess_bmag(const V3<T>&) const { return {}; }
};

struct GradedBField {
  double b0 = 1.0;
  double alpha = 0.0;

  template <class T>
  V3<T> A(const V3<T>& x) const {
    return {T(0), T(0), b0 * (x[1] + 0.5 * alpha * x[1] * x[1])};
  }
  template <class T>
  M3<T> gradA(const V3<T>& x) const {
    M3<T> j;
    j(2, 1) = b0 * (1.0 + alpha * x[1]);
    return j;
  }
  template <class T>
  V3<T> B(const V3<T>& x) const {
    return {b0 * (1.0 + alpha * x[1]), T(0), T(0)};
  }
  template <class T>
  T bmag(const V3<T>& x) const { return b0 * (1.0 + alpha * x[1]); }
  template <class T>
  V3<T> grad_bmag(const V3<T>&) const { return {T(0), T(b0 * alpha), T(0)}; }
  template <class T>
  M3<T> hess_bmag(const V3<T>&) const { return {}; }
};

// User-supplied vector potential; the Jacobian (and hence B) comes from
// forward-mode differentiation of the supplied evaluator. Custom fields serve
// the fields-module contracts only -- the reduction pipeline stages require a
// registry scenario and reject custom models.
struct CustomField {
  std::function<V3d(const V3d&)> a;
  std::function<V3<Dual<3>>(const V3<Dual<3>>&)> ad;

  template <class F>
  static CustomField from(F f) {
    CustomField c;
    c.a = [f](const V3d& x) { return f(x); };
    c.ad = [f](const V3<Dual<3>>& x) { return f(x); };
    return c;
  }

  template <class T>
  V3<T> A(const V3<T>& x) const {
    if constexpr (std::is_same_v<T, double>) return a(x);
    else if constexpr (std::is_same_v<T, Dual<3>>) return ad(x);
    else throw std::logic_error("custom field: unsupported scalar type");
  }
  template <class T>
  M3<T> gradA(const V3<T>& x) const {
    if constexpr (std::is_same_v<T, double>) {
      return jacobian3([&](const auto& q) { return ad(q); }, x);
    } else {
      throw std::logic_error("custom field: unsupported scalar type");
    }
  }
  template <class T>
  V3<T> B(const V3<T>& x) const {  // curl of A from the Jacobian oracle
    M3<T> j = gradA(x);
    return {j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1)};
  }
  template <class T>
  T bmag(const V3<T>& x) const { return norm(B(x)); }
  template <class T>
  V3<T> grad_bmag(const V3<T>&) const {
    throw std::logic_error("custom field: no |B| gradient oracle");
  }
  template <class T>
  M3<T> hess_bmag(const V3<T>&) const {
    throw std::logic_error("custom field: no |B| Hessian oracle");
  }
};

using MagneticModel = std::variant<UniformField, GradedBField, CustomField>;

struct FieldModel {
  MagneticModel magnetic;
  Potential phi0;
  Potential phi1;
  Domain domain;
  std::string name = "custom";

  template <class T>
  V3<T> A(const V3<T>& x) const {
    return std::visit([&](const auto& f) { return f.template A<T>(x); }, magnetic);
  }
  template <class T>
  M3<T> gradA(const V3<T>& x) const {
    return std::visit([&](const auto& f) { return f.template gradA<T>(x); }, magnetic);
  }
  template <class T>
  V3<T> B(const V3<T>& x) const {
    return std::visit([&](const auto& f) { return f.template B<T>(x); }, magnetic);
  }
  template <class T>
  T bmag(const V3<T>& x) const {
    return std::visit([&](const auto& f) { return f.template bmag<T>(x); }, magnetic);
  }
  template <class T>
  V3<T> grad_bmag(const V3<T>& x) const {
    return std::visit([&](const auto& f) { return f.template grad_bmag<T>(x); }, magnetic);
  }
  template <class T>
  M3<T> hess_bmag(const V3<T>& x) const {
    return std::visit([&](const auto& f) { return f.template hess_bmag<T>(x); }, magnetic);
  }
  template <class T>
  V3<T> unit_b(const V3<T>& x) const { return B(x) / bmag(x); }

  template <class T>
  T phi_total(const ScalingParams& s, const V3<T>& x) const {
    return potential_value(phi0, x) + s.eta * potential_value(phi1, x / s.eta);
  }
  // E = -grad phi0(x) - (grad phi1)(x/eta); the eta prefactor of phi1 cancels
  // against the inner 1/eta on differentiation.
  template <class T>
  V3<T> E(const ScalingParams& s, const V3<T>& x) const {
    return -potential_grad(phi0, x) - potential_grad(phi1, x / s.eta);
  }
};

inline V3d eval_E(const FieldModel& m, const ScalingParams& s, const V3d& x) {
  m.domain.require(x);
  return m.E(s, x);
}

inline V3d eval_B(const FieldModel& m, const V3d& x) {
  m.domain.require(x);
  return m.B(x);
}

// Residual of the vector identity
//   (gradA)^T w = (gradA) w + w x (curl A),   w = p - A(x),
// which must vanish for any smooth A. Used as a derivative-oracle check.
inline double check_curl_identity(const FieldModel& m, const V3d& x, const V3d& p) {
  V3d w = p - m.A(x);
  M3d j = m.gradA(x);
  V3d lhs = j.transposed() * w;
  V3d rhs = j * w + cross(w, m.B(x));
  return norm(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Scenario registry

struct ScenarioSpec {
  std::string name;
  FieldModel model;
  bool supports_pipeline = false;  // cylindrical/Darboux/Lie stages
  bool is_tokamak_demo = false;
};

FieldModel make_uniform_model(double b0, Potential phi0 = ZeroPotential{},
                              Potential phi1 = ZeroPotential{});
FieldModel make_graded_model(double b0, double alpha,
                             Potential phi0 = ZeroPotential{},
                             Potential phi1 = ZeroPotential{});

}  // namespace gkred

#endif
