#ifndef GKRED_DYNAMICS_HPP
#define GKRED_DYNAMICS_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gkred/fields.hpp"
#include "gkred/linalg.hpp"

namespace gkred {

struct UsualState {
  V3d x;
  V3d v;
  V6d pack() const { return join(x, v); }
  static UsualState unpack(const V6d& s) { return {head3(s), tail3(s)}; }
};

struct CanonicalState {
  V3d q;
  V3d p;
  V6d pack() const { return join(q, p); }
  static CanonicalState unpack(const V6d& s) { return {head3(s), tail3(s)}; }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<V6d> states;
  std::string system;  // "usual", "canonical", ...
};

struct GyroResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Usual coordinates: dx/dt = v, dv/dt = E0(x) + E1(x/eta) + v x B(x)/eps.
template <class T>
V6<T> rhs_usual_t(const FieldModel& m, const ScalingParams& s, const V6<T>& st) {
  V3<T> x = head3(st), v = tail3(st);
  V3<T> acc = m.E(s, x) + cross(v, m.B(x)) / s.epsilon;
  return join(v, acc);
}

inline V6d rhs_usual(const FieldModel& m, const ScalingParams& s, const UsualState& st) {
  m.domain.require(st.x);
  return rhs_usual_t(m, s, st.pack());
}

// Canonical coordinates (q, p) with H = |p - A(q)/eps|^2/2 + phi0 + eta phi1:
// dq/dt = p - A/eps, dp/dt = (gradA)^T (p - A/eps)/eps - grad(phi).
template <class T>
V6<T> rhs_canonical_t(const FieldModel& m, const ScalingParams& s, const V6<T>& st) {
  V3<T> q = head3(st), p = tail3(st);
  V3<T> w = p - m.A(q) / s.epsilon;
  V3<T> dp = (m.gradA(q).transposed() * w) / s.epsilon - potential_grad(m.phi0, q) -
             potential_grad(m.phi1, q / s.eta);
  return join(w, dp);
}

inline V6d rhs_canonical(const FieldModel& m, const ScalingParams& s,
                         const CanonicalState& st) {
  m.domain.require(st.q);
  return rhs_canonical_t(m, s, st.pack());
}

inline CanonicalState to_canonical(const UsualState& u, const FieldModel& m,
                                   const ScalingParams& s) {
  m.domain.require(u.x);
  return {u.x, u.v + m.A(u.x) / s.epsilon};
}

inline UsualState to_usual(const CanonicalState& c, const FieldModel& m,
                           const ScalingParams& s) {
  m.domain.require(c.q);
  return {c.q, c.p - m.A(c.q) / s.epsilon};
}

template <class T>
T hamiltonian_usual_t(const FieldModel& m, const ScalingParams& s, const V6<T>& st) {
  V3<T> x = head3(st), v = tail3(st);
  return 0.5 * norm2(v) + m.phi_total(s, x);
}

inline double hamiltonian_usual(const FieldModel& m, const ScalingParams& s,
                                const UsualState& st) {
  m.domain.require(st.x);
  return hamiltonian_usual_t(m, s, st.pack());
}

template <class T>
T hamiltonian_canonical_t(const FieldModel& m, const ScalingParams& s, const V6<T>& st) {
  V3<T> q = head3(st), p = tail3(st);
  return 0.5 * norm2(p - m.A(q) / s.epsilon) + m.phi_total(s, q);
}

inline double hamiltonian_canonical(const FieldModel& m, const ScalingParams& s,
                                    const CanonicalState& st) {
  m.domain.require(st.q);
  return hamiltonian_canonical_t(m, s, st.pack());
}

// Largest |B| over the configured box, used by the gyro-resolution step guard.
// Registry fields vary affinely with position, so sampling the corners is
// exact for them; the center is included for safety on other models.
inline double bmag_max(const FieldModel& m) {
  double best = m.bmag(0.5 * (m.domain.lo + m.domain.hi));
  for (int mask = 0; mask < 8; ++mask) {
    V3d x;
    for (int i = 0; i < 3; ++i) x[i] = (mask >> i & 1) ? m.domain.hi[i] : m.domain.lo[i];
    best = std::max(best, m.bmag(x));
  }
  return best;
}

inline double gyro_period(const FieldModel& m, const ScalingParams& s) {
  return 2.0 * M_PI * s.epsilon / bmag_max(m);
}

// Maximum dt accepted without the explicit override.
inline double dt_guard(const FieldModel& m, const ScalingParams& s) {
  return gyro_period(m, s) / 32.0;
}

// Classical fixed-step RK4. rhs is autonomous; domain exits inside a stage are
// rethrown with the step's start time attached.
inline Trajectory integrate(const std::function<V6d(const V6d&)>& rhs, const V6d& s0,
                            double t_end, double dt, double dt_max = 0.0,
                            bool allow_coarse = false, std::string system = "usual") {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (dt_max > 0.0 && dt > dt_max && !allow_coarse)
    throw GyroResolutionError("integrate: dt " + std::to_string(dt) +
                              " exceeds gyro-resolution guard " + std::to_string(dt_max));
  Trajectory tr;
  tr.system = std::move(system);
  std::size_t n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
  tr.times.reserve(n + 1);
  tr.states.reserve(n + 1);
  V6d s = s0;
  double t = 0.0;
  tr.times.push_back(t);
  tr.states.push_back(s);
  for (std::size_t i = 0; i < n; ++i) {
    double h = std::min(dt, t_end - t);
    try {
      V6d k1 = rhs(s);
      V6d k2 = rhs(s + 0.5 * h * k1);
      V6d k3 = rhs(s + 0.5 * h * k2);
      V6d k4 = rhs(s + h * k3);
      s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const DomainExit& e) {
      throw DomainExit(e.where, t);
    }
    t += h;
    tr.times.push_back(t);
    tr.states.push_back(s);
  }
  return tr;
}

inline Trajectory integrate_usual(const FieldModel& m, const ScalingParams& s,
                                  const UsualState& s0, double t_end, double dt,
                                  bool allow_coarse = false) {
  auto rhs = [&m, &s](const V6d& st) { return rhs_usual(m, s, UsualState::unpack(st)); };
  return integrate(rhs, s0.pack(), t_end, dt, dt_guard(m, s), allow_coarse, "usual");
}

inline Trajectory integrate_canonical(const FieldModel& m, const ScalingParams& s,
                                      const CanonicalState& s0, double t_end, double dt,
                                      bool allow_coarse = false) {
  auto rhs = [&m, &s](const V6d& st) {
    return rhs_canonical(m, s, CanonicalState::unpack(st));
  };
  return integrate(rhs, s0.pack(), t_end, dt, dt_guard(m, s), allow_coarse, "canonical");
}

void write_trajectory_csv(const Trajectory& tr, const std::string& path);

}  // namespace gkred

#endif
