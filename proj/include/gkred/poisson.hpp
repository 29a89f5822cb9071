#ifndef GKRED_POISSON_HPP
#define GKRED_POISSON_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gkred/dual.hpp"
#include "gkred/dynamics.hpp"
#include "gkred/fields.hpp"
#include "gkred/linalg.hpp"

// Poisson-bracket engine: phase-space functions and antisymmetric matrix
// fields, the change-of-coordinates law for Hamiltonians and Poisson
// matrices, and the checker for the key block-structure theorem.

namespace gkred {

struct PhaseFunction {
  std::function<double(const V6d&)> value;
  std::function<Dual6(const V6<Dual6>&)> value_dual;  // may be empty
  std::function<V6d(const V6d&)> grad;

  bool has_dual() const { return static_cast<bool>(value_dual); }

  // From a polymorphic callable; gradient via forward-mode differentiation.
  template <class F>
  static PhaseFunction from(F f) {
    PhaseFunction p;
    p.value = [f](const V6d& r) { return f(r); };
    p.value_dual = [f](const V6<Dual6>& r) { return f(r); };
    p.grad = [f](const V6d& r) { return gradient6([&](const auto& q) { return f(q); }, r); };
    return p;
  }

  // From a double-only callable with a supplied (analytic) gradient oracle.
  static PhaseFunction with_grad(std::function<double(const V6d&)> v,
                                 std::function<V6d(const V6d&)> g) {
    PhaseFunction p;
    p.value = std::move(v);
    p.grad = std::move(g);
    return p;
  }

  // From a double-only callable; gradient by central differences (test and
  // report plumbing, not a registry path).
  static PhaseFunction numeric(std::function<double(const V6d&)> v, double h = 1e-5) {
    PhaseFunction p;
    p.value = v;
    p.grad = [v, h](const V6d& r) {
      V6d g;
      for (int i = 0; i < 6; ++i) {
        V6d a = r, b = r;
        a[i] += h;
        b[i] -= h;
        g[i] = (v(a) - v(b)) / (2 * h);
      }
      return g;
    };
    return p;
  }
};

struct PoissonMatrixFn {
  std::function<M6d(const V6d&)> eval;

  double antisymmetry_residual(const V6d& r) const {
    M6d m = eval(r);
    double worst = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) worst = std::max(worst, std::abs(m(i, j) + m(j, i)));
    return worst;
  }
};

struct CoordinateMap {
  enum class Tag { exact, series };

  std::function<V6d(const V6d&)> forward;   // r -> r~
  std::function<V6d(const V6d&)> inverse;   // r~ -> r
  std::function<M6d(const V6d&)> jac_forward;   // D(forward) at r
  std::function<M6d(const V6d&)> jac_inverse;   // D(inverse) at r~
  std::function<V6<Dual6>(const V6<Dual6>&)> forward_dual;  // may be empty
  std::function<V6<Dual6>(const V6<Dual6>&)> inverse_dual;  // may be empty
  Tag tag = Tag::exact;
  int series_order = 0;

  template <class F, class G>
  static CoordinateMap exact_from(F fwd, G inv) {
    CoordinateMap m;
    m.forward = [fwd](const V6d& r) { return fwd(r); };
    m.inverse = [inv](const V6d& r) { return inv(r); };
    m.forward_dual = [fwd](const V6<Dual6>& r) { return fwd(r); };
    m.inverse_dual = [inv](const V6<Dual6>& r) { return inv(r); };
    m.jac_forward = [fwd](const V6d& r) {
      return jacobian6([&](const auto& q) { return fwd(q); }, r);
    };
    m.jac_inverse = [inv](const V6d& r) {
      return jacobian6([&](const auto& q) { return inv(q); }, r);
    };
    m.tag = Tag::exact;
    return m;
  }

  static CoordinateMap identity() {
    return exact_from([](const auto& r) { return r; }, [](const auto& r) { return r; });
  }
};

// outer after inner: r -> outer(inner(r)).
inline CoordinateMap compose(const CoordinateMap& outer, const CoordinateMap& inner) {
  CoordinateMap m;
  auto of = outer.forward, ofi = outer.inverse;
  auto inf = inner.forward, ini = inner.inverse;
  m.forward = [of, inf](const V6d& r) { return of(inf(r)); };
  m.inverse = [ofi, ini](const V6d& r) { return ini(ofi(r)); };
  auto ojf = outer.jac_forward, oji = outer.jac_inverse;
  auto ijf = inner.jac_forward, iji = inner.jac_inverse;
  m.jac_forward = [ojf, ijf, inf](const V6d& r) { return ojf(inf(r)) * ijf(r); };
  m.jac_inverse = [oji, iji, ofi](const V6d& r) { return iji(ofi(r)) * oji(r); };
  if (outer.forward_dual && inner.forward_dual) {
    auto ofd = outer.forward_dual, ifd = inner.forward_dual;
    m.forward_dual = [ofd, ifd](const V6<Dual6>& r) { return ofd(ifd(r)); };
  }
  if (outer.inverse_dual && inner.inverse_dual) {
    auto oid = outer.inverse_dual, iid = inner.inverse_dual;
    m.inverse_dual = [oid, iid](const V6<Dual6>& r) { return iid(oid(r)); };
  }
  m.tag = (outer.tag == CoordinateMap::Tag::series || inner.tag == CoordinateMap::Tag::series)
              ? CoordinateMap::Tag::series
              : CoordinateMap::Tag::exact;
  m.series_order = std::min(outer.tag == CoordinateMap::Tag::series ? outer.series_order : 99,
                            inner.tag == CoordinateMap::Tag::series ? inner.series_order : 99);
  return m;
}

// {f, g}(r) = grad f . (P grad g).
inline double bracket(const PoissonMatrixFn& P, const PhaseFunction& f,
                      const PhaseFunction& g, const V6d& r) {
  return dot(f.grad(r), P.eval(r) * g.grad(r));
}

// Component-wise extension for a vector-valued first argument.
inline V6d bracket_vec(const PoissonMatrixFn& P, const std::vector<PhaseFunction>& f,
                       const PhaseFunction& g, const V6d& r) {
  if (f.size() != 6) throw std::invalid_argument("bracket_vec: need 6 components");
  V6d pg = P.eval(r) * g.grad(r);
  V6d out;
  for (int i = 0; i < 6; ++i) out[i] = dot(f[i].grad(r), pg);
  return out;
}

inline V6d hamiltonian_vector_field(const PoissonMatrixFn& P, const PhaseFunction& H,
                                    const V6d& r) {
  return P.eval(r) * H.grad(r);
}

// H~(r~) = H(inverse(r~)); gradient through the inverse-map Jacobian.
inline PhaseFunction transform_hamiltonian(const PhaseFunction& H, const CoordinateMap& map) {
  PhaseFunction out;
  auto hv = H.value;
  auto inv = map.inverse;
  out.value = [hv, inv](const V6d& rt) { return hv(inv(rt)); };
  auto hg = H.grad;
  auto ji = map.jac_inverse;
  out.grad = [hg, inv, ji](const V6d& rt) { return ji(rt).transposed() * hg(inv(rt)); };
  if (H.has_dual() && map.inverse_dual) {
    auto hd = H.value_dual;
    auto invd = map.inverse_dual;
    out.value_dual = [hd, invd](const V6<Dual6>& rt) { return hd(invd(rt)); };
  }
  return out;
}

// P~(r~) = J P J^T at r = inverse(r~). Default transformation path.
inline PoissonMatrixFn transform_poisson(const PoissonMatrixFn& P, const CoordinateMap& map) {
  PoissonMatrixFn out;
  auto pe = P.eval;
  auto inv = map.inverse;
  auto jf = map.jac_forward;
  out.eval = [pe, inv, jf](const V6d& rt) {
    V6d r = inv(rt);
    M6d j = jf(r);
    double scale = max_abs_value(j);
    if (!(scale < 1e14))
      throw std::runtime_error("transform_poisson: singular inverse-map Jacobian");
    return j * pe(r) * j.transposed();
  };
  return out;
}

// Literal change-of-coordinates law, entry (i,j) = {map_i, map_j}(inverse(r~)),
// retained as a cross-check of the Jacobian-conjugation path.
inline PoissonMatrixFn transform_poisson_bracketwise(const PoissonMatrixFn& P,
                                                     const CoordinateMap& map) {
  PoissonMatrixFn out;
  auto pe = P.eval;
  auto inv = map.inverse;
  auto jf = map.jac_forward;
  out.eval = [pe, inv, jf](const V6d& rt) {
    V6d r = inv(rt);
    M6d j = jf(r);
    std::vector<PhaseFunction> comps(6);
    for (int i = 0; i < 6; ++i) {
      V6d gi;
      for (int c = 0; c < 6; ++c) gi[c] = j(i, c);
      comps[i] = PhaseFunction::with_grad([](const V6d&) { return 0.0; },
                                          [gi](const V6d&) { return gi; });
    }
    PoissonMatrixFn local{[pe](const V6d& q) { return pe(q); }};
    M6d m;
    for (int i = 0; i < 6; ++i)
      for (int jx = 0; jx < 6; ++jx) m(i, jx) = bracket(local, comps[i], comps[jx], r);
    return m;
  };
  return out;
}

// ---------------------------------------------------------------------------
// Ready-made objects for the usual/canonical charts

inline PoissonMatrixFn canonical_poisson_matrix() {
  PoissonMatrixFn p;
  p.eval = [](const V6d&) {
    M6d m;
    for (int i = 0; i < 3; ++i) {
      m(i, i + 3) = 1.0;
      m(i + 3, i) = -1.0;
    }
    return m;
  };
  return p;
}

// Eq.-form [[0, I], [-I, ((gradA)^T - gradA)/eps]] with (gradA)_ij = dA_i/dx_j.
inline PoissonMatrixFn usual_poisson_matrix(const FieldModel& m, const ScalingParams& s) {
  PoissonMatrixFn p;
  p.eval = [&m, eps = s.epsilon](const V6d& r) {
    M3d j = m.gradA(head3(r));
    M6d out;
    for (int i = 0; i < 3; ++i) {
      out(i, i + 3) = 1.0;
      out(i + 3, i) = -1.0;
      for (int k = 0; k < 3; ++k) out(i + 3, k + 3) = (j(k, i) - j(i, k)) / eps;
    }
    return out;
  };
  return p;
}

inline PhaseFunction usual_hamiltonian_fn(const FieldModel& m, const ScalingParams& s) {
  return PhaseFunction::from(
      [&m, s](const auto& r) { return hamiltonian_usual_t(m, s, r); });
}

inline PhaseFunction canonical_hamiltonian_fn(const FieldModel& m, const ScalingParams& s) {
  return PhaseFunction::from(
      [&m, s](const auto& r) { return hamiltonian_canonical_t(m, s, r); });
}

// canonical -> usual: x = q, v = p - A(q)/eps.
inline CoordinateMap canonical_to_usual_map(const FieldModel& m, const ScalingParams& s) {
  return CoordinateMap::exact_from(
      [&m, s](const auto& r) {
        auto q = head3(r), p = tail3(r);
        return join(q, p - m.A(q) / s.epsilon);
      },
      [&m, s](const auto& r) {
        auto x = head3(r), v = tail3(r);
        return join(x, v + m.A(x) / s.epsilon);
      });
}

// ---------------------------------------------------------------------------
// Key Result checker
//
// Raw residuals follow the theorem statement; normalized residuals divide by
// the magnitude of the (5,6) pair so matrices carrying a 1/eps block are
// graded against their own fast scale.

struct KeyTheoremReport {
  int probes = 0;
  // (a) block form: rows/cols 5,6 vanish except the (5,6)/(6,5) pair
  double block_raw = 0, block_normalized = 0;
  // (b) dH/dr6 = 0
  double h_r6_raw = 0;
  // (c) dM/dr5 = dM/dr6 = 0 (central differences)
  double m_r5_raw = 0, m_r6_raw = 0;
  // (d) fifth component of P grad H
  double r5dot_raw = 0, r5dot_normalized = 0;
  double pair_scale = 1.0;  // max |P(5,6)| seen over probes
};

inline KeyTheoremReport check_key_theorem(const PoissonMatrixFn& P, const PhaseFunction& H,
                                          const std::vector<V6d>& probes,
                                          double fd_step = 1e-5) {
  KeyTheoremReport rep;
  rep.probes = static_cast<int>(probes.size());
  for (const V6d& r : probes) {
    M6d m = P.eval(r);
    double scale = std::max(1.0, std::abs(m(4, 5)));
    rep.pair_scale = std::max(rep.pair_scale, std::abs(m(4, 5)));
    double off = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        bool in_pair = (i == 4 && j == 5) || (i == 5 && j == 4);
        bool in_block = i < 4 && j < 4;
        if (!in_pair && !in_block) off = std::max(off, std::abs(m(i, j)));
      }
    rep.block_raw = std::max(rep.block_raw, off);
    rep.block_normalized = std::max(rep.block_normalized, off / scale);

    rep.h_r6_raw = std::max(rep.h_r6_raw, std::abs(H.grad(r)[5]));

    for (int slot = 4; slot <= 5; ++slot) {
      V6d a = r, b = r;
      a[slot] += fd_step;
      b[slot] -= fd_step;
      M6d ma = P.eval(a), mb = P.eval(b);
      double d = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          d = std::max(d, std::abs(ma(i, j) - mb(i, j)) / (2 * fd_step));
      (slot == 4 ? rep.m_r5_raw : rep.m_r6_raw) = std::max(
          slot == 4 ? rep.m_r5_raw : rep.m_r6_raw, d);
    }

    double r5dot = std::abs((m * H.grad(r))[4]);
    rep.r5dot_raw = std::max(rep.r5dot_raw, r5dot);
    rep.r5dot_normalized = std::max(rep.r5dot_normalized, r5dot / scale);
  }
  return rep;
}

}  // namespace gkred

#endif
