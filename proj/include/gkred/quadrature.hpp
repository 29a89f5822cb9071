#ifndef GKRED_QUADRATURE_HPP
#define GKRED_QUADRATURE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gkred {

// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
// the Legendre recurrence. Deterministic and accurate to round-off for the
// node counts used here (<= 128).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) {
    if (n < 1 || n > 256) throw std::invalid_argument("quadrature: bad node count");
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1 - x * x) * dp * dp);
    }
  }

  // Integrate f over [a, b]; f may return any scalar supporting * and +.
  template <class F>
  auto integrate(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto acc = f(mid + half * nodes[0]) * (half * weights[0]);
    for (std::size_t i = 1; i < nodes.size(); ++i)
      acc += f(mid + half * nodes[i]) * (half * weights[i]);
    return acc;
  }
};

// Shared node tables; construction is deterministic so caching is safe.
const GaussLegendre& gl_rule(int n);

// Mean of a 2pi-periodic function by the M-node trapezoidal (= midpoint) rule,
// spectrally accurate for smooth periodic integrands.
template <class F>
auto periodic_mean(F&& f, int m) {
  auto acc = f(0.0);
  for (int i = 1; i < m; ++i) acc += f(2 * M_PI * i / m);
  return acc * (1.0 / m);
}

}  // namespace gkred

#endif
