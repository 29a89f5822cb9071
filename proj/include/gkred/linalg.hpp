#ifndef GKRED_LINALG_HPP
#define GKRED_LINALG_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

// Small fixed-size vectors and matrices, templated on the scalar type so the
// same expressions evaluate on double, dual numbers or nested duals.

namespace gkred {

template <class T, int N>
struct Vec {
  std::array<T, N> c{};

  Vec() = default;
  template <class... Args,
            class = std::enable_if_t<sizeof...(Args) == static_cast<std::size_t>(N)>>
  Vec(Args... args) : c{T(args)...} {}

  T& operator[](int i) { return c[i]; }
  const T& operator[](int i) const { return c[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < N; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < N; ++i) c[i] -= o.c[i];
    return *this;
  }
  template <class S>
  Vec& operator*=(const S& s) {
    for (int i = 0; i < N; ++i) c[i] = c[i] * s;
    return *this;
  }
};

template <class T, int N>
Vec<T, N> operator+(Vec<T, N> a, const Vec<T, N>& b) { return a += b; }
template <class T, int N>
Vec<T, N> operator-(Vec<T, N> a, const Vec<T, N>& b) { return a -= b; }
template <class T, int N>
Vec<T, N> operator-(const Vec<T, N>& a) {
  Vec<T, N> r;
  for (int i = 0; i < N; ++i) r[i] = -a[i];
  return r;
}
template <class T, int N, class S>
Vec<T, N> operator*(const S& s, Vec<T, N> a) { return a *= s; }
template <class T, int N, class S>
Vec<T, N> operator*(Vec<T, N> a, const S& s) { return a *= s; }
template <class T, int N, class S>
Vec<T, N> operator/(Vec<T, N> a, const S& s) {
  for (int i = 0; i < N; ++i) a[i] = a[i] / s;
  return a;
}

template <class T, int N>
T dot(const Vec<T, N>& a, const Vec<T, N>& b) {
  T r = a[0] * b[0];
  for (int i = 1; i < N; ++i) r += a[i] * b[i];
  return r;
}

template <class T, int N>
T norm2(const Vec<T, N>& a) { return dot(a, a); }

template <class T, int N>
T norm(const Vec<T, N>& a) {
  using std::sqrt;
  return sqrt(norm2(a));
}

template <class T>
Vec<T, 3> cross(const Vec<T, 3>& a, const Vec<T, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1],
          a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

template <class T> using V3 = Vec<T, 3>;
template <class T> using V6 = Vec<T, 6>;
using V3d = Vec<double, 3>;
using V6d = Vec<double, 6>;

template <class T, int N>
struct Mat {
  std::array<T, N * N> c{};  // row major

  T& operator()(int i, int j) { return c[i * N + j]; }
  const T& operator()(int i, int j) const { return c[i * N + j]; }

  static Mat identity() {
    Mat m;
    for (int i = 0; i < N; ++i) m(i, i) = T(1);
    return m;
  }

  Mat transposed() const {
    Mat m;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) m(i, j) = (*this)(j, i);
    return m;
  }

  Mat& operator+=(const Mat& o) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
    return *this;
  }
  template <class S>
  Mat& operator*=(const S& s) {
    for (auto& x : c) x = x * s;
    return *this;
  }
};

template <class T, int N>
Mat<T, N> operator+(Mat<T, N> a, const Mat<T, N>& b) { return a += b; }
template <class T, int N>
Mat<T, N> operator-(Mat<T, N> a, const Mat<T, N>& b) { return a -= b; }
template <class T, int N, class S>
Mat<T, N> operator*(const S& s, Mat<T, N> a) { return a *= s; }

template <class T, int N>
Vec<T, N> operator*(const Mat<T, N>& m, const Vec<T, N>& v) {
  Vec<T, N> r;
  for (int i = 0; i < N; ++i) {
    T s = m(i, 0) * v[0];
    for (int j = 1; j < N; ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

template <class T, int N>
Mat<T, N> operator*(const Mat<T, N>& a, const Mat<T, N>& b) {
  Mat<T, N> r;
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      const T& aik = a(i, k);
      for (int j = 0; j < N; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

// Gauss-Jordan with partial pivoting on the value part. Works for any scalar
// with comparisons defined through value(); throws on (numerically) singular
// input.
inline double scalar_value(double x) { return x; }

template <class T, int N>
Mat<T, N> inverse(Mat<T, N> a) {
  Mat<T, N> inv = Mat<T, N>::identity();
  for (int col = 0; col < N; ++col) {
    int piv = col;
    double best = std::abs(scalar_value(a(col, col)));
    for (int r = col + 1; r < N; ++r) {
      double m = std::abs(scalar_value(a(r, col)));
      if (m > best) { best = m; piv = r; }
    }
    if (best < 1e-14) throw std::runtime_error("linalg: singular matrix");
    if (piv != col)
      for (int j = 0; j < N; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    T d = a(col, col);
    for (int j = 0; j < N; ++j) {
      a(col, j) = a(col, j) / d;
      inv(col, j) = inv(col, j) / d;
    }
    for (int r = 0; r < N; ++r) {
      if (r == col) continue;
      T f = a(r, col);
      for (int j = 0; j < N; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

template <class T> using M3 = Mat<T, 3>;
template <class T> using M6 = Mat<T, 6>;
using M3d = Mat<double, 3>;
using M6d = Mat<double, 6>;

template <class T>
V3<T> head3(const V6<T>& v) { return {v[0], v[1], v[2]}; }
template <class T>
V3<T> tail3(const V6<T>& v) { return {v[3], v[4], v[5]}; }
template <class T>
V6<T> join(const V3<T>& a, const V3<T>& b) {
  return {a[0], a[1], a[2], b[0], b[1], b[2]};
}

template <class T, int N>
double max_abs_value(const Vec<T, N>& v) {
  double m = 0;
  for (int i = 0; i < N; ++i) m = std::max(m, std::abs(scalar_value(v[i])));
  return m;
}

template <class T, int N>
double max_abs_value(const Mat<T, N>& m) {
  double r = 0;
  for (const auto& x : m.c) r = std::max(r, std::abs(scalar_value(x)));
  return r;
}

}  // namespace gkred

#endif
