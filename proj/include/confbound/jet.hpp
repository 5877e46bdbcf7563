#pragma once

// Truncated multivariate Taylor polynomials in four variables.
//
// A Jet<N> stores Taylor coefficients c_alpha of a scalar around a point for
// every multi-index |alpha| <= order (order <= N at runtime). Monomials are
// stored graded by total degree, so truncating to a lower order is a prefix.
// The partial derivative d^alpha f equals alpha! * c_alpha.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace confbound {

inline constexpr int kJetVars = 4;
inline constexpr int kMaxJetOrder = 4;

// Number of monomials in four variables of total degree <= order.
constexpr int jet_size(int order) {
  return (order + 1) * (order + 2) * (order + 3) * (order + 4) / 24;
}

class JetDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

struct MonomialTables {
  static constexpr int kCount = jet_size(kMaxJetOrder);
  struct Triple {
    std::uint8_t a, b, out;
  };
  std::array<std::array<int, kJetVars>, kCount> exps{};
  std::array<int, kCount> degree{};
  std::array<double, kCount> factorial{};  // alpha!
  // up[m][v]: index of m + e_v (or -1 if the degree would exceed the maximum).
  std::array<std::array<int, kJetVars>, kCount> up{};
  std::array<int, 5 * 5 * 5 * 5> lookup{};
  // Product pairs sorted by output degree; products_end[k] bounds order k.
  std::vector<Triple> products;
  std::array<int, kMaxJetOrder + 1> products_end{};

  int index(const std::array<int, kJetVars>& e) const {
    return lookup[((e[0] * 5 + e[1]) * 5 + e[2]) * 5 + e[3]];
  }

  MonomialTables();
};

const MonomialTables& monomials();

}  // namespace detail

template <int N>
class Jet {
  static_assert(N >= 0 && N <= kMaxJetOrder, "jet order out of range");

 public:
  static constexpr int kCapacity = jet_size(N);
  using Multi = std::array<int, kJetVars>;

  Jet() = default;
  Jet(double value) { c_[0] = value; }  // NOLINT: implicit constant promotion
  Jet(double value, int order) : order_(order) {
    check_order(order);
    c_[0] = value;
  }

  static Jet variable(int slot, double value, int order = N) {
    Jet j(value, order);
    if (order >= 1) j.c_[1 + slot] = 1.0;
    return j;
  }

  int order() const { return order_; }
  int size() const { return jet_size(order_); }
  double value() const { return c_[0]; }
  double coeff(int i) const { return c_[i]; }
  double& coeff(int i) { return c_[i]; }
  double coeff(const Multi& alpha) const {
    int d = alpha[0] + alpha[1] + alpha[2] + alpha[3];
    if (d > order_) return 0.0;
    return c_[detail::monomials().index(alpha)];
  }
  double partial(const Multi& alpha) const {
    int d = alpha[0] + alpha[1] + alpha[2] + alpha[3];
    if (d > order_) throw std::out_of_range("partial exceeds jet order");
    const auto& t = detail::monomials();
    int i = t.index(alpha);
    return t.factorial[i] * c_[i];
  }
  // First partial with respect to one slot.
  double d(int slot) const { return order_ >= 1 ? c_[1 + slot] : 0.0; }

  // Jet of the partial derivative in one slot; the order drops by one.
  Jet derivative(int slot) const {
    Jet out(0.0, order_ > 0 ? order_ - 1 : 0);
    if (order_ == 0) return out;
    const auto& t = detail::monomials();
    const int n = jet_size(order_ - 1);
    for (int m = 0; m < n; ++m) {
      out.c_[m] = (t.exps[m][slot] + 1) * c_[t.up[m][slot]];
    }
    return out;
  }

  Jet truncated(int order) const {
    Jet out(0.0, order < order_ ? order : order_);
    for (int i = 0; i < out.size(); ++i) out.c_[i] = c_[i];
    return out;
  }

  Jet& operator+=(const Jet& o) {
    reduce_to(o.order_);
    for (int i = 0; i < size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    reduce_to(o.order_);
    for (int i = 0; i < size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (int i = 0; i < size(); ++i) c_[i] *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet operator-() const {
    Jet out = *this;
    for (int i = 0; i < size(); ++i) out.c_[i] = -c_[i];
    return out;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out(a.c_[0] * b.c_[0], a.order_ < b.order_ ? a.order_ : b.order_);
    if (out.order_ == 0) return out;
    if (out.order_ == 1) {
      for (int v = 1; v <= kJetVars; ++v) out.c_[v] = a.c_[0] * b.c_[v] + a.c_[v] * b.c_[0];
      return out;
    }
    out.c_[0] = 0.0;
    const auto& t = detail::monomials();
    const int end = t.products_end[out.order_];
    const auto* p = t.products.data();
    for (int k = 0; k < end; ++k) {
      out.c_[p[k].out] += a.c_[p[k].a] * b.c_[p[k].b];
    }
    return out;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  // Evaluates sum_k d[k]/k! * (x - x0)^k, where d holds the derivatives of a
  // scalar function at x0 = value().
  Jet compose(const double* derivs) const {
    Jet delta = *this;
    delta.c_[0] = 0.0;
    double fact = 1.0;
    for (int k = 2; k <= order_; ++k) fact *= k;
    Jet acc(derivs[order_] / fact, order_);
    for (int k = order_ - 1; k >= 0; --k) {
      fact /= (k + 1);
      acc = acc * delta;
      acc.c_[0] += derivs[k] / fact;
    }
    return acc;
  }

 private:
  static void check_order(int order) {
    if (order < 0 || order > N) throw std::out_of_range("jet order out of range");
  }
  void reduce_to(int order) {
    if (order < order_) order_ = order;
  }

  std::array<double, kCapacity> c_{};
  int order_ = N;
};

using Jet4 = Jet<4>;

template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
  double a0 = a.value();
  if (a0 == 0.0) throw JetDomainError("division by zero");
  std::array<double, kMaxJetOrder + 1> d{};
  double inv = 1.0 / a0;
  double p = inv;
  double f = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    d[k] = f * p;
    p *= inv;
    f *= -(k + 1);
  }
  return a.compose(d.data());
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> q = a * reciprocal(b);
  q.coeff(0) = a.value() / b.value();
  return q;
}

template <int N>
Jet<N> operator/(double s, const Jet<N>& b) {
  Jet<N> q = reciprocal(b) * s;
  q.coeff(0) = s / b.value();
  return q;
}

template <int N>
Jet<N> exp(const Jet<N>& a) {
  std::array<double, kMaxJetOrder + 1> d;
  d.fill(std::exp(a.value()));
  return a.compose(d.data());
}

template <int N>
Jet<N> log(const Jet<N>& a) {
  double a0 = a.value();
  if (!(a0 > 0.0)) throw JetDomainError("log of non-positive value");
  std::array<double, kMaxJetOrder + 1> d{};
  d[0] = std::log(a0);
  double p = 1.0 / a0;
  double f = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    d[k] = f * p;
    p /= a0;
    f *= -k;
  }
  return a.compose(d.data());
}

template <int N>
Jet<N> sin(const Jet<N>& a) {
  double s = std::sin(a.value()), c = std::cos(a.value());
  std::array<double, kMaxJetOrder + 1> d{s, c, -s, -c, s};
  return a.compose(d.data());
}

template <int N>
Jet<N> cos(const Jet<N>& a) {
  double s = std::sin(a.value()), c = std::cos(a.value());
  std::array<double, kMaxJetOrder + 1> d{c, -s, -c, s, c};
  return a.compose(d.data());
}

template <int N>
Jet<N> tan(const Jet<N>& a) {
  double c = std::cos(a.value());
  if (c == 0.0) throw JetDomainError("tan at a pole");
  double t = std::tan(a.value());
  double s2 = 1.0 + t * t;
  std::array<double, kMaxJetOrder + 1> d{t, s2, 2.0 * t * s2, s2 * (2.0 + 6.0 * t * t),
                                         s2 * (16.0 * t + 24.0 * t * t * t)};
  return a.compose(d.data());
}

// Real power with a constant exponent. Integer exponents accept any base.
template <int N>
Jet<N> pow(const Jet<N>& a, double p) {
  double a0 = a.value();
  double ip;
  bool integral = std::modf(p, &ip) == 0.0 && std::fabs(p) < 1e9;
  if (integral) {
    long n = static_cast<long>(ip);
    if (n == 0) return Jet<N>(1.0, a.order());
    Jet<N> base = n < 0 ? reciprocal(a) : a;
    unsigned long m = static_cast<unsigned long>(n < 0 ? -n : n);
    Jet<N> result(1.0, a.order());
    while (m) {
      if (m & 1UL) result = result * base;
      m >>= 1;
      if (m) base = base * base;
    }
    result.coeff(0) = std::pow(a0, p);
    return result;
  }
  if (a0 < 0.0) throw JetDomainError("non-integer power of negative value");
  if (a0 == 0.0) {
    if (p > 0.0 && a.order() == 0) return Jet<N>(0.0, 0);
    throw JetDomainError("non-integer power at zero");
  }
  std::array<double, kMaxJetOrder + 1> d{};
  double f = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    d[k] = f * std::pow(a0, p - k);
    f *= (p - k);
  }
  return a.compose(d.data());
}

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
  if (a.value() == 0.0 && a.order() == 0) return Jet<N>(0.0, 0);
  if (!(a.value() > 0.0)) throw JetDomainError("sqrt of non-positive value");
  Jet<N> r = pow(a, 0.5);
  r.coeff(0) = std::sqrt(a.value());
  return r;
}

// |a|; at a zero value the sign bit selects the branch, so -0.0 gives -a.
template <int N>
Jet<N> abs(const Jet<N>& a) {
  return std::signbit(a.value()) ? -a : a;
}

template <int N>
Jet<N> pow(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r = exp(b * log(a));
  r.coeff(0) = std::pow(a.value(), b.value());
  return r;
}

}  // namespace confbound
