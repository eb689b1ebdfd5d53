#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet stores the Taylor coefficients c_alpha of a function of `nvars`
// variables around a point, for all multi-indices |alpha| <= order.
// Monomials are graded by total degree, so the layout of a lower order is a
// prefix of every higher-order layout with the same number of variables.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace geocon {

inline constexpr int kMaxJetVars = 6;
inline constexpr int kMaxJetOrder = 6;

class JetLayout {
 public:
  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };

  static const JetLayout& get(int nvars, int order) {
    if (nvars < 1 || nvars > kMaxJetVars || order < 0 || order > kMaxJetOrder) {
      throw std::invalid_argument("jet layout out of range");
    }
    static std::mutex mutex;
    static std::array<std::array<std::unique_ptr<JetLayout>, kMaxJetOrder + 1>, kMaxJetVars + 1>
        cache;
    const std::lock_guard lock(mutex);
    auto& slot = cache[static_cast<std::size_t>(nvars)][static_cast<std::size_t>(order)];
    if (!slot) slot.reset(new JetLayout(nvars, order));
    return *slot;
  }

  [[nodiscard]] int nvars() const noexcept { return nvars_; }
  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] std::size_t size() const noexcept { return degree_.size(); }
  [[nodiscard]] int degree(std::size_t i) const { return degree_[i]; }
  [[nodiscard]] std::span<const int> exponents(std::size_t i) const {
    return {exponents_.data() + i * static_cast<std::size_t>(nvars_),
            static_cast<std::size_t>(nvars_)};
  }
  [[nodiscard]] std::span<const Product> products() const noexcept { return products_; }

  // Index of the monomial alpha, or -1 if its degree exceeds the order.
  [[nodiscard]] std::ptrdiff_t index_of(std::span<const int> alpha) const {
    int deg = 0;
    for (int a : alpha) {
      if (a < 0) return -1;
      deg += a;
    }
    if (deg > order_) return -1;
    for (std::size_t i = degree_begin(deg); i < size() && degree_[i] == deg; ++i) {
      if (std::ranges::equal(exponents(i), alpha)) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  }

  // Index of monomial i multiplied by u_var, or -1 when beyond the order.
  [[nodiscard]] std::ptrdiff_t raised(std::size_t i, int var) const {
    return raise_[i * static_cast<std::size_t>(nvars_) + static_cast<std::size_t>(var)];
  }

  // Number of coefficients of a layout with the given shape.
  static std::size_t count(int nvars, int order) {
    std::size_t n = 1;
    for (int k = 1; k <= order; ++k) n = n * static_cast<std::size_t>(nvars + k) / static_cast<std::size_t>(k);
    return n;
  }

 private:
  JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
    std::vector<int> alpha(static_cast<std::size_t>(nvars), 0);
    for (int deg = 0; deg <= order; ++deg) enumerate(alpha, 0, deg, deg);
    const std::size_t n = size();
    raise_.assign(n * static_cast<std::size_t>(nvars), -1);
    for (std::size_t i = 0; i < n; ++i) {
      for (int v = 0; v < nvars; ++v) {
        std::vector<int> beta(exponents(i).begin(), exponents(i).end());
        ++beta[static_cast<std::size_t>(v)];
        raise_[i * static_cast<std::size_t>(nvars) + static_cast<std::size_t>(v)] = index_of(beta);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (degree_[i] + degree_[j] > order) continue;
        std::vector<int> gamma(static_cast<std::size_t>(nvars));
        for (std::size_t k = 0; k < gamma.size(); ++k) gamma[k] = exponents(i)[k] + exponents(j)[k];
        products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                             static_cast<std::uint32_t>(index_of(gamma))});
      }
    }
  }

  void enumerate(std::vector<int>& alpha, int var, int remaining, int deg) {
    if (var == nvars_ - 1) {
      alpha[static_cast<std::size_t>(var)] = remaining;
      exponents_.insert(exponents_.end(), alpha.begin(), alpha.end());
      degree_.push_back(deg);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      alpha[static_cast<std::size_t>(var)] = a;
      enumerate(alpha, var + 1, remaining - a, deg);
    }
  }

  [[nodiscard]] std::size_t degree_begin(int deg) const {
    return deg == 0 ? 0 : count(nvars_, deg - 1);
  }

  int nvars_;
  int order_;
  std::vector<int> exponents_;
  std::vector<int> degree_;
  std::vector<std::ptrdiff_t> raise_;
  std::vector<Product> products_;
};

class Jet {
 public:
  Jet() : coeffs_{0.0} {}
  Jet(double value) : coeffs_{value} {}  // NOLINT(google-explicit-constructor)

  static Jet constant(const JetLayout& layout, double value) {
    Jet j(&layout);
    j.coeffs_[0] = value;
    return j;
  }

  static Jet variable(const JetLayout& layout, int var, double value) {
    Jet j = constant(layout, value);
    if (layout.order() >= 1) j.coeffs_[1 + static_cast<std::size_t>(var)] = 1.0;
    return j;
  }

  [[nodiscard]] double value() const noexcept { return coeffs_[0]; }
  [[nodiscard]] const JetLayout* layout() const noexcept { return layout_; }
  [[nodiscard]] bool is_constant() const noexcept { return layout_ == nullptr; }
  [[nodiscard]] int order() const noexcept { return layout_ ? layout_->order() : kMaxJetOrder; }
  [[nodiscard]] std::span<const double> coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] double coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : 0.0; }

  // Mixed partial derivative d^alpha f at the expansion point.
  [[nodiscard]] double partial(std::span<const int> alpha) const {
    int deg = 0;
    double fact = 1.0;
    for (int a : alpha) {
      deg += a;
      for (int k = 2; k <= a; ++k) fact *= k;
    }
    if (!layout_) return deg == 0 ? coeffs_[0] : 0.0;
    const auto idx = layout_->index_of(alpha);
    if (idx < 0) throw std::out_of_range("partial beyond jet order");
    return fact * coeffs_[static_cast<std::size_t>(idx)];
  }

  [[nodiscard]] double partial(std::initializer_list<int> alpha) const {
    return partial(std::span<const int>(alpha.begin(), alpha.size()));
  }

  // First partial derivative value d f / d u_var.
  [[nodiscard]] double d(int var) const {
    if (!layout_ || layout_->order() < 1) {
      if (layout_ && layout_->order() < 1) throw std::out_of_range("jet of order 0 has no derivative");
      return 0.0;
    }
    return coeffs_[1 + static_cast<std::size_t>(var)];
  }

  // The jet of d f / d u_var, one order lower.
  [[nodiscard]] Jet derivative(int var) const {
    if (!layout_) return Jet(0.0);
    if (layout_->order() == 0) throw std::out_of_range("jet of order 0 has no derivative");
    const JetLayout& low = JetLayout::get(layout_->nvars(), layout_->order() - 1);
    Jet out(&low);
    for (std::size_t i = 0; i < low.size(); ++i) {
      const auto up = layout_->raised(i, var);
      out.coeffs_[i] = static_cast<double>(low.exponents(i)[static_cast<std::size_t>(var)] + 1) *
                       coeffs_[static_cast<std::size_t>(up)];
    }
    return out;
  }

  [[nodiscard]] Jet truncated(int order) const {
    if (!layout_ || order >= layout_->order()) return *this;
    Jet out(&JetLayout::get(layout_->nvars(), order));
    std::copy_n(coeffs_.begin(), out.coeffs_.size(), out.coeffs_.begin());
    return out;
  }

  Jet& operator+=(const Jet& o) {
    align(o);
    const std::size_t n = std::min(coeffs_.size(), o.coeffs_.size());
    for (std::size_t i = 0; i < n; ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    align(o);
    const std::size_t n = std::min(coeffs_.size(), o.coeffs_.size());
    for (std::size_t i = 0; i < n; ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    *this = *this * o;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    *this = *this / o;
    return *this;
  }

  friend Jet operator-(Jet a) {
    for (double& c : a.coeffs_) c = -c;
    return a;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (!a.layout_) return b * a.coeffs_[0];
    if (!b.layout_) return a * b.coeffs_[0];
    check_compatible(a, b);
    const JetLayout& L = a.layout_->order() <= b.layout_->order() ? *a.layout_ : *b.layout_;
    Jet out(&L);
    for (const auto& p : L.products()) out.coeffs_[p.out] += a.coeffs_[p.lhs] * b.coeffs_[p.rhs];
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (!b.layout_) return a * (1.0 / b.coeffs_[0]);
    return a * reciprocal(b);
  }
  friend Jet operator/(double s, const Jet& b) { return reciprocal(b) * s; }

  // f(a) = sum_k taylor[k] (a - a0)^k where taylor[k] = f^(k)(a0)/k!.
  static Jet compose(const Jet& a, std::span<const double> taylor) {
    if (!a.layout_) return Jet(taylor[0]);
    Jet delta = a;
    delta.coeffs_[0] = 0.0;
    const int order = a.layout_->order();
    Jet r = Jet::constant(*a.layout_, taylor[static_cast<std::size_t>(order)]);
    for (int k = order - 1; k >= 0; --k) {
      r = r * delta;
      r.coeffs_[0] += taylor[static_cast<std::size_t>(k)];
    }
    return r;
  }

  friend Jet reciprocal(const Jet& a) { return pow_real(a, -1.0); }

  friend Jet pow_real(const Jet& a, double r) {
    const double a0 = a.value();
    std::array<double, kMaxJetOrder + 1> t{};
    double binom = 1.0;
    for (int k = 0; k <= a.order(); ++k) {
      t[static_cast<std::size_t>(k)] = binom * std::pow(a0, r - k);
      binom *= (r - k) / (k + 1);
    }
    return compose(a, std::span<const double>(t.data(), static_cast<std::size_t>(a.order()) + 1));
  }

 private:
  explicit Jet(const JetLayout* layout) : layout_(layout), coeffs_(layout->size(), 0.0) {}

  static void check_compatible(const Jet& a, const Jet& b) {
    if (a.layout_->nvars() != b.layout_->nvars()) {
      throw std::invalid_argument("jets over different variable counts");
    }
  }

  // Bring *this to the common (lower) order of *this and o.
  void align(const Jet& o) {
    if (!o.layout_) return;
    if (!layout_) {
      const double v = coeffs_[0];
      *this = Jet::constant(*o.layout_, v);
      return;
    }
    check_compatible(*this, o);
    if (o.layout_->order() < layout_->order()) *this = truncated(o.layout_->order());
  }

  const JetLayout* layout_ = nullptr;
  std::vector<double> coeffs_;
};

namespace detail {

template <class F>
Jet apply_series(const Jet& a, F&& coeff) {
  std::array<double, kMaxJetOrder + 1> t{};
  const int order = a.is_constant() ? 0 : a.order();
  for (int k = 0; k <= order; ++k) t[static_cast<std::size_t>(k)] = coeff(k);
  return Jet::compose(a, std::span<const double>(t.data(), static_cast<std::size_t>(order) + 1));
}

inline double inv_factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return 1.0 / f;
}

// Taylor coefficients of an antiderivative F with F'(a0 + t) = 1 / (q0 + q1 t + q2 t^2).
inline Jet integrate_rational(const Jet& a, double value, double q0, double q1, double q2) {
  std::array<double, kMaxJetOrder + 1> d{};
  const int order = a.is_constant() ? 0 : a.order();
  d[0] = 1.0 / q0;
  for (int k = 1; k < order; ++k) {
    const double prev2 = k >= 2 ? d[static_cast<std::size_t>(k - 2)] : 0.0;
    d[static_cast<std::size_t>(k)] = -(q1 * d[static_cast<std::size_t>(k - 1)] + q2 * prev2) / q0;
  }
  return apply_series(a, [&](int k) { return k == 0 ? value : d[static_cast<std::size_t>(k - 1)] / k; });
}

}  // namespace detail

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return detail::apply_series(a, [&](int k) { return e * detail::inv_factorial(k); });
}

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  return detail::apply_series(a, [&](int k) {
    const std::array<double, 4> cyc{s, c, -s, -c};
    return cyc[static_cast<std::size_t>(k % 4)] * detail::inv_factorial(k);
  });
}

inline Jet cos(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  return detail::apply_series(a, [&](int k) {
    const std::array<double, 4> cyc{c, -s, -c, s};
    return cyc[static_cast<std::size_t>(k % 4)] * detail::inv_factorial(k);
  });
}

inline Jet sinh(const Jet& a) {
  const double s = std::sinh(a.value());
  const double c = std::cosh(a.value());
  return detail::apply_series(a, [&](int k) { return (k % 2 == 0 ? s : c) * detail::inv_factorial(k); });
}

inline Jet cosh(const Jet& a) {
  const double s = std::sinh(a.value());
  const double c = std::cosh(a.value());
  return detail::apply_series(a, [&](int k) { return (k % 2 == 0 ? c : s) * detail::inv_factorial(k); });
}

inline Jet tan(const Jet& a) { return sin(a) / cos(a); }
inline Jet tanh(const Jet& a) { return sinh(a) / cosh(a); }

inline Jet log(const Jet& a) {
  const double a0 = a.value();
  if (a0 <= 0.0) throw std::domain_error("log of non-positive jet");
  return detail::apply_series(a, [&](int k) {
    if (k == 0) return std::log(a0);
    return ((k % 2 == 1) ? 1.0 : -1.0) / (k * std::pow(a0, k));
  });
}

inline Jet sqrt(const Jet& a) {
  if (a.value() < 0.0 || (a.value() == 0.0 && !a.is_constant() && a.order() > 0)) {
    throw std::domain_error("sqrt of non-positive jet");
  }
  if (a.is_constant()) return Jet(std::sqrt(a.value()));
  if (a.order() == 0) return Jet::constant(*a.layout(), std::sqrt(a.value()));
  return pow_real(a, 0.5);
}

inline Jet atan(const Jet& a) {
  const double a0 = a.value();
  return detail::integrate_rational(a, std::atan(a0), 1.0 + a0 * a0, 2.0 * a0, 1.0);
}

inline Jet atanh(const Jet& a) {
  const double a0 = a.value();
  if (std::abs(a0) >= 1.0) throw std::domain_error("atanh outside (-1,1)");
  return detail::integrate_rational(a, std::atanh(a0), 1.0 - a0 * a0, -2.0 * a0, -1.0);
}

// Inverse hyperbolic cotangent for |a| > 1, carrying the sign of a.
inline Jet acoth(const Jet& a) {
  const double a0 = a.value();
  if (std::abs(a0) <= 1.0) throw std::domain_error("acoth inside [-1,1]");
  return detail::integrate_rational(a, 0.5 * std::log((a0 + 1.0) / (a0 - 1.0)), 1.0 - a0 * a0,
                                    -2.0 * a0, -1.0);
}

inline Jet pow(const Jet& a, int n) {
  if (n < 0) return reciprocal(pow(a, -n));
  Jet result(1.0);
  Jet base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

inline Jet abs(const Jet& a) { return a.value() < 0.0 ? -a : a; }

inline double value_of(double x) noexcept { return x; }
inline double value_of(const Jet& x) noexcept { return x.value(); }

inline double acoth(double a) {
  if (std::abs(a) <= 1.0) throw std::domain_error("acoth inside [-1,1]");
  return 0.5 * std::log((a + 1.0) / (a - 1.0));
}

// Seed jets for the chart variables u_0..u_{n-1} at the point u.
inline std::vector<Jet> seed_variables(std::span<const double> u, int order) {
  const JetLayout& L = JetLayout::get(static_cast<int>(u.size()), order);
  std::vector<Jet> vars;
  vars.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) vars.push_back(Jet::variable(L, static_cast<int>(i), u[i]));
  return vars;
}

}  // namespace geocon
