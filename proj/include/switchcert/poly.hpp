#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "switchcert/error.hpp"

namespace switchcert {

/// Exact rational scalar used by verification paths. Every double converts
/// exactly, so residuals computed in this mode are free of rounding.
using Rational = boost::multiprecision::cpp_rational;

/// Per-variable nonnegative integer powers of one monomial.
struct Exponents {
  std::vector<int> e;

  Exponents() = default;
  explicit Exponents(std::vector<int> powers) : e(std::move(powers)) {
    for (int p : e) require(p >= 0, Error::Code::MalformedInput, "negative exponent");
  }
  static Exponents zero(int n) { return Exponents(std::vector<int>(n, 0)); }
  static Exponents unit(int n, int i, int power = 1) {
    std::vector<int> v(n, 0);
    v.at(i) = power;
    return Exponents(std::move(v));
  }

  int size() const { return static_cast<int>(e.size()); }
  int operator[](int i) const { return e[i]; }
  int total_degree() const { return std::accumulate(e.begin(), e.end(), 0); }
  bool is_zero() const { return total_degree() == 0; }

  Exponents plus(const Exponents& o) const {
    Exponents r = *this;
    for (size_t i = 0; i < e.size(); ++i) r.e[i] += o.e[i];
    return r;
  }

  /// Concatenate with another exponent pack (used when adjoining variables).
  Exponents concat(const Exponents& o) const {
    Exponents r = *this;
    r.e.insert(r.e.end(), o.e.begin(), o.e.end());
    return r;
  }

  bool operator==(const Exponents& o) const { return e == o.e; }
  bool operator!=(const Exponents& o) const { return e != o.e; }
};

/// Graded lexicographic order: lower total degree first; within a degree,
/// larger power on the earliest variable first (so x1^2 precedes x1*x2
/// precedes x2^2).
struct GrlexLess {
  bool operator()(const Exponents& a, const Exponents& b) const {
    const int da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db;
    for (int i = 0; i < std::min(a.size(), b.size()); ++i) {
      if (a.e[i] != b.e[i]) return a.e[i] > b.e[i];
    }
    return a.size() < b.size();
  }
};

namespace detail {
inline bool scalar_is_zero(double c) { return c == 0.0; }
inline bool scalar_is_zero(const Rational& c) { return c.is_zero(); }
inline double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}
inline Rational ipow(const Rational& x, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}
}  // namespace detail

/// Sparse multivariate polynomial with scalar coefficients of type S.
/// Terms are kept in graded lexicographic order; zero coefficients are
/// never stored; the zero polynomial has degree -1.
template <class S>
class BasicPolynomial {
 public:
  using TermMap = std::map<Exponents, S, GrlexLess>;

  BasicPolynomial() = default;
  explicit BasicPolynomial(int n) : n_(n) {
    require(n >= 0, Error::Code::MalformedInput, "negative dimension");
  }

  static BasicPolynomial zero(int n) { return BasicPolynomial(n); }
  static BasicPolynomial constant(int n, const S& c) {
    BasicPolynomial p(n);
    p.set_coefficient(Exponents::zero(n), c);
    return p;
  }
  static BasicPolynomial monomial(const Exponents& e, const S& c) {
    BasicPolynomial p(e.size());
    p.set_coefficient(e, c);
    return p;
  }
  static BasicPolynomial variable(int n, int i) {
    return monomial(Exponents::unit(n, i), S(1));
  }

  int dimension() const { return n_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  int term_count() const { return static_cast<int>(terms_.size()); }

  /// Max total degree of stored terms; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.total_degree());
    return d;
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    const int d = terms_.begin()->first.total_degree();
    for (const auto& [e, c] : terms_) {
      if (e.total_degree() != d) return false;
    }
    return true;
  }

  S coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? S(0) : it->second;
  }

  void set_coefficient(const Exponents& e, const S& c) {
    require(e.size() == n_, Error::Code::DimensionMismatch, "exponent length != dimension");
    if (detail::scalar_is_zero(c)) {
      terms_.erase(e);
    } else {
      terms_[e] = c;
    }
  }

  void add_to_coefficient(const Exponents& e, const S& c) {
    require(e.size() == n_, Error::Code::DimensionMismatch, "exponent length != dimension");
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (!detail::scalar_is_zero(c)) terms_.emplace(e, c);
    } else {
      it->second += c;
      if (detail::scalar_is_zero(it->second)) terms_.erase(it);
    }
  }

  /// Plain term-by-term evaluation.
  template <class Point>
  S eval(const Point& x) const {
    require(static_cast<int>(x.size()) == n_, Error::Code::DimensionMismatch,
            "point dimension mismatch in eval");
    S total(0);
    for (const auto& [e, c] : terms_) {
      S m = c;
      for (int i = 0; i < n_; ++i) {
        if (e[i] != 0) m *= detail::ipow(S(x[static_cast<size_t>(i)]), e[i]);
      }
      total += m;
    }
    return total;
  }

  BasicPolynomial operator+(const BasicPolynomial& o) const {
    check_same_dim(o);
    BasicPolynomial r = *this;
    for (const auto& [e, c] : o.terms_) r.add_to_coefficient(e, c);
    return r;
  }

  BasicPolynomial operator-(const BasicPolynomial& o) const {
    check_same_dim(o);
    BasicPolynomial r = *this;
    for (const auto& [e, c] : o.terms_) r.add_to_coefficient(e, S(-c));
    return r;
  }

  BasicPolynomial operator-() const { return scaled(S(-1)); }

  BasicPolynomial operator*(const BasicPolynomial& o) const {
    check_same_dim(o);
    BasicPolynomial r(n_);
    for (const auto& [ea, ca] : terms_) {
      for (const auto& [eb, cb] : o.terms_) {
        r.add_to_coefficient(ea.plus(eb), ca * cb);
      }
    }
    return r;
  }

  BasicPolynomial scaled(const S& c) const {
    BasicPolynomial r(n_);
    if (detail::scalar_is_zero(c)) return r;
    for (const auto& [e, v] : terms_) r.terms_[e] = v * c;
    return r;
  }

  BasicPolynomial pow(int k) const {
    require(k >= 0, Error::Code::MalformedInput, "negative power");
    BasicPolynomial r = constant(n_, S(1));
    BasicPolynomial base = *this;
    while (k > 0) {
      if (k & 1) r = r * base;
      base = (k >>= 1) ? base * base : base;
    }
    return r;
  }

  BasicPolynomial derivative(int var) const {
    require(var >= 0 && var < n_, Error::Code::DimensionMismatch, "derivative variable index");
    BasicPolynomial r(n_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponents de = e;
      de.e[var] -= 1;
      r.add_to_coefficient(de, c * S(e[var]));
    }
    return r;
  }

  /// Full expansion of p(f_1, ..., f_n). Every f_i must share one ambient
  /// dimension, which becomes the dimension of the result.
  BasicPolynomial compose(const std::vector<BasicPolynomial>& f) const {
    require(static_cast<int>(f.size()) == n_, Error::Code::DimensionMismatch,
            "compose: component count != dimension");
    const int m = f.empty() ? 0 : f.front().dimension();
    for (const auto& fi : f) {
      require(fi.dimension() == m, Error::Code::DimensionMismatch,
              "compose: mixed component dimensions");
    }
    // Cache powers of each component as they are needed.
    std::vector<std::vector<BasicPolynomial>> powers(f.size());
    auto power_of = [&](int i, int k) -> const BasicPolynomial& {
      auto& cache = powers[i];
      if (cache.empty()) cache.push_back(constant(m, S(1)));
      while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * f[i]);
      return cache[k];
    };
    BasicPolynomial r(m);
    for (const auto& [e, c] : terms_) {
      BasicPolynomial term = constant(m, c);
      for (int i = 0; i < n_; ++i) {
        if (e[i] != 0) term = term * power_of(i, e[i]);
      }
      r = r + term;
    }
    return r;
  }

  /// Adjoin `extra` trailing variables that the polynomial does not use.
  BasicPolynomial lifted(int extra) const {
    require(extra >= 0, Error::Code::MalformedInput, "negative lift");
    BasicPolynomial r(n_ + extra);
    const Exponents pad = Exponents::zero(extra);
    for (const auto& [e, c] : terms_) r.terms_[e.concat(pad)] = c;
    return r;
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(static_cast<double>(c)));
    return m;
  }

  bool operator==(const BasicPolynomial& o) const {
    return n_ == o.n_ && terms_ == o.terms_;
  }

 private:
  void check_same_dim(const BasicPolynomial& o) const {
    require(n_ == o.n_, Error::Code::DimensionMismatch, "polynomial dimension mismatch");
  }

  int n_ = 0;
  TermMap terms_;
};

using Polynomial = BasicPolynomial<double>;
using RationalPolynomial = BasicPolynomial<Rational>;

/// Exact conversion; every double is a rational.
RationalPolynomial to_rational(const Polynomial& p);
Polynomial to_double(const RationalPolynomial& p);

std::vector<Polynomial> gradient(const Polynomial& p);

/// n polynomial components in n variables; the carrier for one mode map.
class PolynomialMap {
 public:
  PolynomialMap() = default;
  explicit PolynomialMap(std::vector<Polynomial> components);

  /// Linear map x -> A x given by a dense row-major square matrix.
  static PolynomialMap linear(const std::vector<std::vector<double>>& a);
  static PolynomialMap identity(int n);

  int dimension() const { return static_cast<int>(components_.size()); }
  const Polynomial& component(int i) const { return components_.at(i); }
  const std::vector<Polynomial>& components() const { return components_; }

  bool fixes_origin() const;
  bool is_linear() const;
  int degree() const;

  std::vector<double> eval(const std::vector<double>& x) const;

 private:
  std::vector<Polynomial> components_;
};

/// Dense grid of polynomials sharing one ambient dimension.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(int rows, int cols, int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dimension() const { return n_; }
  const Polynomial& at(int i, int j) const { return entries_.at(static_cast<size_t>(i) * cols_ + j); }
  void set(int i, int j, Polynomial p);

  bool is_symmetric() const;
  int max_entry_degree() const;

 private:
  int rows_ = 0, cols_ = 0, n_ = 0;
  std::vector<Polynomial> entries_;
};

PolyMatrix hessian(const Polynomial& p);

/// Discrete-time difference inclusion: the state update is chosen each step
/// from the convex hull of the listed mode maps. Every mode fixes the origin.
class SwitchedSystem {
 public:
  SwitchedSystem(int n, std::vector<PolynomialMap> modes);

  static SwitchedSystem from_matrices(const std::vector<std::vector<std::vector<double>>>& mats);

  int dimension() const { return n_; }
  int num_modes() const { return static_cast<int>(modes_.size()); }
  const PolynomialMap& mode(int i) const { return modes_.at(i); }
  const std::vector<PolynomialMap>& modes() const { return modes_; }
  bool is_linear() const { return is_linear_; }

  /// Dense matrices of the modes; only valid when is_linear().
  std::vector<std::vector<std::vector<double>>> mode_matrices() const;

 private:
  int n_ = 0;
  std::vector<PolynomialMap> modes_;
  bool is_linear_ = false;
};

/// All exponent vectors in n variables of total degree == d (homogeneous)
/// or <= d, in graded lexicographic order.
std::vector<Exponents> monomial_basis(int n, int d, bool homogeneous);

/// x1^2 + ... + xn^2.
Polynomial sum_of_squares_of_variables(int n);

/// Compact display form, mostly for logs and error messages.
std::string to_string(const Polynomial& p);

}  // namespace switchcert
