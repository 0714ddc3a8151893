#include "switchcert/poly.hpp"

#include <cstdio>
#include <sstream>

namespace switchcert {

RationalPolynomial to_rational(const Polynomial& p) {
  RationalPolynomial r(p.dimension());
  for (const auto& [e, c] : p.terms()) r.set_coefficient(e, Rational(c));
  return r;
}

Polynomial to_double(const RationalPolynomial& p) {
  Polynomial r(p.dimension());
  for (const auto& [e, c] : p.terms()) r.set_coefficient(e, static_cast<double>(c));
  return r;
}

std::vector<Polynomial> gradient(const Polynomial& p) {
  std::vector<Polynomial> g;
  g.reserve(p.dimension());
  for (int i = 0; i < p.dimension(); ++i) g.push_back(p.derivative(i));
  return g;
}

PolynomialMap::PolynomialMap(std::vector<Polynomial> components) : components_(std::move(components)) {
  const int n = static_cast<int>(components_.size());
  for (const auto& c : components_) {
    require(c.dimension() == n, Error::Code::DimensionMismatch,
            "map components must live in as many variables as there are components");
  }
}

PolynomialMap PolynomialMap::linear(const std::vector<std::vector<double>>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<Polynomial> comps;
  comps.reserve(n);
  for (int i = 0; i < n; ++i) {
    require(static_cast<int>(a[i].size()) == n, Error::Code::DimensionMismatch,
            "linear map matrix must be square");
    Polynomial row(n);
    for (int j = 0; j < n; ++j) {
      if (a[i][j] != 0.0) row.set_coefficient(Exponents::unit(n, j), a[i][j]);
    }
    comps.push_back(std::move(row));
  }
  return PolynomialMap(std::move(comps));
}

PolynomialMap PolynomialMap::identity(int n) {
  std::vector<Polynomial> comps;
  comps.reserve(n);
  for (int i = 0; i < n; ++i) comps.push_back(Polynomial::variable(n, i));
  return PolynomialMap(std::move(comps));
}

bool PolynomialMap::fixes_origin() const {
  for (const auto& c : components_) {
    if (c.coefficient(Exponents::zero(dimension())) != 0.0) return false;
  }
  return true;
}

bool PolynomialMap::is_linear() const {
  for (const auto& c : components_) {
    if (c.degree() > 1) return false;
  }
  return fixes_origin();
}

int PolynomialMap::degree() const {
  int d = -1;
  for (const auto& c : components_) d = std::max(d, c.degree());
  return d;
}

std::vector<double> PolynomialMap::eval(const std::vector<double>& x) const {
  std::vector<double> y(components_.size());
  for (size_t i = 0; i < components_.size(); ++i) y[i] = components_[i].eval(x);
  return y;
}

PolyMatrix::PolyMatrix(int rows, int cols, int n)
    : rows_(rows), cols_(cols), n_(n), entries_(static_cast<size_t>(rows) * cols, Polynomial(n)) {}

void PolyMatrix::set(int i, int j, Polynomial p) {
  require(p.dimension() == n_, Error::Code::DimensionMismatch, "PolyMatrix entry dimension");
  entries_.at(static_cast<size_t>(i) * cols_ + j) = std::move(p);
}

bool PolyMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i) {
    for (int j = i + 1; j < cols_; ++j) {
      if (!(at(i, j) == at(j, i))) return false;
    }
  }
  return true;
}

int PolyMatrix::max_entry_degree() const {
  int d = -1;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

PolyMatrix hessian(const Polynomial& p) {
  const int n = p.dimension();
  PolyMatrix h(n, n, n);
  for (int i = 0; i < n; ++i) {
    const Polynomial di = p.derivative(i);
    for (int j = i; j < n; ++j) {
      Polynomial dij = di.derivative(j);
      if (j != i) h.set(j, i, dij);
      h.set(i, j, std::move(dij));
    }
  }
  return h;
}

SwitchedSystem::SwitchedSystem(int n, std::vector<PolynomialMap> modes)
    : n_(n), modes_(std::move(modes)) {
  require(n_ >= 1, Error::Code::MalformedInput, "system dimension must be >= 1");
  require(!modes_.empty(), Error::Code::MalformedInput, "system needs at least one mode");
  is_linear_ = true;
  for (const auto& m : modes_) {
    require(m.dimension() == n_, Error::Code::DimensionMismatch, "mode dimension mismatch");
    require(m.fixes_origin(), Error::Code::NonzeroConstantTerm, "every mode must fix the origin");
    if (!m.is_linear()) is_linear_ = false;
  }
}

SwitchedSystem SwitchedSystem::from_matrices(const std::vector<std::vector<std::vector<double>>>& mats) {
  require(!mats.empty(), Error::Code::MalformedInput, "empty matrix list");
  std::vector<PolynomialMap> modes;
  modes.reserve(mats.size());
  for (const auto& a : mats) modes.push_back(PolynomialMap::linear(a));
  return SwitchedSystem(static_cast<int>(mats.front().size()), std::move(modes));
}

std::vector<std::vector<std::vector<double>>> SwitchedSystem::mode_matrices() const {
  require(is_linear_, Error::Code::MalformedInput, "mode_matrices requires a linear system");
  std::vector<std::vector<std::vector<double>>> out;
  out.reserve(modes_.size());
  for (const auto& m : modes_) {
    std::vector<std::vector<double>> a(n_, std::vector<double>(n_, 0.0));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) a[i][j] = m.component(i).coefficient(Exponents::unit(n_, j));
    }
    out.push_back(std::move(a));
  }
  return out;
}

namespace {
void enumerate_exact_degree(int n, int d, std::vector<int>& cur, int pos, std::vector<Exponents>& out) {
  if (pos == n - 1) {
    cur[pos] = d;
    out.emplace_back(cur);
    return;
  }
  for (int k = d; k >= 0; --k) {
    cur[pos] = k;
    enumerate_exact_degree(n, d - k, cur, pos + 1, out);
  }
}
}  // namespace

std::vector<Exponents> monomial_basis(int n, int d, bool homogeneous) {
  require(n >= 1, Error::Code::MalformedInput, "monomial_basis: n >= 1");
  require(d >= 0, Error::Code::MalformedInput, "monomial_basis: d >= 0");
  std::vector<Exponents> out;
  std::vector<int> cur(n, 0);
  if (homogeneous) {
    enumerate_exact_degree(n, d, cur, 0, out);
  } else {
    for (int k = 0; k <= d; ++k) enumerate_exact_degree(n, k, cur, 0, out);
  }
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

Polynomial sum_of_squares_of_variables(int n) {
  Polynomial p(n);
  for (int i = 0; i < n; ++i) p.set_coefficient(Exponents::unit(n, i, 2), 1.0);
  return p;
}

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    if (!first) os << (c >= 0 ? " + " : " - ");
    else if (c < 0) os << "-";
    first = false;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", std::abs(c));
    os << buf;
    for (int i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      os << "*x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

}  // namespace switchcert
