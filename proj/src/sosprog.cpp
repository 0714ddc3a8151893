#include "switchcert/sosprog.hpp"

#include <algorithm>
#include <cmath>

namespace switchcert::sos {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "feasible";
    case Verdict::Infeasible: return "infeasible";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

const char* convexity_form_name(ConvexityForm f) {
  switch (f) {
    case ConvexityForm::LambdaHalf: return "lambda";
    case ConvexityForm::Gradient: return "gradient";
    case ConvexityForm::Hessian: return "hessian";
  }
  return "hessian";
}

Polynomial GramCertificate::reconstruction() const {
  const int n = target.dimension();
  Polynomial r(n);
  const int m = static_cast<int>(basis.size());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (gram(i, j) != 0.0) r.add_to_coefficient(basis[i].plus(basis[j]), gram(i, j));
    }
  }
  return r;
}

bool GramCertificate::valid(double residual_tol, double psd_tol) const {
  return residual <= residual_tol * scale() && lambda_min >= -psd_tol * (1 + gram.norm());
}

GramCertificate make_gram_certificate(const Polynomial& target, std::vector<Exponents> basis,
                                      Eigen::MatrixXd gram) {
  GramCertificate cert;
  cert.target = target;
  cert.basis = std::move(basis);
  cert.gram = std::move(gram);
  if (cert.basis.empty()) {
    cert.residual = target.max_abs_coefficient();
    cert.lambda_min = 0.0;
    return cert;
  }
  const Polynomial diff = cert.reconstruction() - target;
  cert.residual = diff.max_abs_coefficient();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.gram, Eigen::EigenvaluesOnly);
  cert.lambda_min = es.eigenvalues().minCoeff();
  return cert;
}

Eigen::MatrixXd MomentCertificate::moment_matrix() const {
  std::map<Exponents, double, GrlexLess> lookup;
  for (size_t i = 0; i < monomials.size(); ++i) lookup[monomials[i]] = values[static_cast<int>(i)];
  const int m = static_cast<int>(basis.size());
  Eigen::MatrixXd h(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      auto it = lookup.find(basis[i].plus(basis[j]));
      h(i, j) = it == lookup.end() ? 0.0 : it->second;
    }
  }
  return h;
}

bool MomentCertificate::valid(double tol) const {
  const double vscale = values.size() > 0 ? values.lpNorm<Eigen::Infinity>() : 0.0;
  return pairing <= -tol && moment_min_eig >= -tol * (1 + vscale);
}

void LinExpr::add(const LinExpr& o, double scale) {
  constant += scale * o.constant;
  std::vector<std::pair<int, double>> merged;
  merged.reserve(terms.size() + o.terms.size());
  size_t a = 0, b = 0;
  while (a < terms.size() || b < o.terms.size()) {
    if (b == o.terms.size() || (a < terms.size() && terms[a].first < o.terms[b].first)) {
      merged.push_back(terms[a++]);
    } else if (a == terms.size() || o.terms[b].first < terms[a].first) {
      merged.emplace_back(o.terms[b].first, scale * o.terms[b].second);
      ++b;
    } else {
      const double v = terms[a].second + scale * o.terms[b].second;
      if (v != 0.0) merged.emplace_back(terms[a].first, v);
      ++a;
      ++b;
    }
  }
  terms = std::move(merged);
}

LinExpr LinExpr::scaled(double s) const {
  LinExpr r;
  if (s == 0.0) return r;
  r.constant = constant * s;
  r.terms = terms;
  for (auto& [id, v] : r.terms) v *= s;
  return r;
}

double LinExpr::eval(const std::vector<double>& values) const {
  double r = constant;
  for (const auto& [id, v] : terms) r += v * values.at(id);
  return r;
}

namespace {
bool expr_is_zero(const LinExpr& e) { return e.constant == 0.0 && e.terms.empty(); }
}  // namespace

LinPoly::LinPoly(const Polynomial& p) : n_(p.dimension()) {
  for (const auto& [e, c] : p.terms()) coeffs_[e] = LinExpr::of_constant(c);
}

int LinPoly::structural_degree() const {
  int d = -1;
  for (const auto& [e, c] : coeffs_) d = std::max(d, e.total_degree());
  return d;
}

bool LinPoly::structurally_homogeneous() const {
  if (coeffs_.empty()) return true;
  const int d = coeffs_.begin()->first.total_degree();
  for (const auto& [e, c] : coeffs_) {
    if (e.total_degree() != d) return false;
  }
  return true;
}

void LinPoly::add_term(const Exponents& e, const LinExpr& c) {
  require(e.size() == n_, Error::Code::DimensionMismatch, "LinPoly term dimension");
  auto it = coeffs_.find(e);
  if (it == coeffs_.end()) {
    if (!expr_is_zero(c)) coeffs_[e] = c;
  } else {
    it->second.add(c);
    if (expr_is_zero(it->second)) coeffs_.erase(it);
  }
}

LinPoly LinPoly::operator+(const LinPoly& o) const {
  require(n_ == o.n_, Error::Code::DimensionMismatch, "LinPoly dimension mismatch");
  LinPoly r = *this;
  for (const auto& [e, c] : o.coeffs_) r.add_term(e, c);
  return r;
}

LinPoly LinPoly::operator-(const LinPoly& o) const {
  require(n_ == o.n_, Error::Code::DimensionMismatch, "LinPoly dimension mismatch");
  LinPoly r = *this;
  for (const auto& [e, c] : o.coeffs_) r.add_term(e, c.scaled(-1.0));
  return r;
}

LinPoly LinPoly::scaled(double s) const {
  LinPoly r(n_);
  if (s == 0.0) return r;
  for (const auto& [e, c] : coeffs_) r.coeffs_[e] = c.scaled(s);
  return r;
}

LinPoly LinPoly::times(const Polynomial& p) const {
  require(n_ == p.dimension(), Error::Code::DimensionMismatch, "LinPoly times dimension");
  LinPoly r(n_);
  for (const auto& [e, c] : coeffs_) {
    for (const auto& [pe, pc] : p.terms()) {
      r.add_term(e.plus(pe), c.scaled(pc));
    }
  }
  return r;
}

LinPoly LinPoly::derivative(int var) const {
  LinPoly r(n_);
  for (const auto& [e, c] : coeffs_) {
    if (e[var] == 0) continue;
    Exponents de = e;
    de.e[var] -= 1;
    r.add_term(de, c.scaled(e[var]));
  }
  return r;
}

LinPoly LinPoly::compose(const std::vector<Polynomial>& f) const {
  require(static_cast<int>(f.size()) == n_, Error::Code::DimensionMismatch,
          "LinPoly compose component count");
  const int m = f.empty() ? 0 : f.front().dimension();
  LinPoly r(m);
  for (const auto& [e, c] : coeffs_) {
    Polynomial mono = Polynomial::constant(m, 1.0);
    for (int i = 0; i < n_; ++i) {
      if (e[i] > 0) mono = mono * f[i].pow(e[i]);
    }
    for (const auto& [me, mc] : mono.terms()) r.add_term(me, c.scaled(mc));
  }
  return r;
}

LinPoly LinPoly::lifted(int extra) const {
  LinPoly r(n_ + extra);
  const Exponents pad = Exponents::zero(extra);
  for (const auto& [e, c] : coeffs_) r.coeffs_[e.concat(pad)] = c;
  return r;
}

LinPoly SosProgram::new_free_poly(int n, const std::vector<Exponents>& support) {
  std::vector<Exponents> sorted = support;
  std::sort(sorted.begin(), sorted.end(), GrlexLess{});
  LinPoly p(n);
  for (const auto& e : sorted) {
    require(e.size() == n, Error::Code::DimensionMismatch, "support exponent dimension");
    const int id = num_vars();
    var_kinds_.push_back({VarKind::Free, -1, -1, -1, num_free_++});
    p.add_term(e, LinExpr::of_var(id));
  }
  return p;
}

LinExpr SosProgram::new_free_scalar() {
  const int id = num_vars();
  var_kinds_.push_back({VarKind::Free, -1, -1, -1, num_free_++});
  return LinExpr::of_var(id);
}

int SosProgram::new_gram_block(int n, std::vector<Exponents> basis) {
  require(!basis.empty(), Error::Code::MalformedInput, "empty gram basis");
  const int block = static_cast<int>(blocks_.size());
  GramBlock gb;
  gb.n = n;
  gb.basis = std::move(basis);
  gb.first_var = num_vars();
  const int m = static_cast<int>(gb.basis.size());
  for (int j = 0; j < m; ++j) {
    for (int i = j; i < m; ++i) {
      var_kinds_.push_back({VarKind::Gram, block, i, j, -1});
    }
  }
  blocks_.push_back(std::move(gb));
  return block;
}

LinPoly SosProgram::gram_poly(int block) const {
  const GramBlock& gb = blocks_[block];
  const int m = static_cast<int>(gb.basis.size());
  LinPoly p(gb.n);
  int var = gb.first_var;
  for (int j = 0; j < m; ++j) {
    for (int i = j; i < m; ++i, ++var) {
      p.add_term(gb.basis[i].plus(gb.basis[j]), LinExpr::of_var(var, i == j ? 1.0 : 2.0));
    }
  }
  return p;
}

LinPoly SosProgram::new_sos_poly(int n, const std::vector<Exponents>& gram_basis) {
  std::vector<Exponents> sorted = gram_basis;
  std::sort(sorted.begin(), sorted.end(), GrlexLess{});
  return gram_poly(new_gram_block(n, std::move(sorted)));
}

void SosProgram::require_zero(const LinPoly& expr) {
  for (const auto& [e, c] : expr.coeffs()) {
    Row row;
    row.lin = c.terms;
    row.rhs = -c.constant;
    rows_.push_back(std::move(row));
  }
}

void SosProgram::emit_identity_rows(const LinPoly& diff, int block, const LinPoly& expr,
                                    SosGroup* group) {
  group->block = block;
  group->expr = expr;
  group->first_row = static_cast<int>(rows_.size());
  for (const auto& [e, c] : diff.coeffs()) {
    Row row;
    row.lin = c.terms;
    row.rhs = -c.constant;
    rows_.push_back(std::move(row));
    group->row_monomials.push_back(e);
  }
  group->num_rows = static_cast<int>(rows_.size()) - group->first_row;
}

int SosProgram::require_sos(const LinPoly& expr) {
  SosGroup group;
  if (expr.structurally_zero()) {
    group.block = -1;
    groups_.push_back(std::move(group));
    return static_cast<int>(groups_.size()) - 1;
  }
  const int d = expr.structural_degree();
  const bool homog = expr.structurally_homogeneous() && d % 2 == 0;
  const int half = (d + 1) / 2;
  const int block = new_gram_block(expr.dimension(),
                                   monomial_basis(expr.dimension(), homog ? d / 2 : half, homog));
  emit_identity_rows(gram_poly(block) - expr, block, expr, &group);
  groups_.push_back(std::move(group));
  return static_cast<int>(groups_.size()) - 1;
}

int SosProgram::require_sos_matrix(const std::vector<std::vector<LinPoly>>& m) {
  const int r = static_cast<int>(m.size());
  require(r >= 1, Error::Code::MalformedInput, "empty matrix");
  const int n = m[0][0].dimension();
  for (const auto& row : m) {
    require(static_cast<int>(row.size()) == r, Error::Code::NotSymmetric, "matrix not square");
  }
  // Structural symmetry (coefficient maps must match exactly).
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      const auto& a = m[i][j].coeffs();
      const auto& b = m[j][i].coeffs();
      bool same = a.size() == b.size();
      if (same) {
        auto ita = a.begin();
        auto itb = b.begin();
        for (; ita != a.end(); ++ita, ++itb) {
          if (!(ita->first == itb->first) || ita->second.constant != itb->second.constant ||
              ita->second.terms != itb->second.terms) {
            same = false;
            break;
          }
        }
      }
      require(same, Error::Code::NotSymmetric, "matrix entries are not symmetric");
    }
  }

  // Scalarize y' M(x) y over (x, y).
  LinPoly scalarized(n + r);
  int dmax = -1;
  bool homog = true;
  int homog_deg = -1;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const int d = m[i][j].structural_degree();
      dmax = std::max(dmax, d);
      if (d >= 0) {
        if (!m[i][j].structurally_homogeneous()) homog = false;
        if (homog_deg < 0) homog_deg = d;
        else if (homog_deg != d) homog = false;
      }
    }
  }
  for (int i = 0; i < r; ++i) {
    for (int j = i; j < r; ++j) {
      const double f = (i == j) ? 1.0 : 2.0;
      Exponents ye = Exponents::zero(r);
      ye.e[i] += 1;
      ye.e[j] += 1;
      for (const auto& [e, c] : m[i][j].coeffs()) {
        scalarized.add_term(e.concat(ye), c.scaled(f));
      }
    }
  }

  SosGroup group;
  if (scalarized.structurally_zero()) {
    group.block = -1;
    groups_.push_back(std::move(group));
    return static_cast<int>(groups_.size()) - 1;
  }

  require(dmax % 2 == 0 || !homog, Error::Code::Internal, "odd-degree homogeneous sos matrix");
  const std::vector<Exponents> xbasis =
      monomial_basis(n, homog ? dmax / 2 : (dmax + 1) / 2, homog && dmax % 2 == 0);
  std::vector<Exponents> basis;
  basis.reserve(static_cast<size_t>(r) * xbasis.size());
  for (int i = 0; i < r; ++i) {
    for (const auto& xe : xbasis) basis.push_back(xe.concat(Exponents::unit(r, i)));
  }
  const int block = new_gram_block(n + r, std::move(basis));
  emit_identity_rows(gram_poly(block) - scalarized, block, scalarized, &group);
  groups_.push_back(std::move(group));
  return static_cast<int>(groups_.size()) - 1;
}

void SosProgram::require_linear(const LinExpr& e, double rhs) {
  Row row;
  row.lin = e.terms;
  row.rhs = rhs - e.constant;
  rows_.push_back(std::move(row));
}

void SosProgram::minimize(const LinExpr& objective) {
  objective_ = objective.terms;
}

Polynomial SosProgram::instantiate(const LinPoly& expr, const std::vector<double>& values) const {
  Polynomial p(expr.dimension());
  for (const auto& [e, c] : expr.coeffs()) p.add_to_coefficient(e, c.eval(values));
  return p;
}

SosSolution SosProgram::solve(const SosOptions& opts) const {
  SosSolution out;

  std::vector<int> dims;
  dims.reserve(blocks_.size());
  for (const auto& gb : blocks_) dims.push_back(static_cast<int>(gb.basis.size()));
  sdp::Problem prob(dims, num_free_);

  auto emit = [&](int row, int var, double coeff) {
    const VarInfo& vi = var_kinds_[var];
    if (vi.kind == VarKind::Free) {
      if (row < 0) prob.add_free_objective(vi.free_index, coeff);
      else prob.add_free_entry(row, vi.free_index, coeff);
    } else {
      const double v = vi.i == vi.j ? coeff : coeff / 2.0;
      if (row < 0) prob.add_objective_entry(vi.block, vi.i, vi.j, v);
      else prob.add_entry(row, vi.block, vi.i, vi.j, v);
    }
  };

  for (const auto& [var, coeff] : objective_) emit(-1, var, coeff);
  for (const auto& row : rows_) {
    const int r = prob.add_constraint(row.rhs);
    for (const auto& [var, coeff] : row.lin) emit(r, var, coeff);
  }

  sdp::Solution sol;
  try {
    sol = sdp::solve(prob, opts.solver, opts.elim_cache);
  } catch (const Error& e) {
    if (e.code() == Error::Code::IllConditioned) {
      out.verdict = Verdict::Unknown;
      out.solver_status = sdp::Status::Stalled;
      out.note = e.what();
      return out;
    }
    throw;
  }
  out.solver_status = sol.status;

  auto extract_values = [&]() {
    std::vector<double> values(var_kinds_.size(), 0.0);
    for (size_t v = 0; v < var_kinds_.size(); ++v) {
      const VarInfo& vi = var_kinds_[v];
      values[v] = vi.kind == VarKind::Free ? sol.free_values[vi.free_index]
                                           : sol.X[vi.block](vi.i, vi.j);
    }
    return values;
  };

  auto build_certificates = [&](const std::vector<double>& values) {
    bool all_valid = true;
    out.constraint_certs.clear();
    for (const auto& g : groups_) {
      if (g.block < 0) {
        GramCertificate trivial;
        trivial.target = Polynomial::zero(g.expr.dimension() > 0 ? g.expr.dimension() : 1);
        out.constraint_certs.push_back(std::move(trivial));
        continue;
      }
      GramCertificate cert = make_gram_certificate(instantiate(g.expr, values),
                                                   blocks_[g.block].basis, sol.X[g.block]);
      if (!cert.valid(opts.residual_tol, opts.psd_tol)) all_valid = false;
      out.constraint_certs.push_back(std::move(cert));
    }
    return all_valid;
  };

  auto rows_satisfied = [&](const std::vector<double>& values) {
    for (const auto& row : rows_) {
      double lhs = 0, mag = 0;
      for (const auto& [var, coeff] : row.lin) {
        lhs += coeff * values[var];
        mag += std::abs(coeff * values[var]);
      }
      if (std::abs(lhs - row.rhs) > 1e-6 * (1 + std::abs(row.rhs) + mag)) return false;
    }
    return true;
  };

  switch (sol.status) {
    case sdp::Status::Optimal: {
      out.var_values = extract_values();
      out.objective = sol.primal_obj;
      if (build_certificates(out.var_values)) {
        out.verdict = Verdict::Feasible;
      } else {
        out.verdict = Verdict::Unknown;
        out.note = "solver reported optimal but a certificate failed verification";
      }
      break;
    }
    case sdp::Status::Stalled: {
      // A stalled iterate can still carry a verifiable certificate.
      if (!sol.X.empty()) {
        out.var_values = extract_values();
        out.objective = sol.primal_obj;
        if (build_certificates(out.var_values) && rows_satisfied(out.var_values)) {
          out.verdict = Verdict::Feasible;
          out.note = "certificates recovered from a stalled iterate";
          break;
        }
      }
      out.verdict = Verdict::Unknown;
      out.note = "solver stalled";
      out.constraint_certs.clear();
      break;
    }
    case sdp::Status::PrimalInfeasible: {
      out.verdict = Verdict::Infeasible;
      // A separating functional is recovered when a single sos group defines
      // the program (the plain decomposition checks).
      if (groups_.size() == 1 && groups_[0].block >= 0 && num_free_ == 0) {
        const SosGroup& g = groups_[0];
        MomentCertificate mc;
        mc.monomials = g.row_monomials;
        mc.values = -sol.infeasibility_ray.segment(g.first_row, g.num_rows);
        mc.basis = blocks_[g.block].basis;
        double pairing = 0;
        const Polynomial target = instantiate(g.expr, {});
        for (int t = 0; t < g.num_rows; ++t) {
          pairing += mc.values[t] * target.coefficient(g.row_monomials[t]);
        }
        mc.pairing = pairing;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mc.moment_matrix(),
                                                          Eigen::EigenvaluesOnly);
        mc.moment_min_eig = es.eigenvalues().minCoeff();
        if (mc.valid()) {
          out.refutation = std::move(mc);
        } else {
          out.verdict = Verdict::Unknown;
          out.note = "infeasibility ray failed verification";
        }
      }
      break;
    }
    case sdp::Status::DualInfeasible: {
      out.verdict = Verdict::Unknown;
      out.note = "objective unbounded (dual infeasible)";
      break;
    }
  }
  return out;
}

CheckResult<GramCertificate> check_sos(const Polynomial& p, const SosOptions& opts) {
  require(p.is_zero() || p.degree() % 2 == 0, Error::Code::OddDegree,
          "sos check requires even degree");
  CheckResult<GramCertificate> out;

  SosProgram prog;
  const int g = prog.require_sos(LinPoly(p));
  SosSolution sol = prog.solve(opts);
  out.verdict = sol.verdict;
  out.solver_status = sol.solver_status;
  out.note = sol.note;
  if (sol.verdict == Verdict::Feasible) out.certificate = std::move(sol.constraint_certs[g]);
  if (sol.refutation.has_value()) out.refutation = std::move(sol.refutation);
  return out;
}

CheckResult<MatrixSosCertificate> check_sos_matrix(const PolyMatrix& m, const SosOptions& opts) {
  require(m.rows() == m.cols(), Error::Code::NotSymmetric, "matrix must be square");
  require(m.is_symmetric(), Error::Code::NotSymmetric, "matrix must be symmetric");
  CheckResult<MatrixSosCertificate> out;

  std::vector<std::vector<LinPoly>> grid(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) grid[i].emplace_back(m.at(i, j));
  }
  SosProgram prog;
  const int g = prog.require_sos_matrix(grid);
  SosSolution sol = prog.solve(opts);
  out.verdict = sol.verdict;
  out.solver_status = sol.solver_status;
  out.note = sol.note;
  if (sol.verdict == Verdict::Feasible) {
    out.certificate = MatrixSosCertificate{m.rows(), std::move(sol.constraint_certs[g])};
  }
  if (sol.refutation.has_value()) out.refutation = std::move(sol.refutation);
  return out;
}

Polynomial convexity_witness_polynomial(const Polynomial& p, ConvexityForm form) {
  const int n = p.dimension();
  // Variables: x at 0..n-1, y at n..2n-1.
  auto embed_x = [&](const Polynomial& q) { return q.lifted(n); };
  auto embed_y = [&](const Polynomial& q) {
    Polynomial r(2 * n);
    for (const auto& [e, c] : q.terms()) {
      r.set_coefficient(Exponents::zero(n).concat(e), c);
    }
    return r;
  };

  switch (form) {
    case ConvexityForm::LambdaHalf: {
      std::vector<Polynomial> mid;
      for (int i = 0; i < n; ++i) {
        Polynomial m(2 * n);
        m.set_coefficient(Exponents::unit(2 * n, i), 0.5);
        m.set_coefficient(Exponents::unit(2 * n, n + i), 0.5);
        mid.push_back(std::move(m));
      }
      return embed_x(p).scaled(0.5) + embed_y(p).scaled(0.5) - p.compose(mid);
    }
    case ConvexityForm::Gradient: {
      Polynomial out = embed_y(p) - embed_x(p);
      for (int i = 0; i < n; ++i) {
        Polynomial yi_minus_xi(2 * n);
        yi_minus_xi.set_coefficient(Exponents::unit(2 * n, n + i), 1.0);
        yi_minus_xi.set_coefficient(Exponents::unit(2 * n, i), -1.0);
        out = out - embed_x(p.derivative(i)) * yi_minus_xi;
      }
      return out;
    }
    case ConvexityForm::Hessian: {
      const PolyMatrix h = hessian(p);
      Polynomial out(2 * n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          Polynomial yiyj(2 * n);
          Exponents e = Exponents::zero(2 * n);
          e.e[n + i] += 1;
          e.e[n + j] += 1;
          yiyj.set_coefficient(e, 1.0);
          out = out + embed_x(h.at(i, j)) * yiyj;
        }
      }
      return out;
    }
  }
  return Polynomial::zero(2 * n);
}

CheckResult<SosConvexityCertificate> check_sosconvex(const Polynomial& p, ConvexityForm form,
                                                     const SosOptions& opts) {
  require(p.is_zero() || p.degree() % 2 == 0, Error::Code::OddDegree,
          "sos-convexity check requires even degree");
  CheckResult<SosConvexityCertificate> out;

  if (form == ConvexityForm::Hessian) {
    auto res = check_sos_matrix(hessian(p), opts);
    out.verdict = res.verdict;
    out.solver_status = res.solver_status;
    out.note = std::move(res.note);
    if (res.certificate.has_value()) {
      out.certificate =
          SosConvexityCertificate{p, form, std::move(res.certificate->scalarized)};
    }
    out.refutation = std::move(res.refutation);
    return out;
  }

  auto res = check_sos(convexity_witness_polynomial(p, form), opts);
  out.verdict = res.verdict;
  out.solver_status = res.solver_status;
  out.note = std::move(res.note);
  if (res.certificate.has_value()) {
    out.certificate = SosConvexityCertificate{p, form, std::move(*res.certificate)};
  }
  out.refutation = std::move(res.refutation);
  return out;
}

}  // namespace switchcert::sos
