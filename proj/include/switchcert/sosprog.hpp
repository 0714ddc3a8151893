#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchcert/poly.hpp"
#include "switchcert/sdp.hpp"

namespace switchcert::sos {

enum class Verdict { Feasible, Infeasible, Unknown };

const char* verdict_name(Verdict v);

/// Proof object for "p is a sum of squares": p = z'Qz over the stored
/// monomial basis with Q psd up to tolerance.
struct GramCertificate {
  Polynomial target;
  std::vector<Exponents> basis;
  Eigen::MatrixXd gram;
  double residual = 0;    // max |coeff(target - z'Qz)|
  double lambda_min = 0;  // smallest eigenvalue of gram

  double scale() const { return 1.0 + target.max_abs_coefficient(); }
  Polynomial reconstruction() const;
  bool valid(double residual_tol = 1e-6, double psd_tol = 1e-8) const;
};

/// Builds a certificate and fills in residual and lambda_min.
GramCertificate make_gram_certificate(const Polynomial& target,
                                      std::vector<Exponents> basis,
                                      Eigen::MatrixXd gram);

/// Separating functional refuting an sos decomposition: nonnegative on the
/// square cone over `basis` (its moment matrix is psd up to tolerance) while
/// pairing strictly negatively with the target polynomial.
struct MomentCertificate {
  std::vector<Exponents> monomials;
  Eigen::VectorXd values;  // L(monomial)
  std::vector<Exponents> basis;
  double pairing = 0;         // L(target), negative
  double moment_min_eig = 0;  // lambda_min of [L(z_i z_j)]

  Eigen::MatrixXd moment_matrix() const;
  bool valid(double tol = 1e-7) const;
};

/// Certificate that a symmetric polynomial matrix M(x) factors as an sos
/// matrix, carried by a Gram certificate for y'M(x)y over a basis bilinear
/// in the scalarization variables y.
struct MatrixSosCertificate {
  int matrix_dim = 0;  // number of scalarization variables
  GramCertificate scalarized;
};

enum class ConvexityForm { LambdaHalf, Gradient, Hessian };

const char* convexity_form_name(ConvexityForm f);

struct SosConvexityCertificate {
  Polynomial target;
  ConvexityForm form = ConvexityForm::Hessian;
  GramCertificate gram;  // certificate for the form's sos object
};

template <class Cert>
struct CheckResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<Cert> certificate;
  std::optional<MomentCertificate> refutation;
  sdp::Status solver_status = sdp::Status::Stalled;
  std::string note;

  bool feasible() const { return verdict == Verdict::Feasible; }
  bool infeasible() const { return verdict == Verdict::Infeasible; }
};

/// Affine expression c0 + sum coeff_i * var_i over scalar decision variables.
struct LinExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;  // sorted by variable id

  static LinExpr of_constant(double c) { return LinExpr{c, {}}; }
  static LinExpr of_var(int id, double coeff = 1.0) { return LinExpr{0.0, {{id, coeff}}}; }

  bool is_constant() const { return terms.empty(); }
  void add(const LinExpr& o, double scale = 1.0);
  LinExpr scaled(double s) const;
  double eval(const std::vector<double>& values) const;
};

/// Polynomial whose coefficients are affine in the decision variables.
class LinPoly {
 public:
  using CoeffMap = std::map<Exponents, LinExpr, GrlexLess>;

  LinPoly() = default;
  explicit LinPoly(int n) : n_(n) {}
  LinPoly(const Polynomial& p);  // implicit lift of a concrete polynomial

  int dimension() const { return n_; }
  const CoeffMap& coeffs() const { return coeffs_; }
  bool structurally_zero() const { return coeffs_.empty(); }
  int structural_degree() const;
  bool structurally_homogeneous() const;

  void add_term(const Exponents& e, const LinExpr& c);

  LinPoly operator+(const LinPoly& o) const;
  LinPoly operator-(const LinPoly& o) const;
  LinPoly scaled(double s) const;
  LinPoly times(const Polynomial& p) const;
  LinPoly derivative(int var) const;
  /// Substitute concrete component polynomials for the variables.
  LinPoly compose(const std::vector<Polynomial>& f) const;
  /// Adjoin trailing unused variables.
  LinPoly lifted(int extra) const;

 private:
  int n_ = 0;
  CoeffMap coeffs_;
};

struct SosOptions {
  sdp::SolveOptions solver;
  double residual_tol = 1e-7;  // scaled by certificate scale
  double psd_tol = 1e-8;       // scaled
  sdp::FreeEliminationCache* elim_cache = nullptr;
};

struct SosSolution {
  Verdict verdict = Verdict::Unknown;
  sdp::Status solver_status = sdp::Status::Stalled;
  std::string note;
  std::vector<double> var_values;
  std::vector<GramCertificate> constraint_certs;  // one per require_sos*, in order
  std::optional<MomentCertificate> refutation;    // from the first sos group
  double objective = 0.0;
};

/// Assembles sum-of-squares feasibility programs with unknown-coefficient
/// polynomials and compiles them to one block-diagonal SDP. Constraint
/// polynomials must stay affine in the unknowns: LinPoly can be multiplied
/// by concrete polynomials only, which enforces that by construction.
class SosProgram {
 public:
  SosProgram() = default;

  /// Unknown polynomial with one scalar decision variable per support
  /// monomial.
  LinPoly new_free_poly(int n, const std::vector<Exponents>& support);
  /// Unknown polynomial represented directly by a psd Gram matrix over the
  /// given basis (so it is sum of squares by construction).
  LinPoly new_sos_poly(int n, const std::vector<Exponents>& gram_basis);
  LinExpr new_free_scalar();

  /// Coefficient-wise polynomial identity expr == 0.
  void require_zero(const LinPoly& expr);
  /// expr must be a sum of squares; returns the certificate slot.
  int require_sos(const LinPoly& expr);
  /// Symmetric grid m must be an sos matrix (checked via scalarization with
  /// a basis bilinear in the scalarization variables); returns the slot.
  int require_sos_matrix(const std::vector<std::vector<LinPoly>>& m);
  void require_linear(const LinExpr& e, double rhs);
  void minimize(const LinExpr& objective);

  int num_vars() const { return static_cast<int>(var_kinds_.size()); }

  Polynomial instantiate(const LinPoly& expr, const std::vector<double>& values) const;

  SosSolution solve(const SosOptions& opts = {}) const;

 private:
  struct GramBlock {
    int n = 0;
    std::vector<Exponents> basis;
    int first_var = 0;
  };
  struct Row {
    std::vector<std::pair<int, double>> lin;
    double rhs = 0;
  };
  struct SosGroup {
    int block = -1;                   // gram block index
    LinPoly expr;                     // the constrained expression
    int first_row = 0, num_rows = 0;  // coefficient-matching rows
    std::vector<Exponents> row_monomials;
  };

  enum class VarKind { Free, Gram };
  struct VarInfo {
    VarKind kind;
    int block = -1, i = -1, j = -1;  // gram coordinates (i >= j)
    int free_index = -1;
  };

  int new_gram_block(int n, std::vector<Exponents> basis);
  LinPoly gram_poly(int block) const;
  void emit_identity_rows(const LinPoly& gram_minus_expr_src, int block, const LinPoly& expr,
                          SosGroup* group);

  std::vector<VarInfo> var_kinds_;
  std::vector<GramBlock> blocks_;
  std::vector<Row> rows_;
  std::vector<SosGroup> groups_;
  std::vector<std::pair<int, double>> objective_;
  int num_free_ = 0;
};

/// Does p admit a sum of squares decomposition? Feasible outcomes carry a
/// Gram certificate; Infeasible outcomes carry a verified separating
/// functional; solver stalls surface as Unknown.
CheckResult<GramCertificate> check_sos(const Polynomial& p, const SosOptions& opts = {});

CheckResult<MatrixSosCertificate> check_sos_matrix(const PolyMatrix& m,
                                                   const SosOptions& opts = {});

/// The three equivalent algebraic convexity tests. The Hessian form yields
/// the smallest SDP and is the default everywhere.
CheckResult<SosConvexityCertificate> check_sosconvex(const Polynomial& p,
                                                     ConvexityForm form = ConvexityForm::Hessian,
                                                     const SosOptions& opts = {});

/// g_(1/2), g_grad, or y'H(x)y as a concrete polynomial (the sos object the
/// corresponding convexity test certifies). Exposed for tests and verifiers.
Polynomial convexity_witness_polynomial(const Polynomial& p, ConvexityForm form);

}  // namespace switchcert::sos
