#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "switchcert/error.hpp"

namespace switchcert::sdp {

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, Stalled };

const char* status_name(Status s);

struct SolveOptions {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  double tol_psd = 1e-8;  // scaled by (1 + ||X||_F) where it is applied
  int max_iter = 200;
  bool equilibrate = true;
};

/// Block-diagonal equality-form semidefinite program
///
///   minimize    sum_b <C_b, X_b> + c_f' u
///   subject to  sum_b <A_{i,b}, X_b> + d_i' u = b_i,   i = 1..k
///               X_b psd,  u free.
///
/// All matrices are symmetric; entries are set once for (i, j) with i >= j
/// and stand for both symmetric positions.
class Problem {
 public:
  Problem(std::vector<int> block_dims, int num_free = 0);

  int num_blocks() const { return static_cast<int>(dims_.size()); }
  int block_dim(int b) const { return dims_.at(b); }
  const std::vector<int>& block_dims() const { return dims_; }
  int num_free() const { return num_free_; }
  int num_constraints() const { return static_cast<int>(rhs_.size()); }

  void add_objective_entry(int block, int i, int j, double v);
  void add_free_objective(int idx, double v);

  /// Appends an empty constraint row with the given right-hand side and
  /// returns its index.
  int add_constraint(double rhs);
  void add_entry(int row, int block, int i, int j, double v);
  void add_free_entry(int row, int idx, double v);

  double rhs(int row) const { return rhs_.at(row); }

  /// One line per nonzero: kind row block i j value. Kinds: 'c' objective
  /// block entries, 'a' constraint block entries, 'f' free-variable
  /// coefficients (block/i unused), 'b' right-hand sides.
  void write_debug_dump(std::ostream& os) const;

  // Internal storage, exposed for the solver and tests.
  struct Entry {
    int block, i, j;
    double v;
  };
  struct FreeEntry {
    int idx;
    double v;
  };
  const std::vector<Entry>& objective_entries() const { return c_entries_; }
  const std::vector<FreeEntry>& objective_free_entries() const { return cf_entries_; }
  const std::vector<std::vector<Entry>>& row_entries() const { return rows_; }
  const std::vector<std::vector<FreeEntry>>& row_free_entries() const { return row_free_; }

 private:
  void check_block_index(int block, int i, int j) const;

  std::vector<int> dims_;
  int num_free_ = 0;
  std::vector<Entry> c_entries_;
  std::vector<FreeEntry> cf_entries_;
  std::vector<std::vector<Entry>> rows_;
  std::vector<std::vector<FreeEntry>> row_free_;
  std::vector<double> rhs_;
};

struct IterInfo {
  double primal_obj, dual_obj, gap, pres, dres, tau, kappa, mu, step;
};

struct Solution {
  Status status = Status::Stalled;

  std::vector<Eigen::MatrixXd> X;  // primal blocks (when Optimal)
  std::vector<Eigen::MatrixXd> S;  // dual slack blocks
  Eigen::VectorXd y;               // dual vector
  Eigen::VectorXd free_values;     // values of the free variables

  double primal_obj = 0, dual_obj = 0;
  double duality_gap = 0, rel_gap = 0;
  double primal_res = 0, dual_res = 0;

  /// Farkas ray for PrimalInfeasible: sum_i y_i A_i psd-negative,
  /// d' ray = 0 and b' ray > 0 (normalized to 1).
  Eigen::VectorXd infeasibility_ray;
  /// Improving ray for DualInfeasible: psd blocks with A(X) + D u = 0 and
  /// objective value -1.
  std::vector<Eigen::MatrixXd> dual_infeasibility_ray_X;
  Eigen::VectorXd dual_infeasibility_ray_free;

  int iterations = 0;
  std::vector<IterInfo> trace;
};

/// Reusable factorization of the free-variable columns. Callers that solve
/// many problems sharing the same free-coefficient structure (bisection
/// loops) pass the same cache object; it is validated against the problem
/// before reuse.
struct FreeEliminationCache {
  bool valid = false;
  Eigen::MatrixXd D;
  Eigen::MatrixXd Z;
  int rank_d = 0;
};

Solution solve(const Problem& prob, const SolveOptions& opts = {},
               FreeEliminationCache* cache = nullptr);

// svec helpers shared with the sos compiler and tests: packs the lower
// triangle column by column with sqrt(2) on off-diagonal entries so that
// <X, Y> = svec(X)'svec(Y).
int svec_dim(int n);
Eigen::VectorXd svec(const Eigen::MatrixXd& m);
Eigen::MatrixXd unsvec(const Eigen::VectorXd& v, int n);

}  // namespace switchcert::sdp
