#include "switchcert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace switchcert::sdp {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::PrimalInfeasible: return "PrimalInfeasible";
    case Status::DualInfeasible: return "DualInfeasible";
    case Status::Stalled: return "Stalled";
  }
  return "Unknown";
}

int svec_dim(int n) { return n * (n + 1) / 2; }

namespace {
// Index of (i, j), i >= j, in the column-packed lower triangle.
inline int svec_index(int n, int i, int j) {
  return j * n - j * (j - 1) / 2 + (i - j);
}
}  // namespace

Eigen::VectorXd svec(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v(svec_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j) {
    v[k++] = m(j, j);
    for (int i = j + 1; i < n; ++i) v[k++] = kSqrt2 * m(i, j);
  }
  return v;
}

Eigen::MatrixXd unsvec(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXd m(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    m(j, j) = v[k++];
    for (int i = j + 1; i < n; ++i) {
      m(i, j) = m(j, i) = v[k++] / kSqrt2;
    }
  }
  return m;
}

Problem::Problem(std::vector<int> block_dims, int num_free)
    : dims_(std::move(block_dims)), num_free_(num_free) {
  for (int d : dims_) require(d >= 1, Error::Code::MalformedInput, "block dimension must be >= 1");
  require(num_free_ >= 0, Error::Code::MalformedInput, "negative free-variable count");
}

void Problem::check_block_index(int block, int i, int j) const {
  require(block >= 0 && block < num_blocks(), Error::Code::DimensionMismatch, "block index");
  require(j >= 0 && j <= i && i < dims_[block], Error::Code::DimensionMismatch,
          "entry indices must satisfy 0 <= j <= i < dim");
}

void Problem::add_objective_entry(int block, int i, int j, double v) {
  check_block_index(block, i, j);
  c_entries_.push_back({block, i, j, v});
}

void Problem::add_free_objective(int idx, double v) {
  require(idx >= 0 && idx < num_free_, Error::Code::DimensionMismatch, "free variable index");
  cf_entries_.push_back({idx, v});
}

int Problem::add_constraint(double rhs) {
  rows_.emplace_back();
  row_free_.emplace_back();
  rhs_.push_back(rhs);
  return static_cast<int>(rhs_.size()) - 1;
}

void Problem::add_entry(int row, int block, int i, int j, double v) {
  require(row >= 0 && row < num_constraints(), Error::Code::DimensionMismatch, "row index");
  check_block_index(block, i, j);
  rows_[row].push_back({block, i, j, v});
}

void Problem::add_free_entry(int row, int idx, double v) {
  require(row >= 0 && row < num_constraints(), Error::Code::DimensionMismatch, "row index");
  require(idx >= 0 && idx < num_free_, Error::Code::DimensionMismatch, "free variable index");
  row_free_[row].push_back({idx, v});
}

void Problem::write_debug_dump(std::ostream& os) const {
  os << "# blocks";
  for (int d : dims_) os << ' ' << d;
  os << "\n# free " << num_free_ << "\n# constraints " << num_constraints() << "\n";
  os << "# kind row block i j value\n";
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& e : c_entries_) {
    os << "c 0 " << e.block << ' ' << e.i << ' ' << e.j << ' ' << num(e.v) << "\n";
  }
  for (const auto& e : cf_entries_) {
    os << "f 0 0 " << e.idx << " 0 " << num(e.v) << "\n";
  }
  for (int r = 0; r < num_constraints(); ++r) {
    for (const auto& e : rows_[r]) {
      os << "a " << r + 1 << ' ' << e.block << ' ' << e.i << ' ' << e.j << ' ' << num(e.v) << "\n";
    }
    for (const auto& e : row_free_[r]) {
      os << "f " << r + 1 << " 0 " << e.idx << " 0 " << num(e.v) << "\n";
    }
    os << "b " << r + 1 << " 0 0 0 " << num(rhs_[r]) << "\n";
  }
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseRow = std::vector<std::pair<int, double>>;

struct BlockLayout {
  std::vector<int> dims;
  std::vector<int> offs;  // svec offsets per block
  int total = 0;          // total svec length
  int nu = 0;             // sum of block dimensions (barrier parameter)

  explicit BlockLayout(const std::vector<int>& d) : dims(d) {
    offs.resize(d.size());
    for (size_t b = 0; b < d.size(); ++b) {
      offs[b] = total;
      total += svec_dim(d[b]);
      nu += d[b];
    }
  }
};

// The reduced pure-conic problem fed to the interior-point loop, plus all
// data needed to map solutions back to the caller's coordinates.
struct Reduced {
  BlockLayout layout{std::vector<int>{}};
  std::vector<SparseRow> rows;  // over svec coordinates, one per kept row
  VectorXd b;
  VectorXd c;
  double obj_shift = 0.0;

  // Mapping back to the original problem.
  VectorXd row_scale;          // per post-elimination row
  MatrixXd Z;                  // null-space basis (cols), empty when no frees
  VectorXd v;                  // particular dual for the free columns
  std::vector<int> kept;       // kept post-elimination rows
  int k_after_elim = 0;        // row count after free elimination
  bool eliminated_free = false;

  // Original data retained for recovery and certificates.
  std::vector<SparseRow> rows0;  // original rows over svec coords
  VectorXd b0;
  MatrixXd D0;  // dense free-coefficient matrix (k x nf)
};

VectorXd apply_rows(const std::vector<SparseRow>& rows, const VectorXd& x) {
  VectorXd out(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    double s = 0;
    for (const auto& [c, v] : rows[r]) s += v * x[c];
    out[static_cast<int>(r)] = s;
  }
  return out;
}

void accumulate_rows_transpose(const std::vector<SparseRow>& rows, const VectorXd& y, VectorXd& out) {
  for (size_t r = 0; r < rows.size(); ++r) {
    const double yr = y[static_cast<int>(r)];
    if (yr == 0.0) continue;
    for (const auto& [c, v] : rows[r]) out[c] += v * yr;
  }
}

struct Preprocessed {
  Reduced red;
  std::optional<Solution> early;  // resolved during preprocessing
};

// Builds the reduced problem: svec flattening, free variable elimination
// through a QR factorization, row equilibration, and removal of linearly
// dependent rows (with a Farkas ray when an eliminated row is inconsistent).
Preprocessed preprocess(const Problem& prob, const SolveOptions& opts,
                        FreeEliminationCache* cache) {
  Preprocessed out;
  Reduced& red = out.red;
  red.layout = BlockLayout(prob.block_dims());
  const int k = prob.num_constraints();
  const int nf = prob.num_free();
  const int N = red.layout.total;

  // svec rows.
  std::vector<SparseRow> rows(k);
  for (int r = 0; r < k; ++r) {
    std::map<int, double> acc;
    for (const auto& e : prob.row_entries()[r]) {
      const int idx = red.layout.offs[e.block] + svec_index(red.layout.dims[e.block], e.i, e.j);
      acc[idx] += (e.i == e.j) ? e.v : kSqrt2 * e.v;
    }
    rows[r].assign(acc.begin(), acc.end());
  }
  VectorXd b(k);
  for (int r = 0; r < k; ++r) b[r] = prob.rhs(r);
  MatrixXd D = MatrixXd::Zero(k, nf);
  for (int r = 0; r < k; ++r) {
    for (const auto& e : prob.row_free_entries()[r]) D(r, e.idx) += e.v;
  }
  VectorXd c = VectorXd::Zero(N);
  {
    std::map<int, double> acc;
    for (const auto& e : prob.objective_entries()) {
      const int idx = red.layout.offs[e.block] + svec_index(red.layout.dims[e.block], e.i, e.j);
      acc[idx] += (e.i == e.j) ? e.v : kSqrt2 * e.v;
    }
    for (const auto& [i, v] : acc) c[i] = v;
  }
  VectorXd cf = VectorXd::Zero(std::max(nf, 0));
  for (const auto& e : prob.objective_free_entries()) cf[e.idx] += e.v;

  red.rows0 = rows;
  red.b0 = b;
  red.D0 = D;

  const double bscale = 1.0 + b.lpNorm<Eigen::Infinity>();

  auto make_ray_solution = [&](const VectorXd& ray) {
    Solution sol;
    sol.status = Status::PrimalInfeasible;
    VectorXd r = ray;
    double val = 0;
    for (int i = 0; i < k; ++i) val += prob.rhs(i) * r[i];
    if (val != 0.0) r /= val;  // normalize b' ray = 1
    sol.infeasibility_ray = r;
    sol.y = r;
    return sol;
  };

  // Eliminate free variables against an orthonormal basis of null(D').
  std::vector<SparseRow> erows;
  VectorXd eb;
  if (nf > 0) {
    VectorXd v = VectorXd::Zero(k);
    if (cf.lpNorm<Eigen::Infinity>() > 0) {
      const MatrixXd dt = D.transpose();
      Eigen::ColPivHouseholderQR<MatrixXd> qrt(dt);
      v = qrt.solve(cf);
      VectorXd du = cf - D.transpose() * v;  // component of cf outside range(D')
      if (du.lpNorm<Eigen::Infinity>() > 1e-8 * (1 + cf.lpNorm<Eigen::Infinity>())) {
        // du lies in null(D) and the objective decreases along -du, so the
        // primal is unbounded below and the dual infeasible.
        Solution sol;
        sol.status = Status::DualInfeasible;
        for (int bidx = 0; bidx < prob.num_blocks(); ++bidx) {
          sol.dual_infeasibility_ray_X.emplace_back(
              MatrixXd::Zero(prob.block_dim(bidx), prob.block_dim(bidx)));
        }
        sol.dual_infeasibility_ray_free = -du / cf.dot(du);
        out.early = sol;
        return out;
      }
    }
    red.v = v;
    red.obj_shift = v.dot(b);

    int rank_d;
    if (cache != nullptr && cache->valid && cache->D.rows() == k && cache->D.cols() == nf &&
        cache->D == D) {
      red.Z = cache->Z;
      rank_d = cache->rank_d;
    } else {
      Eigen::ColPivHouseholderQR<MatrixXd> qr(D);
      qr.setThreshold(1e-12);
      rank_d = static_cast<int>(qr.rank());
      // Full Q of the pivoted QR; its trailing columns span null(D').
      MatrixXd E = MatrixXd::Zero(k, k - rank_d);
      for (int t = 0; t < k - rank_d; ++t) E(rank_d + t, t) = 1.0;
      red.Z = qr.householderQ() * E;
      if (cache != nullptr) {
        cache->valid = true;
        cache->D = D;
        cache->Z = red.Z;
        cache->rank_d = rank_d;
      }
    }
    red.eliminated_free = true;
    red.k_after_elim = k - rank_d;

    // Projected rows (dense) and right-hand side.
    MatrixXd At = MatrixXd::Zero(red.k_after_elim, N);
    for (int r = 0; r < k; ++r) {
      for (const auto& [cidx, val] : rows[r]) At.col(cidx) += val * red.Z.row(r).transpose();
    }
    eb = red.Z.transpose() * b;
    erows.resize(red.k_after_elim);
    for (int r = 0; r < red.k_after_elim; ++r) {
      for (int j = 0; j < N; ++j) {
        if (At(r, j) != 0.0) erows[r].emplace_back(j, At(r, j));
      }
    }
    // Shifted objective c - A*(v).
    VectorXd shift = VectorXd::Zero(N);
    accumulate_rows_transpose(rows, v, shift);
    c -= shift;
  } else {
    erows = rows;
    eb = b;
    red.k_after_elim = k;
    red.v = VectorXd::Zero(k);
  }
  red.c = c;

  // Equilibrate the post-elimination rows. The dual of a scaled row is
  // descaled on the way back out.
  const int ke = red.k_after_elim;
  red.row_scale = VectorXd::Ones(ke);
  if (opts.equilibrate) {
    for (int r = 0; r < ke; ++r) {
      double m = 0;
      for (const auto& [cidx, v] : erows[r]) m = std::max(m, std::abs(v));
      if (m > 0) {
        red.row_scale[r] = m;
        for (auto& [cidx, v] : erows[r]) v /= m;
        eb[r] /= m;
      }
    }
  }

  // Row rank handling. Cheap structural test first: when no free variables
  // were present and every svec column is touched by at most one row, the
  // rows are mutually orthogonal and only empty rows need attention.
  bool structurally_independent = false;
  if (!red.eliminated_free) {
    std::vector<int> touch(N, 0);
    structurally_independent = true;
    for (const auto& row : erows) {
      for (const auto& [cidx, v] : row) {
        if (++touch[cidx] > 1) {
          structurally_independent = false;
          break;
        }
      }
      if (!structurally_independent) break;
    }
  }

  auto lift_ray = [&](const VectorXd& ray1) {
    VectorXd unscaled = ray1;
    for (int r = 0; r < ke; ++r) unscaled[r] /= red.row_scale[r];
    return red.eliminated_free ? VectorXd(red.Z * unscaled) : unscaled;
  };

  std::vector<int> kept;
  if (ke == 0) {
    // every row was consumed by the free-variable elimination
  } else if (structurally_independent) {
    for (int r = 0; r < ke; ++r) {
      if (erows[r].empty()) {
        if (std::abs(eb[r]) > 1e-9 * bscale) {
          out.early = make_ray_solution(lift_ray(VectorXd::Unit(ke, r) * (eb[r] > 0 ? 1.0 : -1.0)));
          return out;
        }
      } else {
        kept.push_back(r);
      }
    }
  } else {
    // Numerical rank of the row matrix via a pivoted QR of its transpose.
    MatrixXd At = MatrixXd::Zero(N, ke);
    for (int r = 0; r < ke; ++r) {
      for (const auto& [cidx, v] : erows[r]) At(cidx, r) = v;
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(At);
    qr.setThreshold(1e-11);
    const int rank = static_cast<int>(qr.rank());
    const auto& perm = qr.colsPermutation().indices();
    kept.assign(perm.data(), perm.data() + rank);
    std::sort(kept.begin(), kept.end());

    if (rank < ke) {
      // Express dropped rows in terms of kept ones and check consistency.
      MatrixXd Akept(N, rank);
      VectorXd bkept(rank);
      for (int t = 0; t < rank; ++t) {
        Akept.col(t) = At.col(kept[t]);
        bkept[t] = eb[kept[t]];
      }
      std::optional<Eigen::ColPivHouseholderQR<MatrixXd>> qrk;
      if (rank > 0) qrk.emplace(Akept);
      for (int r = 0; r < ke; ++r) {
        if (std::binary_search(kept.begin(), kept.end(), r)) continue;
        const VectorXd w = rank > 0 ? VectorXd(qrk->solve(At.col(r))) : VectorXd::Zero(0);
        const double mismatch = eb[r] - w.dot(bkept);
        const double scale = 1 + std::abs(eb[r]) + w.lpNorm<1>() * bscale;
        if (std::abs(mismatch) > 1e-7 * scale) {
          VectorXd ray1 = VectorXd::Zero(ke);
          ray1[r] = 1.0;
          for (int t = 0; t < rank; ++t) ray1[kept[t]] -= w[t];
          if (mismatch < 0) ray1 = -ray1;
          out.early = make_ray_solution(lift_ray(ray1));
          return out;
        }
      }
    }
  }

  red.kept = kept;
  red.rows.clear();
  red.rows.reserve(kept.size());
  VectorXd bfin(kept.size());
  for (size_t t = 0; t < kept.size(); ++t) {
    red.rows.push_back(std::move(erows[kept[t]]));
    bfin[static_cast<int>(t)] = eb[kept[t]];
  }
  red.b = bfin;
  return out;
}

struct NtScaling {
  MatrixXd R, Rinv;
  VectorXd lam;
};

// Interior-point state for the homogeneous self-dual embedding.
class HsdSolver {
 public:
  HsdSolver(const Reduced& red, const SolveOptions& opts) : red_(red), opts_(opts) {}

  Solution run();

 private:
  const Reduced& red_;
  const SolveOptions& opts_;

  int nb() const { return static_cast<int>(red_.layout.dims.size()); }

  std::vector<MatrixXd> unpack(const VectorXd& v) const {
    std::vector<MatrixXd> out;
    out.reserve(red_.layout.dims.size());
    for (size_t b = 0; b < red_.layout.dims.size(); ++b) {
      const int d = red_.layout.dims[b];
      out.push_back(unsvec(v.segment(red_.layout.offs[b], svec_dim(d)), d));
    }
    return out;
  }

  VectorXd pack(const std::vector<MatrixXd>& mats) const {
    VectorXd v(red_.layout.total);
    for (size_t b = 0; b < mats.size(); ++b) {
      v.segment(red_.layout.offs[b], svec_dim(red_.layout.dims[b])) = svec(mats[b]);
    }
    return v;
  }

  // Largest step a with M + a * dM psd, via the Cholesky factor of M.
  static double psd_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& dM) {
    MatrixXd E = llt.matrixL().solve(dM);
    E = llt.matrixL().solve(E.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (E + E.transpose()),
                                               Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= 0) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
  }
};

Solution HsdSolver::run() {
  const int k = static_cast<int>(red_.rows.size());
  const int N = red_.layout.total;
  const int nu = red_.layout.nu;
  const VectorXd& b = red_.b;
  const VectorXd& c = red_.c;

  // Dense per-row block matrices, built once.
  std::vector<std::vector<std::pair<int, MatrixXd>>> row_mats(k);
  for (int r = 0; r < k; ++r) {
    std::map<int, MatrixXd> acc;
    for (const auto& [cidx, v] : red_.rows[r]) {
      int bidx = nb() - 1;
      for (int t = 0; t < nb(); ++t) {
        if (cidx < red_.layout.offs[t] + svec_dim(red_.layout.dims[t])) {
          bidx = t;
          break;
        }
      }
      const int d = red_.layout.dims[bidx];
      auto it = acc.find(bidx);
      if (it == acc.end()) it = acc.emplace(bidx, MatrixXd::Zero(d, d)).first;
      // Undo the svec packing into a symmetric matrix entry.
      int local = cidx - red_.layout.offs[bidx];
      int col = 0;
      while (local >= d - col) {
        local -= d - col;
        ++col;
      }
      const int rowi = col + local;
      if (rowi == col) {
        it->second(rowi, col) += v;
      } else {
        it->second(rowi, col) += v / kSqrt2;
        it->second(col, rowi) += v / kSqrt2;
      }
    }
    row_mats[r].assign(acc.begin(), acc.end());
  }
  std::vector<MatrixXd> Cmat = unpack(c);

  VectorXd x = VectorXd::Zero(N), s = VectorXd::Zero(N);
  for (int bi = 0; bi < nb(); ++bi) {
    const VectorXd id = svec(MatrixXd::Identity(red_.layout.dims[bi], red_.layout.dims[bi]));
    x.segment(red_.layout.offs[bi], id.size()) = id;
    s.segment(red_.layout.offs[bi], id.size()) = id;
  }
  VectorXd y = VectorXd::Zero(k);
  double tau = 1.0, kappa = 1.0;

  Solution sol;
  double best_metric = std::numeric_limits<double>::infinity();
  struct Snapshot {
    VectorXd x, y, s;
    double tau, kappa;
  } best{x, y, s, tau, kappa};

  const double cnorm = 1 + c.norm();
  const double bnorm = 1 + b.norm();

  int no_progress = 0;
  for (int iter = 0; iter <= opts_.max_iter; ++iter) {
    // Residuals of the embedding.
    VectorXd rp = apply_rows(red_.rows, x) - b * tau;
    VectorXd aty = VectorXd::Zero(N);
    accumulate_rows_transpose(red_.rows, y, aty);
    VectorXd rd = -aty - s + c * tau;
    const double cx = c.dot(x), by = b.dot(y);
    const double rg = by - cx - kappa;
    const double mu = (x.dot(s) + tau * kappa) / (nu + 1);

    // De-homogenized quality.
    const double pres = (rp / tau).norm() / bnorm;
    const double dres = (rd / tau).norm() / cnorm;
    const double pobj = cx / tau, dobj = by / tau;
    const double gap = x.dot(s) / (tau * tau);
    const double relgap = gap / std::max(1.0, std::abs(pobj));
    const double metric = std::max({pres, dres, relgap});

    sol.trace.push_back({pobj + red_.obj_shift, dobj + red_.obj_shift, gap, pres, dres, tau,
                         kappa, mu, 0.0});
    sol.iterations = iter;

    if (metric < best_metric) {
      best_metric = metric;
      best = {x, y, s, tau, kappa};
      no_progress = 0;
    } else if (++no_progress > 25) {
      break;
    }

    if (pres <= opts_.tol_feas && dres <= opts_.tol_feas && relgap <= opts_.tol_gap) {
      sol.status = Status::Optimal;
      sol.X = unpack(x / tau);
      sol.S = unpack(s / tau);
      sol.y = y / tau;
      sol.primal_obj = pobj + red_.obj_shift;
      sol.dual_obj = dobj + red_.obj_shift;
      sol.duality_gap = gap;
      sol.rel_gap = relgap;
      sol.primal_res = pres;
      sol.dual_res = dres;
      return sol;
    }

    // Primal infeasibility: b'y > 0 with a nearly dual-feasible ray.
    if (by > 1e-12) {
      const double infres = (c * tau - rd).norm() / by;  // ||A'y + s|| / b'y
      if (infres <= opts_.tol_feas * cnorm) {
        sol.status = Status::PrimalInfeasible;
        sol.infeasibility_ray = y / by;
        sol.y = sol.infeasibility_ray;
        return sol;
      }
    }
    // Dual infeasibility: c'x < 0 with A(x) nearly zero.
    if (cx < -1e-12) {
      const double infres = (rp + b * tau).norm() / (-cx);  // ||A x|| / (-c'x)
      if (infres <= opts_.tol_feas * bnorm) {
        sol.status = Status::DualInfeasible;
        sol.dual_infeasibility_ray_X = unpack(x / (-cx));
        return sol;
      }
    }

    if (tau < 1e-10 && kappa < 1e-10) {
      throw Error(Error::Code::IllConditioned, "self-dual embedding collapsed (tau and kappa ~ 0)");
    }
    if (iter == opts_.max_iter) break;

    // Nesterov-Todd scaling per block.
    std::vector<MatrixXd> Xm = unpack(x), Sm = unpack(s);
    std::vector<NtScaling> nt(nb());
    std::vector<Eigen::LLT<MatrixXd>> lltX(nb()), lltS(nb());
    bool scale_ok = true;
    for (int bi = 0; bi < nb(); ++bi) {
      lltX[bi].compute(Xm[bi]);
      lltS[bi].compute(Sm[bi]);
      if (lltX[bi].info() != Eigen::Success || lltS[bi].info() != Eigen::Success) {
        const int d = red_.layout.dims[bi];
        Xm[bi] += 1e-13 * (1 + Xm[bi].norm()) * MatrixXd::Identity(d, d);
        Sm[bi] += 1e-13 * (1 + Sm[bi].norm()) * MatrixXd::Identity(d, d);
        lltX[bi].compute(Xm[bi]);
        lltS[bi].compute(Sm[bi]);
        if (lltX[bi].info() != Eigen::Success || lltS[bi].info() != Eigen::Success) {
          scale_ok = false;
          break;
        }
      }
      MatrixXd Lx = lltX[bi].matrixL();
      MatrixXd Ls = lltS[bi].matrixL();
      Eigen::JacobiSVD<MatrixXd> svd(Ls.transpose() * Lx,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
      VectorXd sig = svd.singularValues();
      if (sig.minCoeff() <= 0) {
        scale_ok = false;
        break;
      }
      VectorXd isqrt = sig.cwiseSqrt().cwiseInverse();
      nt[bi].R = Lx * svd.matrixV() * isqrt.asDiagonal();
      nt[bi].Rinv = sig.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                    Lx.template triangularView<Eigen::Lower>().solve(
                        MatrixXd::Identity(Lx.rows(), Lx.cols()));
      nt[bi].lam = sig;
    }
    if (!scale_ok) break;

    auto wmw = [&](const VectorXd& vv) {
      std::vector<MatrixXd> m = unpack(vv);
      for (int bi = 0; bi < nb(); ++bi) {
        m[bi] = nt[bi].R * (nt[bi].R.transpose() * m[bi] * nt[bi].R) * nt[bi].R.transpose();
      }
      return pack(m);
    };

    // Normal matrix M = A (W x W) A'.
    MatrixXd Bmat(k, N);
    for (int r = 0; r < k; ++r) {
      VectorXd col = VectorXd::Zero(N);
      for (const auto& [bi, Am] : row_mats[r]) {
        MatrixXd t = nt[bi].R * (nt[bi].R.transpose() * Am * nt[bi].R) * nt[bi].R.transpose();
        col.segment(red_.layout.offs[bi], svec_dim(red_.layout.dims[bi])) = svec(t);
      }
      Bmat.row(r) = col.transpose();
    }
    MatrixXd M(k, k);
    for (int r = 0; r < k; ++r) {
      VectorXd mr = VectorXd::Zero(k);
      for (const auto& [cidx, v] : red_.rows[r]) mr += v * Bmat.col(cidx);
      M.row(r) = mr.transpose();
    }
    M = 0.5 * (M + M.transpose());
    Eigen::LLT<MatrixXd> lltM(M);
    if (lltM.info() != Eigen::Success) {
      M += (1e-12 * (1 + M.trace() / std::max(1, k))) * MatrixXd::Identity(k, k);
      lltM.compute(M);
      if (lltM.info() != Eigen::Success) break;
    }

    const VectorXd wcw = wmw(c);
    const VectorXd h2 = apply_rows(red_.rows, wcw);
    const VectorXd h1 = b + h2;
    const double h3 = c.dot(wcw);
    const VectorXd z2 = lltM.solve(h1);
    const VectorXd bmh2 = b - h2;

    auto solve_direction = [&](double eta, double tg, const VectorXd& rgr_svec, VectorXd& dx,
                               VectorXd& dy, VectorXd& ds, double& dtau, double& dkappa) {
      const VectorXd wrdw = wmw(rd);
      const VectorXd q1 = -eta * rp - apply_rows(red_.rows, rgr_svec) + eta * apply_rows(red_.rows, wrdw);
      const double q2 = -eta * rg + c.dot(rgr_svec) - eta * wcw.dot(rd) + tg / tau;
      const VectorXd z1 = lltM.solve(q1);
      const double denom = bmh2.dot(z2) + h3 + kappa / tau;
      dtau = (q2 - bmh2.dot(z1)) / denom;
      dy = z1 + dtau * z2;
      VectorXd atdy = VectorXd::Zero(N);
      accumulate_rows_transpose(red_.rows, dy, atdy);
      ds = -atdy + c * dtau + eta * rd;
      dx = rgr_svec - wmw(ds);
      dkappa = (tg - kappa * dtau) / tau;
    };

    // Predictor (affine direction): target 0 complementarity.
    VectorXd dx_a, dy_a, ds_a;
    double dtau_a, dkappa_a;
    solve_direction(1.0, -tau * kappa, -x, dx_a, dy_a, ds_a, dtau_a, dkappa_a);

    auto max_step = [&](const VectorXd& dx_, const VectorXd& ds_, double dtau_, double dkappa_) {
      double a = std::numeric_limits<double>::infinity();
      std::vector<MatrixXd> dXm = unpack(dx_), dSm = unpack(ds_);
      for (int bi = 0; bi < nb(); ++bi) {
        a = std::min(a, psd_step(lltX[bi], dXm[bi]));
        a = std::min(a, psd_step(lltS[bi], dSm[bi]));
      }
      if (dtau_ < 0) a = std::min(a, -tau / dtau_);
      if (dkappa_ < 0) a = std::min(a, -kappa / dkappa_);
      return a;
    };

    const double alpha_aff = std::min(1.0, max_step(dx_a, ds_a, dtau_a, dkappa_a));
    const double mu_aff = ((x + alpha_aff * dx_a).dot(s + alpha_aff * ds_a) +
                           (tau + alpha_aff * dtau_a) * (kappa + alpha_aff * dkappa_a)) /
                          (nu + 1);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::min(1.0, std::max(1e-8, sigma));

    // Combined corrector.
    std::vector<MatrixXd> dXa = unpack(dx_a), dSa = unpack(ds_a);
    std::vector<MatrixXd> G(nb());
    for (int bi = 0; bi < nb(); ++bi) {
      const int d = red_.layout.dims[bi];
      MatrixXd dxh = nt[bi].Rinv * dXa[bi] * nt[bi].Rinv.transpose();
      MatrixXd dsh = nt[bi].R.transpose() * dSa[bi] * nt[bi].R;
      MatrixXd corr = 0.5 * (dxh * dsh + dsh * dxh);
      MatrixXd T = -corr;
      for (int i = 0; i < d; ++i) T(i, i) += sigma * mu - nt[bi].lam[i] * nt[bi].lam[i];
      MatrixXd g(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) g(i, j) = 2.0 * T(i, j) / (nt[bi].lam[i] + nt[bi].lam[j]);
      }
      G[bi] = nt[bi].R * g * nt[bi].R.transpose();
    }
    const double tg = sigma * mu - tau * kappa - dtau_a * dkappa_a;

    VectorXd dx, dy, ds;
    double dtau, dkappa;
    solve_direction(1.0 - sigma, tg, pack(G), dx, dy, ds, dtau, dkappa);

    double alpha = std::min(1.0, 0.99 * max_step(dx, ds, dtau, dkappa));
    if (!std::isfinite(alpha) || alpha <= 1e-10) break;

    x += alpha * dx;
    y += alpha * dy;
    s += alpha * ds;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
    sol.trace.back().step = alpha;
  }

  // Stalled: report the best iterate seen.
  sol.status = Status::Stalled;
  sol.X = unpack(best.x / best.tau);
  sol.S = unpack(best.s / best.tau);
  sol.y = best.y / best.tau;
  sol.primal_obj = c.dot(best.x) / best.tau + red_.obj_shift;
  sol.dual_obj = b.dot(best.y) / best.tau + red_.obj_shift;
  sol.duality_gap = best.x.dot(best.s) / (best.tau * best.tau);
  sol.rel_gap = sol.duality_gap / std::max(1.0, std::abs(sol.primal_obj));
  sol.primal_res = (apply_rows(red_.rows, best.x) / best.tau - b).norm() / (1 + b.norm());
  VectorXd aty = VectorXd::Zero(N);
  accumulate_rows_transpose(red_.rows, best.y, aty);
  sol.dual_res = ((-aty - best.s) / best.tau + c).norm() / (1 + c.norm());
  return sol;
}

// Maps a solution of the reduced problem back to the caller's coordinates.
void postprocess(const Problem& prob, const Reduced& red, Solution& sol) {
  const int nf = prob.num_free();

  auto embed_dual = [&](const VectorXd& yred, bool include_v) {
    VectorXd y1 = VectorXd::Zero(red.k_after_elim);
    for (size_t t = 0; t < red.kept.size(); ++t) {
      y1[red.kept[t]] = yred[static_cast<int>(t)] / red.row_scale[red.kept[t]];
    }
    VectorXd yorig = red.eliminated_free ? VectorXd(red.Z * y1) : y1;
    if (include_v && red.v.size() == yorig.size()) yorig += red.v;
    return yorig;
  };

  if (sol.status == Status::Optimal || sol.status == Status::Stalled) {
    if (sol.y.size() == static_cast<int>(red.kept.size())) {
      sol.y = embed_dual(sol.y, true);
    }
    if (nf > 0 && !sol.X.empty()) {
      // Recover free values by least squares on the scaled original rows.
      VectorXd xs(red.layout.total);
      for (size_t bi = 0; bi < sol.X.size(); ++bi) {
        xs.segment(red.layout.offs[bi], svec_dim(red.layout.dims[bi])) = svec(sol.X[bi]);
      }
      VectorXd resid = red.b0 - apply_rows(red.rows0, xs);
      sol.free_values = red.D0.colPivHouseholderQr().solve(resid);
    } else {
      sol.free_values = VectorXd::Zero(nf);
    }
  } else if (sol.status == Status::PrimalInfeasible) {
    if (sol.infeasibility_ray.size() == static_cast<int>(red.kept.size())) {
      VectorXd ray = embed_dual(sol.infeasibility_ray, false);
      double val = 0;
      for (int r = 0; r < prob.num_constraints(); ++r) val += prob.rhs(r) * ray[r];
      if (val != 0.0) ray /= val;
      sol.infeasibility_ray = ray;
      sol.y = ray;
    }
  } else if (sol.status == Status::DualInfeasible) {
    if (nf > 0 && !sol.dual_infeasibility_ray_X.empty()) {
      VectorXd xs(red.layout.total);
      for (size_t bi = 0; bi < sol.dual_infeasibility_ray_X.size(); ++bi) {
        xs.segment(red.layout.offs[bi], svec_dim(red.layout.dims[bi])) =
            svec(sol.dual_infeasibility_ray_X[bi]);
      }
      sol.dual_infeasibility_ray_free = red.D0.colPivHouseholderQr().solve(
          VectorXd(-apply_rows(red.rows0, xs)));
    } else if (sol.dual_infeasibility_ray_free.size() == 0) {
      sol.dual_infeasibility_ray_free = VectorXd::Zero(nf);
    }
  }
}

}  // namespace

Solution solve(const Problem& prob, const SolveOptions& opts, FreeEliminationCache* cache) {
  Preprocessed pre = preprocess(prob, opts, cache);
  if (pre.early.has_value()) {
    return std::move(*pre.early);  // rays already in original coordinates
  }
  const Reduced& red = pre.red;

  Solution sol;
  if (red.rows.empty()) {
    // No effective constraints: X = 0 is optimal unless the objective has a
    // negative direction on some block.
    sol.status = Status::Optimal;
    std::vector<Eigen::MatrixXd> Cm;
    for (size_t bi = 0; bi < red.layout.dims.size(); ++bi) {
      const int d = red.layout.dims[bi];
      Cm.push_back(unsvec(red.c.segment(red.layout.offs[bi], svec_dim(d)), d));
    }
    for (size_t bi = 0; bi < Cm.size(); ++bi) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Cm[bi]);
      if (es.eigenvalues().minCoeff() < -1e-12) {
        sol.status = Status::DualInfeasible;
        Eigen::VectorXd u = es.eigenvectors().col(0);
        for (size_t bj = 0; bj < Cm.size(); ++bj) {
          const int d = red.layout.dims[bj];
          sol.dual_infeasibility_ray_X.push_back(
              bj == bi ? Eigen::MatrixXd(u * u.transpose() / -es.eigenvalues().minCoeff())
                       : Eigen::MatrixXd::Zero(d, d));
        }
        postprocess(prob, red, sol);
        return sol;
      }
    }
    for (int d : red.layout.dims) {
      sol.X.push_back(Eigen::MatrixXd::Zero(d, d));
    }
    sol.S = Cm;
    sol.y = Eigen::VectorXd::Zero(0);
    sol.primal_obj = sol.dual_obj = red.obj_shift;
    postprocess(prob, red, sol);
    return sol;
  }

  HsdSolver solver(red, opts);
  sol = solver.run();
  postprocess(prob, red, sol);
  return sol;
}

}  // namespace switchcert::sdp
