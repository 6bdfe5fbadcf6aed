#include "partopt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "partopt/io.hpp"
#include "partopt/model.hpp"
#include "partopt/rng.hpp"

namespace partopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class S>
std::string fmt_scalar(const S& v) {
  if constexpr (num::is_exact<S>) {
    return v.get_str();
  } else {
    return format_double(v);
  }
}

template <class S>
void check_lp(const LinearProgram<S>& lp) {
  const size_t n = lp.obj.size();
  if (lp.lo.size() != n || lp.hi.size() != n || lp.lo_inf.size() != n || lp.hi_inf.size() != n)
    throw std::invalid_argument("lp: variable arrays disagree in size");
  const size_t m = lp.rlo.size();
  if (lp.rhi.size() != m || lp.rlo_inf.size() != m || lp.rhi_inf.size() != m)
    throw std::invalid_argument("lp: row bound arrays disagree in size");
  if (lp.row_ptr.size() != m + 1 || lp.row_ptr.front() != 0 ||
      lp.row_ptr.back() != static_cast<int>(lp.a.size()) || lp.col.size() != lp.a.size())
    throw std::invalid_argument("lp: row structure is inconsistent");
  for (size_t r = 0; r < m; ++r)
    if (lp.row_ptr[r] > lp.row_ptr[r + 1]) throw std::invalid_argument("lp: row_ptr not monotone");
  for (int c : lp.col)
    if (c < 0 || c >= static_cast<int>(n)) throw std::invalid_argument("lp: column index out of range");
}

// sparse LU of the basis matrix, left-looking with partial pivoting: each
// column is formed by a sparse triangular solve against the L built so far,
// then a pivot is picked among the rows that are not yet pivotal. doubles take
// the largest magnitude; rationals take the entry with the fewest limbs (any
// nonzero rational pivot is exact, small ones keep the numbers from growing).
template <class S>
class Factor {
 public:
  // grab(k, rows, vals) must append basis column k as (original row, value)
  template <class ColFn>
  bool factorize(int mm, ColFn&& grab) {
    m_ = mm;
    lptr_.assign(1, 0);
    lrow_.clear();
    lval_.clear();
    uptr_.assign(1, 0);
    upos_.clear();
    uval_.clear();
    udiag_.clear();
    row_pos_.assign(m_, -1);
    pos_row_.assign(m_, -1);
    work_.assign(m_, S{});
    mark_.assign(m_, 0);
    node_stack_.clear();
    iter_stack_.clear();

    std::vector<int> rows;
    std::vector<S> vals;
    for (int k = 0; k < m_; ++k) {
      rows.clear();
      vals.clear();
      grab(k, rows, vals);
      topo_.clear();
      for (int r : rows) reach(r);
      for (size_t i = 0; i < rows.size(); ++i) work_[rows[i]] += vals[i];
      // eliminate in topological order (reverse DFS postorder)
      for (size_t ti = topo_.size(); ti-- > 0;) {
        const int node = topo_[ti];
        const int j = row_pos_[node];
        if (j < 0) continue;
        const S& xj = work_[node];
        if (num::sign(xj) == 0) continue;
        for (int idx = lptr_[j]; idx < lptr_[j + 1]; ++idx) work_[lrow_[idx]] -= xj * lval_[idx];
      }
      // pivot among rows without a position yet
      int piv = -1;
      double best = 0.0;
      for (int node : topo_) {
        if (row_pos_[node] >= 0 || num::sign(work_[node]) == 0) continue;
        double score;
        if constexpr (num::is_exact<S>) {
          score = -num::entry_size(work_[node]);  // fewest limbs wins
        } else {
          score = num::entry_size(work_[node]);  // largest magnitude wins
        }
        if (piv < 0 || score > best) {
          piv = node;
          best = score;
        }
      }
      if (piv < 0) {  // column lies in the span of the previous ones
        clear_column();
        return false;
      }
      row_pos_[piv] = k;
      pos_row_[k] = piv;
      udiag_.push_back(work_[piv]);
      const S& pv = udiag_.back();
      for (int node : topo_) {
        if (node == piv || num::sign(work_[node]) == 0) continue;
        const int j = row_pos_[node];
        if (j >= 0) {
          upos_.push_back(j);
          uval_.push_back(work_[node]);
        } else {
          lrow_.push_back(node);
          lval_.push_back(work_[node] / pv);
        }
      }
      uptr_.push_back(static_cast<int>(uval_.size()));
      lptr_.push_back(static_cast<int>(lval_.size()));
      clear_column();
    }
    // the solves below run in pivot-position space
    for (int& r : lrow_) r = row_pos_[r];
    return true;
  }

  // y := L^{-1} y (unit diagonal, entries strictly below it)
  void lsolve(std::vector<S>& y) const {
    for (int k = 0; k < m_; ++k) {
      if (num::sign(y[k]) == 0) continue;
      const S& yk = y[k];
      for (int idx = lptr_[k]; idx < lptr_[k + 1]; ++idx) y[lrow_[idx]] -= yk * lval_[idx];
    }
  }
  // y := U^{-1} y
  void usolve(std::vector<S>& y) const {
    for (int k = m_; k-- > 0;) {
      if (num::sign(y[k]) == 0) continue;
      y[k] /= udiag_[k];
      const S& xk = y[k];
      for (int idx = uptr_[k]; idx < uptr_[k + 1]; ++idx) y[upos_[idx]] -= xk * uval_[idx];
    }
  }
  // y := U^{-T} y
  void utsolve(std::vector<S>& y) const {
    for (int k = 0; k < m_; ++k) {
      S acc = y[k];
      for (int idx = uptr_[k]; idx < uptr_[k + 1]; ++idx) acc -= uval_[idx] * y[upos_[idx]];
      acc /= udiag_[k];
      y[k] = acc;
    }
  }
  // y := L^{-T} y
  void ltsolve(std::vector<S>& y) const {
    for (int k = m_; k-- > 0;) {
      S acc = y[k];
      for (int idx = lptr_[k]; idx < lptr_[k + 1]; ++idx) acc -= lval_[idx] * y[lrow_[idx]];
      y[k] = acc;
    }
  }

  int row_of_pos(int k) const { return pos_row_[k]; }

 private:
  // depth-first reach of row r through the columns of L, postorder into topo_
  void reach(int r) {
    if (mark_[r]) return;
    push_node(r);
    while (!node_stack_.empty()) {
      const int node = node_stack_.back();
      const int j = row_pos_[node];
      const int end = j >= 0 ? lptr_[j + 1] : 0;
      int it = iter_stack_.back();
      int child = -1;
      while (it < end) {
        const int c = lrow_[it++];
        if (!mark_[c]) {
          child = c;
          break;
        }
      }
      iter_stack_.back() = it;
      if (child >= 0) {
        push_node(child);
      } else {
        topo_.push_back(node);
        node_stack_.pop_back();
        iter_stack_.pop_back();
      }
    }
  }
  void push_node(int r) {
    mark_[r] = 1;
    node_stack_.push_back(r);
    iter_stack_.push_back(row_pos_[r] >= 0 ? lptr_[row_pos_[r]] : 0);
  }
  void clear_column() {
    for (int node : topo_) {
      work_[node] = S{};
      mark_[node] = 0;
    }
  }

  int m_ = 0;
  std::vector<int> lptr_{0}, lrow_;
  std::vector<S> lval_;
  std::vector<int> uptr_{0}, upos_;
  std::vector<S> uval_, udiag_;
  std::vector<int> row_pos_, pos_row_;
  std::vector<S> work_;
  std::vector<std::uint8_t> mark_;
  std::vector<int> topo_, node_stack_, iter_stack_;
};

enum class Step { pivoted, optimal, unbounded };

// bounded-variable revised simplex on W = [A | -I | I_art] z = 0. columns:
// structural 0..n-1, logical n..n+m-1 (row activities), artificial
// n+m..n+2m-1 (fixed at zero outside phase 1). the basis inverse is kept as a
// sparse LU of a reference basis plus product-form eta updates.
template <class S>
class Worker {
 public:
  Worker(const LinearProgram<S>& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {}

  LpSolution<S> run(const Basis* warm) {
    build();
    warm_ok_ = warm != nullptr && load_warm(*warm);
    if (!warm_ok_) cold_start();
    return extract(main_loop());
  }

 private:
  static constexpr bool exact_ = num::is_exact<S>;

  void build() {
    check_lp(lp_);
    n_ = lp_.num_vars();
    m_ = lp_.num_rows();
    ncols_ = n_ + 2 * m_;
    // structural columns, CSC
    cptr_.assign(n_ + 1, 0);
    for (int idx = 0; idx < lp_.nnz(); ++idx) ++cptr_[lp_.col[idx] + 1];
    for (int j = 0; j < n_; ++j) cptr_[j + 1] += cptr_[j];
    crow_.resize(lp_.nnz());
    cval_.assign(lp_.nnz(), S{});
    {
      std::vector<int> fill(cptr_.begin(), cptr_.end() - 1);
      for (int r = 0; r < m_; ++r)
        for (int idx = lp_.row_ptr[r]; idx < lp_.row_ptr[r + 1]; ++idx) {
          const int j = lp_.col[idx];
          crow_[fill[j]] = r;
          cval_[fill[j]] = lp_.a[idx];
          ++fill[j];
        }
    }
    lo_.assign(ncols_, S{});
    hi_.assign(ncols_, S{});
    lof_.assign(ncols_, 0);
    hif_.assign(ncols_, 0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lp_.lo[j];
      hi_[j] = lp_.hi[j];
      lof_[j] = lp_.lo_inf[j];
      hif_[j] = lp_.hi_inf[j];
    }
    for (int r = 0; r < m_; ++r) {
      lo_[n_ + r] = lp_.rlo[r];
      hi_[n_ + r] = lp_.rhi[r];
      lof_[n_ + r] = lp_.rlo_inf[r];
      hif_[n_ + r] = lp_.rhi_inf[r];
      // artificials default to their dormant [0, 0] state
    }
    phase2_cost_.assign(ncols_, S{});
    for (int j = 0; j < n_; ++j) phase2_cost_[j] = lp_.obj[j];
    if (lp_.maximize)
      for (int j = 0; j < n_; ++j) phase2_cost_[j] = -phase2_cost_[j];
    cost_ = phase2_cost_;
    vstat_.assign(ncols_, VarStatus::at_lower);
    xval_.assign(ncols_, S{});
    basic_.assign(m_, -1);
    in_basis_.assign(ncols_, -1);
    etas_.clear();
    slotv_.assign(m_, S{});
    origv_.assign(m_, S{});
    wvec_.assign(m_, S{});
    yrow_.assign(m_, S{});
    cb_.assign(m_, S{});
    iters_ = p1_iters_ = 0;
    stall_ = 0;
    bland_ = opt_.always_bland;
    phase_ = 2;
    max_iter_ = opt_.max_iter >= 0 ? opt_.max_iter : 10000 + 50L * (n_ + m_);
    update_cost_scale();
  }

  S nonbasic_value(int j, VarStatus st) const {
    if (st == VarStatus::at_lower) return lo_[j];
    if (st == VarStatus::at_upper) return hi_[j];
    return S{};
  }

  // float feasibility slack relative to the bound magnitude; exact runs use 0
  double ftol(const S& ref) const {
    if constexpr (exact_) {
      (void)ref;
      return 0.0;
    } else {
      return opt_.feas_tol * (1.0 + std::fabs(num::to_double(ref)));
    }
  }
  bool le_tol(const S& a, const S& b, double tol) const {
    if constexpr (exact_) return a <= b;
    else return num::to_double(a) <= num::to_double(b) + tol;
  }

  void update_cost_scale() {
    cost_mx_ = 0.0;
    for (const S& c : cost_) cost_mx_ = std::max(cost_mx_, std::fabs(num::to_double(c)));
    dtol_ = exact_ ? 0.0 : opt_.opt_tol * (1.0 + cost_mx_);
  }

  bool neg_d(const S& d) const {
    if constexpr (exact_) return num::sign(d) < 0;
    else return num::to_double(d) < -dtol_;
  }
  bool pos_d(const S& d) const {
    if constexpr (exact_) return num::sign(d) > 0;
    else return num::to_double(d) > dtol_;
  }

  // dense += W_j * v, original row space
  void add_col_times(int j, const S& v, std::vector<S>& dense) const {
    if (j < n_) {
      for (int idx = cptr_[j]; idx < cptr_[j + 1]; ++idx) dense[crow_[idx]] += cval_[idx] * v;
    } else if (j < n_ + m_) {
      dense[j - n_] -= v;
    } else {
      dense[j - n_ - m_] += v;
    }
  }

  bool refactor() {
    etas_.clear();
    return fac_.factorize(m_, [&](int k, std::vector<int>& rows, std::vector<S>& vals) {
      const int j = basic_[k];
      if (j < n_) {
        for (int idx = cptr_[j]; idx < cptr_[j + 1]; ++idx) {
          rows.push_back(crow_[idx]);
          vals.push_back(cval_[idx]);
        }
      } else if (j < n_ + m_) {
        rows.push_back(j - n_);
        vals.push_back(S(-1));
      } else {
        rows.push_back(j - n_ - m_);
        vals.push_back(S(1));
      }
    });
  }
  void refactor_or_throw() {
    if (!refactor()) throw SolverError("simplex: basis factorization failed");
  }

  // out := B^{-1} b, b in original row space, result indexed by basis slot
  void ftran(const std::vector<S>& borig, std::vector<S>& out) {
    out.resize(m_);
    for (int k = 0; k < m_; ++k) out[k] = borig[fac_.row_of_pos(k)];
    fac_.lsolve(out);
    fac_.usolve(out);
    for (const Eta& e : etas_) {
      S& vp = out[e.p];
      vp /= e.diag;
      if (num::sign(vp) == 0) continue;
      for (const auto& [i, a] : e.off) out[i] -= a * vp;
    }
  }

  // yorig := B^{-T} c, c indexed by basis slot (destroyed)
  void btran(std::vector<S>& c, std::vector<S>& yorig) {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      S acc = c[it->p];
      for (const auto& [i, a] : it->off) acc -= a * c[i];
      acc /= it->diag;
      c[it->p] = acc;
    }
    fac_.utsolve(c);
    fac_.ltsolve(c);
    yorig.resize(m_);
    for (int k = 0; k < m_; ++k) yorig[fac_.row_of_pos(k)] = c[k];
  }

  // solve B x_B = -(sum of nonbasic columns at their values)
  void compute_x_basic() {
    std::fill(origv_.begin(), origv_.end(), S{});
    for (int j = 0; j < ncols_; ++j) {
      if (in_basis_[j] >= 0 || num::sign(xval_[j]) == 0) continue;
      add_col_times(j, xval_[j], origv_);
    }
    for (int r = 0; r < m_; ++r) origv_[r] = -origv_[r];
    ftran(origv_, slotv_);
    for (int p = 0; p < m_; ++p) xval_[basic_[p]] = slotv_[p];
  }

  // slack basis; rows whose activity violates a bound get a phase-1
  // artificial whose open side and unit cost point back toward zero
  void cold_start() {
    etas_.clear();
    in_basis_.assign(ncols_, -1);
    for (int j = 0; j < ncols_; ++j) {
      if (!lof_[j]) vstat_[j] = VarStatus::at_lower;
      else if (!hif_[j]) vstat_[j] = VarStatus::at_upper;
      else vstat_[j] = VarStatus::free_zero;
      xval_[j] = nonbasic_value(j, vstat_[j]);
    }
    std::vector<S> act(m_, S{});
    for (int j = 0; j < n_; ++j) {
      if (num::sign(xval_[j]) == 0) continue;
      for (int idx = cptr_[j]; idx < cptr_[j + 1]; ++idx) act[crow_[idx]] += cval_[idx] * xval_[j];
    }
    infeas_scale_ = 0.0;
    int violated = 0;
    for (int r = 0; r < m_; ++r) {
      const int lj = n_ + r;
      const int aj = n_ + m_ + r;
      lo_[aj] = S{};
      hi_[aj] = S{};
      lof_[aj] = hif_[aj] = 0;
      vstat_[aj] = VarStatus::at_lower;
      xval_[aj] = S{};
      const bool low_ok = lof_[lj] || le_tol(lo_[lj], act[r], ftol(lo_[lj]));
      const bool high_ok = hif_[lj] || le_tol(act[r], hi_[lj], ftol(hi_[lj]));
      if (low_ok && high_ok) {
        basic_[r] = lj;
        vstat_[lj] = VarStatus::basic;
        in_basis_[lj] = r;
        xval_[lj] = act[r];
        continue;
      }
      // pin the logical on its near bound, the artificial absorbs the rest
      vstat_[lj] = high_ok ? VarStatus::at_lower : VarStatus::at_upper;
      xval_[lj] = nonbasic_value(lj, vstat_[lj]);
      S resid = xval_[lj] - act[r];
      if (num::sign(resid) > 0) {
        hif_[aj] = 1;  // value in [0, inf), pulled down by cost +1
      } else {
        lof_[aj] = 1;  // value in (-inf, 0], pulled up by cost -1
      }
      basic_[r] = aj;
      vstat_[aj] = VarStatus::basic;
      in_basis_[aj] = r;
      xval_[aj] = resid;
      ++violated;
      infeas_scale_ = std::max(infeas_scale_, std::fabs(num::to_double(resid)));
    }
    if (violated > 0) {
      phase_ = 1;
      cost_.assign(ncols_, S{});
      for (int r = 0; r < m_; ++r) {
        const int aj = n_ + m_ + r;
        if (in_basis_[aj] < 0) continue;
        cost_[aj] = num::sign(xval_[aj]) > 0 ? S(1) : S(-1);
      }
    } else {
      phase_ = 2;
      cost_ = phase2_cost_;
    }
    update_cost_scale();
    refactor_or_throw();
    compute_x_basic();
  }

  // a warm basis is adopted only if it factorizes and is primal feasible;
  // anything else falls back to the cold start
  bool load_warm(const Basis& b) {
    if (static_cast<int>(b.basic.size()) != m_) return false;
    const size_t nv = b.vstat.size();
    if (nv != static_cast<size_t>(n_ + m_) && nv != static_cast<size_t>(ncols_)) return false;
    for (int r = 0; r < m_; ++r) {
      const int aj = n_ + m_ + r;
      lo_[aj] = S{};
      hi_[aj] = S{};
      lof_[aj] = hif_[aj] = 0;
    }
    for (int j = 0; j < ncols_; ++j) {
      VarStatus st = static_cast<size_t>(j) < nv ? b.vstat[j] : VarStatus::at_lower;
      if (st == VarStatus::basic) st = VarStatus::at_lower;  // fixed up from the slot list
      if (st == VarStatus::at_lower && lof_[j]) st = hif_[j] ? VarStatus::free_zero : VarStatus::at_upper;
      if (st == VarStatus::at_upper && hif_[j]) st = lof_[j] ? VarStatus::free_zero : VarStatus::at_lower;
      if (st == VarStatus::free_zero && !lof_[j]) st = VarStatus::at_lower;
      else if (st == VarStatus::free_zero && !hif_[j]) st = VarStatus::at_upper;
      vstat_[j] = st;
      xval_[j] = nonbasic_value(j, st);
    }
    in_basis_.assign(ncols_, -1);
    for (int p = 0; p < m_; ++p) {
      const int j = b.basic[p];
      if (j < 0 || j >= ncols_ || in_basis_[j] >= 0) return false;
      basic_[p] = j;
      in_basis_[j] = p;
      vstat_[j] = VarStatus::basic;
    }
    phase_ = 2;
    cost_ = phase2_cost_;
    update_cost_scale();
    if (!refactor()) {
      if (opt_.trace_every > 0) std::fprintf(stderr, "simplex: warm rejected (singular)\n");
      return false;
    }
    compute_x_basic();
    for (int p = 0; p < m_; ++p) {
      const int i = basic_[p];
      if ((!lof_[i] && !le_tol(lo_[i], xval_[i], ftol(lo_[i]))) ||
          (!hif_[i] && !le_tol(xval_[i], hi_[i], ftol(hi_[i])))) {
        if (opt_.trace_every > 0)
          std::fprintf(stderr, "simplex: warm rejected (basic %d = %.12g outside [%.12g, %.12g])\n",
                       i, num::to_double(xval_[i]), lof_[i] ? -kInf : num::to_double(lo_[i]),
                       hif_[i] ? kInf : num::to_double(hi_[i]));
        return false;
      }
    }
    return true;
  }

  S reduced_cost(int j, const std::vector<S>& y) const {
    S d = cost_[j];
    if (j < n_) {
      for (int idx = cptr_[j]; idx < cptr_[j + 1]; ++idx) d -= cval_[idx] * y[crow_[idx]];
    } else if (j < n_ + m_) {
      d += y[j - n_];
    } else {
      d -= y[j - n_ - m_];
    }
    return d;
  }

  // Dantzig pricing, or first eligible index once Bland's rule is active
  int price(const std::vector<S>& y, S& d_out, int& s_out) const {
    int best = -1;
    double best_score = -1.0;
    for (int j = 0; j < ncols_; ++j) {
      if (in_basis_[j] >= 0) continue;
      if (!lof_[j] && !hif_[j] && !(lo_[j] < hi_[j])) continue;  // fixed in place
      S d = reduced_cost(j, y);
      int dir = 0;
      switch (vstat_[j]) {
        case VarStatus::at_lower:
          if (neg_d(d)) dir = 1;
          break;
        case VarStatus::at_upper:
          if (pos_d(d)) dir = -1;
          break;
        case VarStatus::free_zero:
          if (neg_d(d)) dir = 1;
          else if (pos_d(d)) dir = -1;
          break;
        default:
          break;
      }
      if (dir == 0) continue;
      if (bland_) {
        d_out = d;
        s_out = dir;
        return j;
      }
      const double score = std::fabs(num::to_double(d));
      if (score > best_score) {
        best = j;
        best_score = score;
        d_out = d;
        s_out = dir;
      }
    }
    return best;
  }

  Step iterate() {
    if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
      refactor_or_throw();
      compute_x_basic();
    }
    for (int p = 0; p < m_; ++p) cb_[p] = cost_[basic_[p]];
    btran(cb_, yrow_);
    S d_e{};
    int s = 0;
    const int e = price(yrow_, d_e, s);
    if (e < 0) return Step::optimal;
    std::fill(origv_.begin(), origv_.end(), S{});
    add_col_times(e, S(1), origv_);
    ftran(origv_, wvec_);
    return pivot(e, d_e, s);
  }

  Step pivot(int e, const S& d_e, int s) {
    // the entering variable can at most traverse its own range
    bool own_finite = false;
    S own_t{};
    if ((vstat_[e] == VarStatus::at_lower || vstat_[e] == VarStatus::at_upper) && !lof_[e] && !hif_[e]) {
      own_finite = true;
      own_t = hi_[e] - lo_[e];
    }
    int slot = -1;
    bool slot_to_upper = false;
    S t{};

    if constexpr (exact_) {
      bool have_t = false;
      if (own_finite) {
        t = own_t;
        have_t = true;
      }
      for (int p = 0; p < m_; ++p) {
        if (num::sign(wvec_[p]) == 0) continue;
        const int i = basic_[p];
        // basic variable i moves by -s * w_p per unit step
        const int dsign = s > 0 ? -num::sign(wvec_[p]) : num::sign(wvec_[p]);
        S room{};
        bool to_upper;
        if (dsign > 0) {
          if (hif_[i]) continue;
          room = hi_[i] - xval_[i];
          to_upper = true;
        } else {
          if (lof_[i]) continue;
          room = xval_[i] - lo_[i];
          to_upper = false;
        }
        S ratio = room / num::abs_val(wvec_[p]);
        // ties go to the smallest variable index (Bland-compatible); a tie
        // against the bound flip keeps the basis change
        if (!have_t || ratio < t || (ratio == t && (slot < 0 || i < basic_[slot]))) {
          slot = p;
          slot_to_upper = to_upper;
          t = ratio;
          have_t = true;
        }
      }
      if (!have_t) return Step::unbounded;
    } else {
      const double own = own_finite ? num::to_double(own_t) : kInf;
      // pass 1: loosest step each bound allows within the feasibility slack
      double tmax = own;
      for (int p = 0; p < m_; ++p) {
        const double w = num::to_double(wvec_[p]);
        if (std::fabs(w) <= opt_.pivot_tol) continue;
        const int i = basic_[p];
        double delta = s > 0 ? -w : w;
        double room, tol;
        if (delta > 0) {
          if (hif_[i]) continue;
          room = num::to_double(hi_[i]) - num::to_double(xval_[i]);
          tol = ftol(hi_[i]);
        } else {
          if (lof_[i]) continue;
          room = num::to_double(xval_[i]) - num::to_double(lo_[i]);
          tol = ftol(lo_[i]);
          delta = -delta;
        }
        const double r = (room + tol) / delta;
        if (r < tmax) tmax = r;
      }
      if (tmax == kInf) return Step::unbounded;
      if (tmax < 0) tmax = 0;
      // pass 2: among steps within tmax take the largest pivot element
      double bestw = 0.0, strict = kInf;
      for (int p = 0; p < m_; ++p) {
        const double w = num::to_double(wvec_[p]);
        if (std::fabs(w) <= opt_.pivot_tol) continue;
        const int i = basic_[p];
        double delta = s > 0 ? -w : w;
        bool to_upper;
        double room;
        if (delta > 0) {
          if (hif_[i]) continue;
          room = num::to_double(hi_[i]) - num::to_double(xval_[i]);
          to_upper = true;
        } else {
          if (lof_[i]) continue;
          room = num::to_double(xval_[i]) - num::to_double(lo_[i]);
          to_upper = false;
          delta = -delta;
        }
        double r = room / delta;
        if (r < 0) r = 0;
        if (r <= tmax && std::fabs(w) > bestw) {
          bestw = std::fabs(w);
          slot = p;
          slot_to_upper = to_upper;
          strict = r;
        }
      }
      double tt = slot >= 0 ? strict : own;
      if (own <= tt) {  // flip is as tight as any pivot: cheaper, no eta
        slot = -1;
        tt = own;
      }
      if (slot < 0 && !own_finite) return Step::unbounded;
      t = S(tt);
    }

    // move the basic variables: x_i += t * (-s * w_p)
    if (num::sign(t) != 0) {
      S st = t;
      if (s < 0) st = -st;
      for (int p = 0; p < m_; ++p) {
        if (num::sign(wvec_[p]) == 0) continue;
        xval_[basic_[p]] -= st * wvec_[p];
      }
    }
    S enter_val = xval_[e];
    {
      S st = t;
      if (s < 0) st = -st;
      enter_val += st;
    }
    if (slot < 0) {
      vstat_[e] = vstat_[e] == VarStatus::at_lower ? VarStatus::at_upper : VarStatus::at_lower;
      xval_[e] = nonbasic_value(e, vstat_[e]);  // land exactly on the far bound
    } else {
      const int l = basic_[slot];
      vstat_[l] = slot_to_upper ? VarStatus::at_upper : VarStatus::at_lower;
      xval_[l] = nonbasic_value(l, vstat_[l]);  // snap the leaver onto its bound
      in_basis_[l] = -1;
      basic_[slot] = e;
      in_basis_[e] = slot;
      vstat_[e] = VarStatus::basic;
      xval_[e] = enter_val;
      Eta eta;
      eta.p = slot;
      eta.diag = wvec_[slot];
      for (int p = 0; p < m_; ++p)
        if (p != slot && num::sign(wvec_[p]) != 0) eta.off.emplace_back(p, wvec_[p]);
      etas_.push_back(std::move(eta));
    }
    ++iters_;
    if (phase_ == 1) ++p1_iters_;
    bool improved;
    if constexpr (exact_) {
      improved = num::sign(t) != 0;
    } else {
      improved = std::fabs(num::to_double(d_e)) * num::to_double(t) > 1e-12 * (1.0 + cost_mx_);
    }
    if (improved) {
      stall_ = 0;
    } else if (!bland_ && ++stall_ >= opt_.bland_trigger) {
      bland_ = true;  // stuck in degeneracy: finite-by-construction rule from here on
    }
    return Step::pivoted;
  }

  LpStatus main_loop() {
    int refresh = 0;
    bool retried_unbounded = false;
    for (;;) {
      if (iters_ >= max_iter_) return LpStatus::iteration_limit;
      if (opt_.trace_every > 0 && iters_ > 0 && iters_ % opt_.trace_every == 0) {
        S obj{};
        for (int j = 0; j < ncols_; ++j) {
          if (num::sign(cost_[j]) == 0 || num::sign(xval_[j]) == 0) continue;
          obj += cost_[j] * xval_[j];
        }
        std::fprintf(stderr, "simplex: iter %ld phase %d obj %.9g stall %ld bland %d etas %zu\n",
                     iters_, phase_, num::to_double(obj), stall_, bland_ ? 1 : 0, etas_.size());
      }
      const Step st = iterate();
      if (st == Step::pivoted) {
        retried_unbounded = false;
        continue;
      }
      if (st == Step::unbounded) {
        // in floats, rule out stale eta drift before believing a ray
        if (!exact_ && !etas_.empty() && !retried_unbounded) {
          retried_unbounded = true;
          refactor_or_throw();
          compute_x_basic();
          continue;
        }
        // the phase-1 objective is bounded below, a ray there is a breakdown
        return phase_ == 1 ? LpStatus::iteration_limit : LpStatus::unbounded;
      }
      // optimal for the current phase costs
      if (phase_ == 1) {
        S infeas{};
        for (int r = 0; r < m_; ++r) {
          const int aj = n_ + m_ + r;
          if (num::sign(xval_[aj]) == 0) continue;
          infeas += cost_[aj] * xval_[aj];
        }
        if constexpr (exact_) {
          if (num::sign(infeas) != 0) return LpStatus::infeasible;
        } else {
          if (std::fabs(num::to_double(infeas)) > opt_.feas_tol * (1.0 + infeas_scale_))
            return LpStatus::infeasible;
        }
        for (int r = 0; r < m_; ++r) {  // lock the artificials at zero for good
          const int aj = n_ + m_ + r;
          lo_[aj] = S{};
          hi_[aj] = S{};
          lof_[aj] = hif_[aj] = 0;
        }
        cost_ = phase2_cost_;
        phase_ = 2;
        update_cost_scale();
        refactor_or_throw();
        compute_x_basic();
        refresh = 0;
        stall_ = 0;
        bland_ = opt_.always_bland;
        continue;
      }
      if (!exact_ && !etas_.empty() && refresh < 3) {
        ++refresh;  // confirm optimality from a fresh factorization
        refactor_or_throw();
        compute_x_basic();
        continue;
      }
      return LpStatus::optimal;
    }
  }

  LpSolution<S> extract(LpStatus st) {
    LpSolution<S> out;
    out.status = st;
    out.iterations = iters_;
    out.phase1_iterations = p1_iters_;
    out.from_warm_basis = warm_ok_;
    out.warm_was_optimal = warm_ok_ && st == LpStatus::optimal && iters_ == 0;
    out.basis.vstat = vstat_;
    out.basis.basic = basic_;
    if (st != LpStatus::optimal) return out;
    out.x.assign(xval_.begin(), xval_.begin() + n_);
    S v{};
    for (int j = 0; j < ncols_; ++j) {
      if (num::sign(phase2_cost_[j]) == 0 || num::sign(xval_[j]) == 0) continue;
      v += phase2_cost_[j] * xval_[j];
    }
    if (lp_.maximize) v = -v;
    v += lp_.obj_offset;
    out.value = v;
    for (int p = 0; p < m_; ++p) cb_[p] = phase2_cost_[basic_[p]];
    btran(cb_, yrow_);
    out.row_dual.assign(yrow_.begin(), yrow_.end());
    out.reduced_cost.assign(n_, S{});
    for (int j = 0; j < n_; ++j) {
      if (in_basis_[j] >= 0) continue;  // basic reduced costs are exactly zero
      out.reduced_cost[j] = reduced_cost(j, yrow_);
    }
    if (lp_.maximize) {
      for (S& y : out.row_dual) y = -y;
      for (S& d : out.reduced_cost) d = -d;
    }
    return out;
  }

  struct Eta {
    int p = -1;
    S diag{};
    std::vector<std::pair<int, S>> off;
  };

  const LinearProgram<S>& lp_;
  SimplexOptions opt_;
  int n_ = 0, m_ = 0, ncols_ = 0;
  std::vector<int> cptr_, crow_;
  std::vector<S> cval_;
  std::vector<S> lo_, hi_, cost_, phase2_cost_;
  std::vector<std::uint8_t> lof_, hif_;
  std::vector<VarStatus> vstat_;
  std::vector<S> xval_;
  std::vector<int> basic_, in_basis_;
  Factor<S> fac_;
  std::vector<Eta> etas_;
  std::vector<S> slotv_, origv_, wvec_, yrow_, cb_;
  int phase_ = 2;
  long iters_ = 0, p1_iters_ = 0, stall_ = 0, max_iter_ = 0;
  bool bland_ = false, warm_ok_ = false;
  double cost_mx_ = 0.0, dtol_ = 0.0, infeas_scale_ = 0.0;
};

}  // namespace

template <class S>
LpSolution<S> Simplex<S>::solve(const LinearProgram<S>& lp, const SimplexOptions& opt,
                                const Basis* warm) {
  Worker<S> w(lp, opt);
  return w.run(warm);
}

template <class S>
std::string LinearProgram<S>::var_name(int j) const {
  if (j < static_cast<int>(var_names.size()) && !var_names[j].empty()) return var_names[j];
  return "x" + std::to_string(j);
}

template <class S>
std::string LinearProgram<S>::row_name(int r) const {
  if (r < static_cast<int>(row_names.size()) && !row_names[r].empty()) return row_names[r];
  return "r" + std::to_string(r);
}

template <class S>
void LinearProgram<S>::dump(std::ostream& out) const {
  auto put_term = [&](const S& v, const std::string& nm, bool first) {
    if (num::sign(v) < 0) out << (first ? " -" : " - ");
    else out << (first ? " " : " + ");
    out << fmt_scalar(num::abs_val(v)) << ' ' << nm;
  };
  auto put_row_lhs = [&](int r) {
    bool first = true;
    for (int idx = row_ptr[r]; idx < row_ptr[r + 1]; ++idx) {
      put_term(a[idx], var_name(col[idx]), first);
      first = false;
    }
    if (first) out << " 0 " << (num_vars() > 0 ? var_name(0) : std::string("x0"));
  };
  if (num::sign(obj_offset) != 0) out << "\\ objective offset " << fmt_scalar(obj_offset) << "\n";
  out << (maximize ? "Maximize\n" : "Minimize\n") << " obj:";
  bool any = false;
  for (int j = 0; j < num_vars(); ++j) {
    if (num::sign(obj[j]) == 0) continue;
    put_term(obj[j], var_name(j), !any);
    any = true;
  }
  if (!any && num_vars() > 0) out << " 0 " << var_name(0);
  out << "\nSubject To\n";
  for (int r = 0; r < num_rows(); ++r) {
    const bool two_sided = !rlo_inf[r] && !rhi_inf[r];
    if (two_sided && rlo[r] == rhi[r]) {
      out << ' ' << row_name(r) << ':';
      put_row_lhs(r);
      out << " = " << fmt_scalar(rlo[r]) << "\n";
      continue;
    }
    if (!rlo_inf[r]) {
      out << ' ' << row_name(r) << (two_sided ? "_lo:" : ":");
      put_row_lhs(r);
      out << " >= " << fmt_scalar(rlo[r]) << "\n";
    }
    if (!rhi_inf[r]) {
      out << ' ' << row_name(r) << (two_sided ? "_hi:" : ":");
      put_row_lhs(r);
      out << " <= " << fmt_scalar(rhi[r]) << "\n";
    }
    if (rlo_inf[r] && rhi_inf[r]) {
      out << "\\ " << row_name(r) << ": unconstrained row skipped\n";
    }
  }
  out << "Bounds\n";
  for (int j = 0; j < num_vars(); ++j) {
    const std::string nm = var_name(j);
    if (lo_inf[j] && hi_inf[j]) out << ' ' << nm << " free\n";
    else if (lo_inf[j]) out << " -infinity <= " << nm << " <= " << fmt_scalar(hi[j]) << "\n";
    else if (hi_inf[j]) out << ' ' << nm << " >= " << fmt_scalar(lo[j]) << "\n";
    else if (lo[j] == hi[j]) out << ' ' << nm << " = " << fmt_scalar(lo[j]) << "\n";
    else out << ' ' << fmt_scalar(lo[j]) << " <= " << nm << " <= " << fmt_scalar(hi[j]) << "\n";
  }
  out << "End\n";
}

LinearProgram<mpq_class> lift_exact(const LinearProgram<double>& lp) {
  check_lp(lp);
  LinearProgram<mpq_class> out;
  auto lift = [](double v, bool absent) {
    // flagged-infinite bound values carry no information; keep them at zero
    return absent ? mpq_class() : num::from_double<mpq_class>(v);
  };
  out.obj.reserve(lp.obj.size());
  for (double v : lp.obj) out.obj.push_back(num::from_double<mpq_class>(v));
  out.obj_offset = num::from_double<mpq_class>(lp.obj_offset);
  out.maximize = lp.maximize;
  for (size_t j = 0; j < lp.obj.size(); ++j) {
    out.lo.push_back(lift(lp.lo[j], lp.lo_inf[j] != 0));
    out.hi.push_back(lift(lp.hi[j], lp.hi_inf[j] != 0));
  }
  out.lo_inf = lp.lo_inf;
  out.hi_inf = lp.hi_inf;
  out.row_ptr = lp.row_ptr;
  out.col = lp.col;
  out.a.reserve(lp.a.size());
  for (double v : lp.a) out.a.push_back(num::from_double<mpq_class>(v));
  for (size_t r = 0; r < lp.rlo.size(); ++r) {
    out.rlo.push_back(lift(lp.rlo[r], lp.rlo_inf[r] != 0));
    out.rhi.push_back(lift(lp.rhi[r], lp.rhi_inf[r] != 0));
  }
  out.rlo_inf = lp.rlo_inf;
  out.rhi_inf = lp.rhi_inf;
  out.var_names = lp.var_names;
  out.row_names = lp.row_names;
  return out;
}

LpSolution<double> solve_robust(const LinearProgram<double>& lp, const SimplexOptions& opt,
                                const Basis* warm) {
  // a stage that throws (mid-run refactorization can hit a numerically
  // singular basis) degrades into a default solution whose empty basis the
  // next stage rejects, so the chain falls through to a cold start instead
  const auto attempt = [&lp](const SimplexOptions& o, const Basis* w) {
    try {
      return Simplex<double>().solve(lp, o, w);
    } catch (const SolverError&) {
      return LpSolution<double>{};
    }
  };
  const long scaled = 10000 + 50L * (lp.num_vars() + lp.num_rows());
  SimplexOptions first = opt;
  first.max_iter = opt.max_iter >= 0 ? opt.max_iter : 1000 + (lp.num_vars() + lp.num_rows()) / 2;
  first.bland_trigger = std::numeric_limits<long>::max();  // the cap already bounds the run
  LpSolution<double> sol = attempt(first, warm);
  if (sol.status != LpStatus::iteration_limit) return sol;

  // stalled: re-solve with every nonzero objective coefficient nudged by a
  // deterministic relative epsilon. that breaks the reduced-cost ties that
  // make Dantzig pricing thrash across degenerate plateaus, and since the
  // feasible set is untouched the final basis stays primal feasible for the
  // true problem -- the cleanup run below always warm-starts and usually
  // only has to confirm optimality. cold on purpose: the stalled basis is
  // deep in the degenerate labyrinth and dragging it along defeats the
  // perturbation.
  LinearProgram<double> pert = lp;
  SplitMix64 rng(0xb5ad4eceda1ce2a9ull ^
                 (static_cast<std::uint64_t>(lp.num_vars()) << 32) ^
                 static_cast<std::uint64_t>(lp.num_rows()));
  for (int j = 0; j < pert.num_vars(); ++j)
    if (pert.obj[j] != 0.0) pert.obj[j] *= 1.0 + 1e-7 * rng.uniform01();
  SimplexOptions wide = first;
  wide.max_iter = scaled;
  LpSolution<double> ps;
  try {
    ps = Simplex<double>().solve(pert, wide);
  } catch (const SolverError&) {
    ps = LpSolution<double>{};
  }
  const long spent = sol.iterations + ps.iterations;
  const long spent1 = sol.phase1_iterations + ps.phase1_iterations;
  if (ps.status == LpStatus::infeasible) {
    // feasibility does not depend on the objective: the verdict transfers
    ps.iterations = spent;
    ps.phase1_iterations = spent1;
    return ps;
  }
  // a perturbed-unbounded verdict does not transfer (a ray with zero true
  // gain can pick up a positive perturbed gain), so anything except optimal
  // falls through to the plain runs below with an empty warm basis
  SimplexOptions fin = opt;
  fin.max_iter = opt.max_iter >= 0 ? opt.max_iter : scaled;
  LpSolution<double> out =
      attempt(fin, ps.status == LpStatus::optimal ? &ps.basis : nullptr);
  if (out.status == LpStatus::iteration_limit) {
    SimplexOptions last = fin;
    last.always_bland = true;  // guaranteed-finite final resort
    out = Simplex<double>().solve(lp, last, &out.basis);
  }
  out.iterations += spent;
  out.phase1_iterations += spent1;
  return out;
}

ModeSolution solve_with_mode(const LinearProgram<double>& float_lp,
                             const LinearProgram<mpq_class>* exact_lp, ArithMode mode,
                             const SimplexOptions& opt) {
  ModeSolution out;
  out.approx = solve_robust(float_lp, opt);
  if (mode == ArithMode::float_only) return out;
  std::optional<LinearProgram<mpq_class>> lifted;
  if (exact_lp == nullptr) {
    lifted = lift_exact(float_lp);
    exact_lp = &*lifted;
  }
  Simplex<mpq_class> se;
  if (mode == ArithMode::exact) {
    out.exact = se.solve(*exact_lp, opt);
    return out;
  }
  if (out.approx.status == LpStatus::optimal) {
    LpSolution<mpq_class> ex = se.solve(*exact_lp, opt, &out.approx.basis);
    out.certified_first_try = ex.from_warm_basis && ex.warm_was_optimal;
    out.exact = std::move(ex);
  } else {
    out.exact = se.solve(*exact_lp, opt);  // do not trust a failed float run
  }
  return out;
}

template struct LinearProgram<double>;
template struct LinearProgram<mpq_class>;
template class Simplex<double>;
template class Simplex<mpq_class>;

}  // namespace partopt
