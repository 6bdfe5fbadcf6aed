#include "partopt/relint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "partopt/model.hpp"
#include "partopt/rational.hpp"

namespace partopt {

namespace {

// the original feasible set with the objective pinned to its value at the
// optimal vertex we were handed (a small band in float, exact equality in
// rational arithmetic)
template <class S>
LinearProgram<S> face_lp(const LinearProgram<S>& lp, const std::vector<S>& xstar,
                         double gap_tol) {
  LinearProgram<S> face = lp;
  face.maximize = false;
  std::fill(face.obj.begin(), face.obj.end(), S{});
  S cx{};
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (num::sign(lp.obj[j]) == 0) continue;
    S term = lp.obj[j];
    term *= xstar[j];
    cx += term;
  }
  S delta{};
  if constexpr (!num::is_exact<S>) delta = gap_tol * (1.0 + std::fabs(cx));
  S lo_v = cx;
  lo_v -= delta;
  S hi_v = cx;
  hi_v += delta;
  face.begin_row(std::move(lo_v), std::move(hi_v));
  for (int j = 0; j < lp.num_vars(); ++j)
    if (num::sign(lp.obj[j]) != 0) face.coef(j, lp.obj[j]);
  return face;
}

LinearProgram<double> lowered(const LinearProgram<mpq_class>& q) {
  LinearProgram<double> f;
  f.maximize = q.maximize;
  f.obj_offset = num::to_double(q.obj_offset);
  const auto conv = [](const std::vector<mpq_class>& v) {
    std::vector<double> o(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) o[i] = num::to_double(v[i]);
    return o;
  };
  f.obj = conv(q.obj);
  f.lo = conv(q.lo);
  f.hi = conv(q.hi);
  f.lo_inf = q.lo_inf;
  f.hi_inf = q.hi_inf;
  f.row_ptr = q.row_ptr;
  f.col = q.col;
  f.a = conv(q.a);
  f.rlo = conv(q.rlo);
  f.rhi = conv(q.rhi);
  f.rlo_inf = q.rlo_inf;
  f.rhi_inf = q.rhi_inf;
  return f;
}

template <class S>
bool at_lower(const LinearProgram<S>& lp, const std::vector<S>& x, int j, double supp_tol) {
  S d = x[j];
  d -= lp.lo[j];
  if constexpr (num::is_exact<S>)
    return num::sign(d) <= 0;
  else
    return num::to_double(d) <= supp_tol;
}

// coordinates that sit on a finite lower bound they could in principle leave
template <class S>
std::vector<int> zero_set(const LinearProgram<S>& lp, const std::vector<S>& x, double supp_tol) {
  std::vector<int> z;
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.lo_inf[j]) continue;
    if (!lp.hi_inf[j] && !(lp.lo[j] < lp.hi[j])) continue;  // fixed
    if (at_lower(lp, x, j, supp_tol)) z.push_back(j);
  }
  return z;
}

template <class S>
RelintResult<S> run(const LinearProgram<S>& lp, const LpSolution<S>& sol,
                    const RelintOptions& opt, bool batched) {
  if (sol.status != LpStatus::optimal)
    throw std::invalid_argument("max_support_point: needs an optimal solution");
  const int n = lp.num_vars();

  RelintResult<S> res;
  res.positive.assign(n, 0);
  for (int j = 0; j < n; ++j)
    if (lp.lo_inf[j] || !at_lower(lp, sol.x, j, opt.supp_tol)) res.positive[j] = 1;

  std::vector<std::vector<S>> points;
  points.push_back(sol.x);
  const LinearProgram<S> face = face_lp(lp, sol.x, opt.gap_tol);
  std::vector<int> zero = zero_set(lp, sol.x, opt.supp_tol);
  const S sigma = num::from_double<S>(opt.sigma);
  const int round_cap = batched ? opt.max_rounds : static_cast<int>(zero.size()) + 1;

  while (!zero.empty() && res.rounds < round_cap) {
    const std::vector<int> targets =
        batched ? zero : std::vector<int>{zero.front()};
    // ask the face to lift each target a little; t_j measures the rise of x_j
    LinearProgram<S> aux = face;
    aux.maximize = true;
    for (int j : targets) {
      S cap = sigma;
      if (!lp.hi_inf[j]) {
        S room = lp.hi[j];
        room -= lp.lo[j];
        if (room < cap) cap = room;
      }
      const int t = aux.add_var(S{}, std::move(cap), S(1));
      aux.begin_row_ge(lp.lo[j]);
      aux.coef(j, S(1));
      aux.coef(t, S(-1));
    }
    // the optimal basis we were handed extends to a primal feasible basis of
    // the auxiliary LP: keep it for the original rows (remapping logical and
    // artificial columns past the new t variables) and make the logicals of
    // the face row and of every target row basic (all t_j start at zero).
    // this skips phase 1 and starts the lift where the face was found.
    Basis warm;
    const int naux = aux.num_vars();
    const int maux = aux.num_rows();
    warm.vstat.assign(naux + maux, VarStatus::at_lower);
    for (int j = 0; j < n; ++j) warm.vstat[j] = sol.basis.vstat[j];
    for (int r = 0; r < lp.num_rows(); ++r)
      warm.vstat[naux + r] = sol.basis.vstat[n + r];
    warm.basic.resize(maux);
    for (int r = 0; r < lp.num_rows(); ++r) {
      const int b = sol.basis.basic[r];
      warm.basic[r] = b < n                   ? b
                      : b < n + lp.num_rows() ? naux + (b - n)
                                              : naux + maux + (b - n - lp.num_rows());
    }
    for (int r = lp.num_rows(); r < maux; ++r) {
      warm.basic[r] = naux + r;
      warm.vstat[naux + r] = VarStatus::basic;
    }
    // rational pivots are far too slow to walk the whole lift: take the
    // pivots in double and certify the final basis with a warm-started exact
    // re-solve (one factorization when the float basis is exactly optimal)
    LpSolution<S> asol;
    if constexpr (num::is_exact<S>) {
      const auto fsol = solve_robust(lowered(aux), opt.simplex, &warm);
      asol = Simplex<S>().solve(aux, opt.simplex,
                                fsol.status == LpStatus::optimal ? &fsol.basis : &warm);
    } else {
      asol = solve_robust(aux, opt.simplex, &warm);
    }
    if (asol.status != LpStatus::optimal)
      throw SolverError("max_support_point: auxiliary face LP did not solve");
    ++res.rounds;

    std::vector<S> pt(asol.x.begin(), asol.x.begin() + n);
    bool lifted_target = false;
    for (int j : targets)
      if (!at_lower(lp, pt, j, opt.rise_tol)) lifted_target = true;
    if (!lifted_target) {
      if (batched) break;  // nothing left on the face can rise
      zero.erase(zero.begin());  // this coordinate is pinned; move on
      continue;
    }
    std::vector<int> still;
    for (int j : zero) {
      if (at_lower(lp, pt, j, opt.rise_tol))
        still.push_back(j);
      else
        res.positive[j] = 1;
    }
    points.push_back(std::move(pt));
    zero.swap(still);
  }

  // average of all face points keeps every coordinate any of them lifted
  res.point.assign(n, S{});
  for (const auto& p : points)
    for (int j = 0; j < n; ++j) res.point[j] += p[j];
  const S cnt = num::from_double<S>(static_cast<double>(points.size()));
  for (int j = 0; j < n; ++j) res.point[j] /= cnt;
  return res;
}

}  // namespace

template <class S>
RelintResult<S> max_support_point(const LinearProgram<S>& lp, const LpSolution<S>& sol,
                                  const RelintOptions& opt) {
  return run(lp, sol, opt, true);
}

template <class S>
RelintResult<S> max_support_point_each(const LinearProgram<S>& lp, const LpSolution<S>& sol,
                                       const RelintOptions& opt) {
  return run(lp, sol, opt, false);
}

template RelintResult<double> max_support_point<double>(const LinearProgram<double>&,
                                                        const LpSolution<double>&,
                                                        const RelintOptions&);
template RelintResult<mpq_class> max_support_point<mpq_class>(const LinearProgram<mpq_class>&,
                                                              const LpSolution<mpq_class>&,
                                                              const RelintOptions&);
template RelintResult<double> max_support_point_each<double>(const LinearProgram<double>&,
                                                             const LpSolution<double>&,
                                                             const RelintOptions&);
template RelintResult<mpq_class> max_support_point_each<mpq_class>(const LinearProgram<mpq_class>&,
                                                                   const LpSolution<mpq_class>&,
                                                                   const RelintOptions&);

}  // namespace partopt
