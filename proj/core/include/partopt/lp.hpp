#ifndef PARTOPT_LP_HPP
#define PARTOPT_LP_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "partopt/rational.hpp"

namespace partopt {

// general LP container, always in minimization sense unless maximize is set:
//
//   min  <obj, x> + obj_offset
//   s.t. rlo_r <= (A x)_r <= rhi_r   for every row r
//        lo_j  <=    x_j  <= hi_j    for every variable j
//
// equality rows are ranges with rlo == rhi; one-sided rows/bounds mark the
// absent side infinite via the *_inf flags (the parallel value is ignored).
// rows are stored CSR. templated on the scalar so the same construction code
// yields a float LP and a bit-exact rational LP.
template <class S>
struct LinearProgram {
  std::vector<S> obj;
  S obj_offset{};
  bool maximize = false;

  std::vector<S> lo, hi;
  std::vector<std::uint8_t> lo_inf, hi_inf;

  std::vector<int> row_ptr{0};
  std::vector<int> col;
  std::vector<S> a;
  std::vector<S> rlo, rhi;
  std::vector<std::uint8_t> rlo_inf, rhi_inf;

  std::vector<std::string> var_names;  // optional, for dump/debug
  std::vector<std::string> row_names;

  int num_vars() const { return static_cast<int>(obj.size()); }
  int num_rows() const { return static_cast<int>(rlo.size()); }
  int nnz() const { return static_cast<int>(a.size()); }

  int add_var(S lo_v, S hi_v, S cost) {
    obj.push_back(cost);
    lo.push_back(lo_v);
    hi.push_back(hi_v);
    lo_inf.push_back(0);
    hi_inf.push_back(0);
    return num_vars() - 1;
  }
  int add_var_lb(S lo_v, S cost) {  // [lo, +inf)
    int j = add_var(lo_v, S{}, cost);
    hi_inf.back() = 1;
    return j;
  }
  int add_free_var(S cost) {
    int j = add_var(S{}, S{}, cost);
    lo_inf.back() = 1;
    hi_inf.back() = 1;
    return j;
  }

  // rows are built append-only: begin_row*() then coef() calls
  void begin_row(S lo_r, S hi_r) {
    rlo.push_back(lo_r);
    rhi.push_back(hi_r);
    rlo_inf.push_back(0);
    rhi_inf.push_back(0);
    row_ptr.push_back(static_cast<int>(a.size()));
  }
  void begin_row_eq(S b) { begin_row(b, b); }
  void begin_row_ge(S b) {
    begin_row(b, S{});
    rhi_inf.back() = 1;
  }
  void coef(int var, S val) {
    col.push_back(var);
    a.push_back(std::move(val));
    row_ptr.back() = static_cast<int>(a.size());
  }

  std::string var_name(int j) const;  // falls back to x<j> when unnamed
  std::string row_name(int r) const;
  void dump(std::ostream& out) const;  // CPLEX-style LP text format
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

// nonbasic-at-lower / nonbasic-at-upper / basic / nonbasic free at zero
enum class VarStatus : std::uint8_t { at_lower, at_upper, basic, free_zero };

// simplex basis over the n structural + m logical (row activity) variables;
// logical of row r has index n + r. exchangeable between the float and exact
// instantiations, which is what the certification pipeline relies on.
struct Basis {
  std::vector<VarStatus> vstat;  // size n + m
  std::vector<int> basic;        // size m: variable occupying each basis slot
};

template <class S>
struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  S value{};
  std::vector<S> x;             // structural variable values
  std::vector<S> row_dual;      // y with reduced costs d_j = c_j - y^T A_j
  std::vector<S> reduced_cost;  // structural reduced costs (minimization sense)
  Basis basis;
  long iterations = 0;
  long phase1_iterations = 0;
  bool from_warm_basis = false;
  // warm start supplied, accepted, and already optimal (certification hit)
  bool warm_was_optimal = false;
};

struct SimplexOptions {
  double feas_tol = 1e-8;    // primal feasibility (float instantiation only)
  double opt_tol = 1e-9;     // reduced-cost optimality threshold
  double pivot_tol = 1e-9;   // smallest acceptable pivot magnitude
  int refactor_interval = 64;
  long max_iter = -1;        // -1: scaled from problem size
  long bland_trigger = 1000; // non-improving iterations before Bland's rule
  bool always_bland = false;
  long trace_every = 0;      // stderr progress line every N iterations (0: off)
};

// bounded-variable revised simplex over W = [A | -I] z = 0 with sparse LU
// basis factorization and product-form updates. phase 1 uses explicit
// artificial columns; with an all-zero feasible origin (every reduced dual
// program here) phase 1 vanishes. the mpq_class instantiation compares
// exactly and, together with the Bland fallback, terminates deterministically.
template <class S>
class Simplex {
 public:
  // warm: optional starting basis (e.g. from the float run). it is used only
  // if it factorizes and is primal feasible; otherwise a cold start runs.
  LpSolution<S> solve(const LinearProgram<S>& lp, const SimplexOptions& opt = {},
                      const Basis* warm = nullptr);
};

extern template class Simplex<double>;
extern template class Simplex<mpq_class>;
extern template struct LinearProgram<double>;
extern template struct LinearProgram<mpq_class>;

// exact conversion: value-preserving lift of a float LP (dyadic rationals)
LinearProgram<mpq_class> lift_exact(const LinearProgram<double>& lp);

// float solve hardened against degenerate stalling. a plain run gets a small
// iteration budget; if that runs out, every finite bound is relaxed outward
// by a deterministic tiny random amount (breaking the ties that cause the
// stall), the perturbed problem is solved, and the true problem is finished
// from the perturbed basis. iteration counts accumulate across the attempts.
LpSolution<double> solve_robust(const LinearProgram<double>& lp, const SimplexOptions& opt = {},
                                const Basis* warm = nullptr);

enum class ArithMode { float_only, exact, certified };

// solves in the requested mode. certified: float solve, then the final basis
// is re-checked in exact arithmetic against the exact LP; on mismatch the
// exact simplex continues from that basis (or cold-starts if it is not even
// primal feasible). exact_lp may be null for float_only.
struct ModeSolution {
  LpSolution<double> approx;                  // always populated
  std::optional<LpSolution<mpq_class>> exact; // populated unless float_only
  bool certified_first_try = false;
};
ModeSolution solve_with_mode(const LinearProgram<double>& float_lp,
                             const LinearProgram<mpq_class>* exact_lp, ArithMode mode,
                             const SimplexOptions& opt = {});

}  // namespace partopt

#endif
