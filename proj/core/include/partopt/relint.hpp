#ifndef PARTOPT_RELINT_HPP
#define PARTOPT_RELINT_HPP

#include <vector>

#include "partopt/lp.hpp"

namespace partopt {

// search for a maximal-support point of an LP's optimal face: a feasible
// point with optimal objective that sits strictly above its lower bound in
// every coordinate that any optimal solution lifts. for problems whose
// geometry lives in the nonnegative coordinates (marginals), this is a point
// of the relative interior of the optimal face, which is what the support
// based pruning rules consume.

struct RelintOptions {
  double sigma = 1.0 / 1024;  // per-round cap on the requested rise per coordinate
  double gap_tol = 1e-7;      // face thickness for float solves, scaled by 1+|c x*|; exact uses 0
  double supp_tol = 1e-7;     // float threshold for "sits on its lower bound" at the start
  // float threshold for "actually rose" during a round. must stay well above
  // the rise the face band itself permits (about gap_tol over the reduced
  // cost), otherwise near-optimal coordinates masquerade as support. exact
  // arithmetic ignores both thresholds.
  double rise_tol = 1.0 / 8192;
  int max_rounds = 64;  // safety net; each productive round shrinks the zero set
  SimplexOptions simplex;
};

template <class S>
struct RelintResult {
  std::vector<S> point;        // average of every face point collected
  std::vector<char> positive;  // per variable: strictly above its lower bound on the face
  int rounds = 0;
};

// batched search: repeatedly asks one auxiliary LP to lift all still-zero
// coordinates at once (each by at most sigma), keeps the points it visits and
// returns their average. terminates when no remaining coordinate can move,
// which in exact arithmetic certifies the support is maximal.
template <class S>
RelintResult<S> max_support_point(const LinearProgram<S>& lp, const LpSolution<S>& sol,
                                  const RelintOptions& opt = {});

// reference variant lifting one coordinate per solve; same result, far more
// LPs. kept as an oracle for tests.
template <class S>
RelintResult<S> max_support_point_each(const LinearProgram<S>& lp, const LpSolution<S>& sol,
                                       const RelintOptions& opt = {});

extern template RelintResult<double> max_support_point<double>(const LinearProgram<double>&,
                                                               const LpSolution<double>&,
                                                               const RelintOptions&);
extern template RelintResult<mpq_class> max_support_point<mpq_class>(
    const LinearProgram<mpq_class>&, const LpSolution<mpq_class>&, const RelintOptions&);
extern template RelintResult<double> max_support_point_each<double>(const LinearProgram<double>&,
                                                                    const LpSolution<double>&,
                                                                    const RelintOptions&);
extern template RelintResult<mpq_class> max_support_point_each<mpq_class>(
    const LinearProgram<mpq_class>&, const LpSolution<mpq_class>&, const RelintOptions&);

}  // namespace partopt

#endif
