#include "partopt/persistency.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "partopt/lambda_lp.hpp"
#include "partopt/rational.hpp"

namespace partopt {

namespace {

// snap an optimal xi to integers. exact solutions must be exactly integral
// (every optimal vertex is); float solutions may carry solver noise up to
// int_tol, anything beyond contradicts the integrality guarantee.
template <class S>
std::vector<double> snap_xi(const EnergyInstance& inst, const std::vector<S>& x,
                            double int_tol) {
  std::vector<double> xi(inst.total_unary());
  for (int k = 0; k < inst.total_unary(); ++k) {
    if constexpr (num::is_exact<S>) {
      if (x[k] != 0 && x[k] != 1)
        throw CertificationError("reduced LP returned a non-integral optimal vertex");
      xi[k] = num::to_double(x[k]);
    } else {
      const double v = x[k];
      const double r = v >= 0.5 ? 1.0 : 0.0;
      if (std::fabs(v - r) > int_tol)
        throw CertificationError("reduced LP optimum is not integral within tolerance");
      xi[k] = r;
    }
  }
  return xi;
}

// feasibility of the snapped indicators together with the solved messages,
// against the float LP rows (cheap defense against snapping across an active
// constraint)
void recheck_rows(const LinearProgram<double>& lp, const std::vector<double>& x, double slack) {
  for (int r = 0; r < lp.num_rows(); ++r) {
    double act = 0;
    for (int k = lp.row_ptr[r]; k < lp.row_ptr[r + 1]; ++k) act += lp.a[k] * x[lp.col[k]];
    if (!lp.rlo_inf[r] && act < lp.rlo[r] - slack)
      throw CertificationError("snapped indicators violate a certificate constraint");
    if (!lp.rhi_inf[r] && act > lp.rhi[r] + slack)
      throw CertificationError("snapped indicators violate a certificate constraint");
  }
}

L1Outcome run_reduced_lp(const EnergyInstance& inst, const Labeling& y, double eps,
                         const char* method, const PersistencyOptions& opt,
                         const std::vector<char>* free_xi) {
  inst.require_labeling(y);
  const EnergyInstance norm = zero_top_normalize(inst, y);
  const L1Layout lay(norm);

  const auto flp = build_l1_lp<double>(norm, y, eps, free_xi);
  LinearProgram<mpq_class> qlp;
  if (opt.mode != ArithMode::float_only) qlp = build_l1_lp<mpq_class>(norm, y, eps, free_xi);
  const ModeSolution ms = solve_with_mode(
      flp, opt.mode == ArithMode::float_only ? nullptr : &qlp, opt.mode, opt.simplex);

  L1Outcome out;
  if (ms.exact) {
    if (ms.exact->status != LpStatus::optimal)
      throw SolverError("reduced LP did not reach optimality");
    out.xi.node = snap_xi(norm, ms.exact->x, opt.int_tol);
    out.phi = phi_from_l1_solution(norm, lay, ms.exact->x);
    out.iterations = ms.approx.iterations + ms.exact->iterations;
  } else {
    if (ms.approx.status != LpStatus::optimal)
      throw SolverError("reduced LP did not reach optimality");
    out.xi.node = snap_xi(norm, ms.approx.x, opt.int_tol);
    out.phi = phi_from_l1_solution(norm, lay, ms.approx.x);
    out.iterations = ms.approx.iterations;
    // keep the solved messages, replace xi by its snapped values
    std::vector<double> x = ms.approx.x;
    for (int k = 0; k < norm.total_unary(); ++k) x[k] = out.xi.node[k];
    recheck_rows(flp, x,
                 opt.simplex.feas_tol + opt.int_tol * (1.0 + norm.max_abs_cost()));
  }

  PixelwiseMapping p = PixelwiseMapping::identity(inst);
  int moved = 0;
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i)
      if (out.xi.node[inst.unary_offset(s) + i] == 1.0 && i != y[s]) {
        p.set(s, i, y[s]);
        ++moved;
      }
  out.lp_value = moved;

  VerifyOptions vopt;
  vopt.mode = opt.mode;
  vopt.eps = eps;
  vopt.tol = opt.verify_tol;
  vopt.simplex = opt.simplex;
  const VerifyReport rep = verify_improving(inst, p, vopt);
  if (!rep.improving)
    throw CertificationError("reduced LP mapping failed re-verification");
  out.iterations += rep.iterations;

  out.cert.method = method;
  out.cert.strict = eps > 0.0;
  out.cert.eps = eps;
  out.cert.y = y;
  out.cert.p = std::move(p);
  out.cert.verify_value = rep.value;
  out.cert.certified = rep.certified;
  out.cert.eliminated = moved;
  out.cert.completeness = completeness_percent(inst, moved);
  return out;
}

}  // namespace

L1Outcome solve_l1(const EnergyInstance& inst, const Labeling& y,
                   const PersistencyOptions& opt, const std::vector<char>* free_xi) {
  return run_reduced_lp(inst, y, 0.0, "l1", opt, free_xi);
}

L1Outcome solve_eps_l1(const EnergyInstance& inst, const Labeling& y, double eps,
                       const PersistencyOptions& opt) {
  if (!(eps > 0.0)) throw std::invalid_argument("solve_eps_l1: eps must be positive");
  return run_reduced_lp(inst, y, eps, "eps-l1", opt, nullptr);
}

namespace {

template <class S>
void fill_supports(const EnergyInstance& inst, const LinearProgram<S>& lp,
                   const LpSolution<S>& sol, const RelintOptions& ropt,
                   RelaxationSupports& sup) {
  const RelintResult<S> ri = max_support_point(lp, sol, ropt);
  sup.alive.assign(inst.total_unary(), 0);
  for (int k = 0; k < inst.total_unary(); ++k) sup.alive[k] = ri.positive[k];
  sup.pinned.assign(inst.num_nodes(), 0);
  sup.y.assign(inst.num_nodes(), 0);
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    const int off = inst.unary_offset(s);
    int count = 0;
    Label only = 0;
    for (Label i = 0; i < inst.num_labels(s); ++i)
      if (sup.alive[off + i]) {
        ++count;
        only = i;
      }
    if (count == 1) {
      sup.pinned[s] = 1;
      sup.y[s] = only;
    } else {
      // face not integral here: fall back to the heaviest coordinate of the
      // interior point, lowest index first
      Label best = 0;
      for (Label i = 1; i < inst.num_labels(s); ++i)
        if (ri.point[off + i] > ri.point[off + best]) best = i;
      sup.y[s] = best;
    }
  }
}

}  // namespace

RelaxationSupports facet_supports(const EnergyInstance& inst, const LinearProgram<double>& flp,
                                  const LinearProgram<mpq_class>* qlp, const ModeSolution& ms,
                                  const RelintOptions& ropt) {
  RelaxationSupports sup;
  if (ms.exact) {
    if (!qlp) throw std::invalid_argument("facet_supports: exact solution without exact LP");
    if (ms.exact->status != LpStatus::optimal)
      throw SolverError("relaxation LP did not reach optimality");
    sup.lp_value = num::to_double(ms.exact->value);
    sup.certified = true;
    fill_supports(inst, *qlp, *ms.exact, ropt, sup);
  } else {
    if (ms.approx.status != LpStatus::optimal)
      throw SolverError("relaxation LP did not reach optimality");
    sup.lp_value = ms.approx.value;
    fill_supports(inst, flp, ms.approx, ropt, sup);
  }
  return sup;
}

RelaxationSupports relaxation_supports(const EnergyInstance& inst,
                                       const PersistencyOptions& opt) {
  const auto flp = build_energy_lp<double>(inst);
  LinearProgram<mpq_class> qlp;
  if (opt.mode != ArithMode::float_only) qlp = build_energy_lp<mpq_class>(inst);
  const ModeSolution ms = solve_with_mode(
      flp, opt.mode == ArithMode::float_only ? nullptr : &qlp, opt.mode, opt.simplex);
  return facet_supports(inst, flp, opt.mode == ArithMode::float_only ? nullptr : &qlp, ms,
                        opt.relint);
}

L1Outcome max_strong_all_to_one_unknown(const EnergyInstance& inst, double eps,
                                        const PersistencyOptions& opt) {
  const RelaxationSupports sup = relaxation_supports(inst, opt);
  L1Outcome out = solve_eps_l1(inst, sup.y, eps, opt);
  out.cert.method = "a2ou";
  return out;
}

PersistencyCertificate max_improve(const EnergyInstance& inst, const Labeling& y,
                                   const PersistencyOptions& opt) {
  inst.require_labeling(y);
  const MuIndex ix(inst);
  // cand holds the candidate sets C_s in the unary layout; a set member moves
  // to y_s, everything else stays put
  std::vector<char> cand(inst.total_unary(), 1);

  const int round_cap = eliminable_total(inst) + 1;
  for (int round = 0; round < round_cap; ++round) {
    PixelwiseMapping p = PixelwiseMapping::identity(inst);
    for (NodeId s = 0; s < inst.num_nodes(); ++s)
      for (Label i = 0; i < inst.num_labels(s); ++i)
        if (cand[inst.unary_offset(s) + i] && i != y[s]) p.set(s, i, y[s]);

    const auto fobj = improvement_objective<double>(inst, p, 0.0);
    const auto flp = build_lambda_lp(inst, fobj);
    LinearProgram<mpq_class> qlp;
    if (opt.mode != ArithMode::float_only) {
      const auto qobj = improvement_objective<mpq_class>(inst, p, 0.0);
      qlp = build_lambda_lp(inst, qobj);
    }
    const ModeSolution ms = solve_with_mode(
        flp, opt.mode == ArithMode::float_only ? nullptr : &qlp, opt.mode, opt.simplex);

    double v;
    bool improving, certified;
    std::vector<char> pos;
    if (ms.exact) {
      if (ms.exact->status != LpStatus::optimal)
        throw SolverError("verification LP did not reach optimality");
      v = num::to_double(ms.exact->value);
      improving = num::sign(ms.exact->value) >= 0;
      certified = true;
      if (!improving) pos = max_support_point(qlp, *ms.exact, opt.relint).positive;
    } else {
      if (ms.approx.status != LpStatus::optimal)
        throw SolverError("verification LP did not reach optimality");
      v = ms.approx.value;
      improving = v >= -opt.verify_tol;
      certified = false;
      if (!improving) pos = max_support_point(flp, ms.approx, opt.relint).positive;
    }

    if (improving) {
      PersistencyCertificate cert;
      cert.method = "maximprove";
      cert.y = y;
      cert.verify_value = v;
      cert.certified = certified;
      cert.eliminated = p.moved_count();
      cert.completeness = completeness_percent(inst, cert.eliminated);
      cert.p = std::move(p);
      return cert;
    }

    // candidate pruning from the interior point's support: a candidate whose
    // mass survives in a place the target cannot reach can never be improving
    const auto node_pos = [&](NodeId s, Label i) { return pos[ix.node_var(s, i)] != 0; };
    const auto pair_pos = [&](EdgeId e, NodeId s, Label ls, Label lt) {
      // label ls lives at s, lt at the other endpoint of e
      return inst.edge(e).s == s ? pos[ix.edge_var(e, ls, lt)] != 0
                                 : pos[ix.edge_var(e, lt, ls)] != 0;
    };
    bool removed = false;
    for (NodeId s = 0; s < inst.num_nodes(); ++s) {
      const int off = inst.unary_offset(s);
      for (EdgeId e : inst.incident_edges(s)) {
        const Edge& ed = inst.edge(e);
        const NodeId t = ed.s == s ? ed.t : ed.s;
        const int toff = inst.unary_offset(t);
        const bool anchor_pair_dead = !pair_pos(e, s, y[s], y[t]);
        for (Label i = 0; i < inst.num_labels(s); ++i) {
          if (!cand[off + i]) continue;
          if (!node_pos(s, y[s]) && node_pos(s, i)) {
            cand[off + i] = 0;
            removed = true;
            continue;
          }
          for (Label j = 0; j < inst.num_labels(t); ++j) {
            const bool in_ct = cand[toff + j] != 0;
            if (!pair_pos(e, s, i, j)) continue;
            if ((!in_ct && !pair_pos(e, s, y[s], j)) || (in_ct && anchor_pair_dead)) {
              cand[off + i] = 0;
              removed = true;
              break;
            }
          }
        }
      }
    }
    if (!removed)
      throw CertificationError("candidate pruning stalled before verification succeeded");
  }
  throw CertificationError("candidate pruning exceeded its round budget");
}

std::vector<PixelwiseMapping> necessary_condition_filter(
    const RelaxationSupports& sup, const std::vector<PixelwiseMapping>& candidates, bool strict) {
  std::vector<PixelwiseMapping> kept;
  for (const PixelwiseMapping& p : candidates) {
    if (p.num_nodes() != static_cast<int>(sup.y.size()))
      throw std::invalid_argument("necessary_condition_filter: mapping shape mismatch");
    bool ok = true;
    int off = 0;
    for (int s = 0; s < p.num_nodes() && ok; ++s) {
      for (Label i = 0; i < p.num_labels(s) && ok; ++i)
        if (sup.alive[off + i]) {
          if (strict)
            ok = p(s, i) == i;
          else
            ok = sup.alive[off + p(s, i)] != 0;
        }
      off += p.num_labels(s);
    }
    if (ok) kept.push_back(p);
  }
  return kept;
}

std::vector<PixelwiseMapping> necessary_condition_filter(
    const EnergyInstance& inst, const std::vector<PixelwiseMapping>& candidates, bool strict,
    const PersistencyOptions& opt) {
  return necessary_condition_filter(relaxation_supports(inst, opt), candidates, strict);
}

}  // namespace partopt
