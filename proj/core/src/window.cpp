#include "partopt/window.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

#include "partopt/lambda_lp.hpp"

namespace partopt {

namespace {

std::vector<int> anchors(int extent, int size, int stride) {
  std::vector<int> a;
  for (int pos = 0;; pos += stride) {
    if (pos + size >= extent) {
      const int last = extent - size;
      if (a.empty() || a.back() != last) a.push_back(last);
      break;
    }
    a.push_back(pos);
  }
  return a;
}

void check_window(const EnergyInstance& inst, const Window& w) {
  if (w.nodes.empty()) throw std::invalid_argument("window is empty");
  NodeId prev = -1;
  for (NodeId s : w.nodes) {
    if (s < 0 || s >= inst.num_nodes()) throw std::invalid_argument("window node out of range");
    if (s <= prev) throw std::invalid_argument("window nodes must be distinct and ascending");
    prev = s;
  }
}

}  // namespace

std::vector<Window> grid_windows(int rows, int cols, int wh, int ww, int stride) {
  if (rows <= 0 || cols <= 0 || wh <= 0 || ww <= 0 || stride <= 0)
    throw std::invalid_argument("grid_windows: dimensions and stride must be positive");
  if (wh > rows || ww > cols)
    throw std::invalid_argument("grid_windows: window larger than the grid");
  std::vector<Window> out;
  for (int r0 : anchors(rows, wh, stride))
    for (int c0 : anchors(cols, ww, stride)) {
      Window w;
      for (int r = r0; r < r0 + wh; ++r)
        for (int c = c0; c < c0 + ww; ++c) w.nodes.push_back(r * cols + c);
      out.push_back(std::move(w));
    }
  return out;
}

std::vector<Window> ball_windows(const EnergyInstance& inst, int radius, int stride) {
  if (radius < 0 || stride <= 0)
    throw std::invalid_argument("ball_windows: radius must be >= 0 and stride positive");
  std::vector<Window> out;
  std::vector<int> depth(inst.num_nodes());
  for (NodeId center = 0; center < inst.num_nodes(); center += stride) {
    std::fill(depth.begin(), depth.end(), -1);
    std::queue<NodeId> q;
    q.push(center);
    depth[center] = 0;
    Window w;
    while (!q.empty()) {
      const NodeId s = q.front();
      q.pop();
      w.nodes.push_back(s);
      if (depth[s] == radius) continue;
      for (EdgeId e : inst.incident_edges(s)) {
        const Edge& ed = inst.edge(e);
        const NodeId t = ed.s == s ? ed.t : ed.s;
        if (depth[t] < 0) {
          depth[t] = depth[s] + 1;
          q.push(t);
        }
      }
    }
    std::sort(w.nodes.begin(), w.nodes.end());
    out.push_back(std::move(w));
  }
  return out;
}

SubProblem star_subproblem(const EnergyInstance& inst, const std::vector<char>& alive,
                           const Window& w) {
  check_window(inst, w);
  if (static_cast<int>(alive.size()) != inst.total_unary())
    throw std::invalid_argument("star_subproblem: mask does not match instance");

  std::vector<char> inw(inst.num_nodes(), 0), take(inst.num_nodes(), 0);
  for (NodeId s : w.nodes) inw[s] = take[s] = 1;
  for (NodeId s : w.nodes)
    for (EdgeId e : inst.incident_edges(s)) {
      const Edge& ed = inst.edge(e);
      take[ed.s == s ? ed.t : ed.s] = 1;
    }

  SubProblem sp;
  std::vector<int> sub_id(inst.num_nodes(), -1);
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    if (take[s]) {
      sub_id[s] = static_cast<int>(sp.nodes.size());
      sp.nodes.push_back(s);
    }

  std::vector<int> kred(sp.nodes.size());
  sp.orig_label.resize(sp.nodes.size());
  sp.in_window.resize(sp.nodes.size());
  for (size_t k = 0; k < sp.nodes.size(); ++k) {
    const NodeId s = sp.nodes[k];
    sp.in_window[k] = inw[s];
    for (Label i = 0; i < inst.num_labels(s); ++i)
      if (alive[inst.unary_offset(s) + i]) sp.orig_label[k].push_back(i);
    if (sp.orig_label[k].empty())
      throw std::invalid_argument("star_subproblem: node left without labels");
    kred[k] = static_cast<int>(sp.orig_label[k].size());
  }

  sp.inst = EnergyInstance(kred);
  sp.inst.set_f0(inst.f0());
  for (size_t k = 0; k < sp.nodes.size(); ++k)
    for (Label i = 0; i < sp.inst.num_labels(static_cast<NodeId>(k)); ++i)
      sp.inst.set_unary(static_cast<NodeId>(k), i, inst.unary(sp.nodes[k], sp.orig_label[k][i]));
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    if (!(inw[ed.s] || inw[ed.t])) continue;
    const NodeId a = sub_id[ed.s], b = sub_id[ed.t];
    const EdgeId re = sp.inst.add_edge(a, b);
    sp.orig_edge.push_back(e);
    for (Label i = 0; i < sp.inst.num_labels(a); ++i)
      for (Label j = 0; j < sp.inst.num_labels(b); ++j)
        sp.inst.set_edge_cost(re, i, j,
                              inst.edge_cost(e, sp.orig_label[a][i], sp.orig_label[b][j]));
  }
  return sp;
}

namespace {

// q collapses every window node to its first label and fixes the rest; for
// any p acting inside the window, q after p equals q, which is what makes the
// facet supports necessary conditions for window maps
PixelwiseMapping collapse_map(const SubProblem& sp) {
  PixelwiseMapping q = PixelwiseMapping::identity(sp.inst);
  for (NodeId s = 0; s < sp.inst.num_nodes(); ++s)
    if (sp.in_window[s])
      for (Label i = 1; i < sp.inst.num_labels(s); ++i) q.set(s, i, 0);
  return q;
}

RelaxationSupports solve_test_problem(const SubProblem& sp, const PersistencyOptions& opt) {
  const PixelwiseMapping q = collapse_map(sp);
  const auto fobj = improvement_objective<double>(sp.inst, q, 0.0);
  const auto flp = build_lambda_lp(sp.inst, fobj);
  LinearProgram<mpq_class> qlp;
  if (opt.mode != ArithMode::float_only) {
    const auto qobj = improvement_objective<mpq_class>(sp.inst, q, 0.0);
    qlp = build_lambda_lp(sp.inst, qobj);
  }
  const ModeSolution ms = solve_with_mode(
      flp, opt.mode == ArithMode::float_only ? nullptr : &qlp, opt.mode, opt.simplex);
  return facet_supports(sp.inst, flp, opt.mode == ArithMode::float_only ? nullptr : &qlp, ms,
                        opt.relint);
}

}  // namespace

WindowTest window_test_problem(const EnergyInstance& inst, const Window& w,
                               const PersistencyOptions& opt) {
  WindowTest wt;
  wt.sub = star_subproblem(inst, std::vector<char>(inst.total_unary(), 1), w);
  wt.sup = solve_test_problem(wt.sub, opt);
  return wt;
}

namespace {

// folds a map given on a subproblem (identity outside its window) into the
// running global map and alive mask; returns how many labels it eliminated
int fold_sub_map(const EnergyInstance& inst, const SubProblem& sp, const PixelwiseMapping& psub,
                 PixelwiseMapping& p, std::vector<char>& alive) {
  int eliminated = 0;
  for (NodeId k = 0; k < static_cast<NodeId>(sp.nodes.size()); ++k) {
    if (!sp.in_window[k]) continue;
    const NodeId os = sp.nodes[k];
    const int off = inst.unary_offset(os);
    std::vector<Label> sub_of(inst.num_labels(os), -1);
    for (Label r = 0; r < sp.inst.num_labels(k); ++r) sub_of[sp.orig_label[k][r]] = r;
    bool touched = false;
    for (Label l = 0; l < inst.num_labels(os); ++l) {
      const Label cur = p(os, l);
      const Label nxt = sp.orig_label[k][psub(k, sub_of[cur])];
      if (nxt != cur) {
        p.set(os, l, nxt);
        touched = true;
      }
    }
    if (touched)
      for (Label l = 0; l < inst.num_labels(os); ++l) {
        const char a = p(os, l) == l;
        if (alive[off + l] && !a) ++eliminated;
        alive[off + l] = a;
      }
  }
  return eliminated;
}

// same fold for a map over a label restriction of the full instance
int fold_restricted_map(const EnergyInstance& inst, const LabelRestriction& lr,
                        const PixelwiseMapping& pred, PixelwiseMapping& p,
                        std::vector<char>& alive) {
  int eliminated = 0;
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    const int off = inst.unary_offset(s);
    std::vector<Label> red(inst.num_labels(s), -1);
    for (Label r = 0; r < lr.inst.num_labels(s); ++r) red[lr.orig[s][r]] = r;
    for (Label l = 0; l < inst.num_labels(s); ++l) {
      const Label cur = p(s, l);
      const Label nxt = lr.orig[s][pred(s, red[cur])];
      if (nxt != cur) p.set(s, l, nxt);
      const char a = p(s, l) == l;
      if (alive[off + l] && !a) ++eliminated;
      alive[off + l] = a;
    }
  }
  return eliminated;
}

std::vector<int> remaining_counts(const EnergyInstance& inst, const std::vector<char>& alive) {
  std::vector<int> rem(inst.num_nodes(), 0);
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i)
      rem[s] += alive[inst.unary_offset(s) + i] != 0;
  return rem;
}

}  // namespace

WindowRun window_persistency(const EnergyInstance& inst, const std::vector<Window>& windows,
                             const WindowOptions& opt) {
  for (const Window& w : windows) check_window(inst, w);
  if (opt.max_scans <= 0) throw std::invalid_argument("window_persistency: max_scans must be positive");

  WindowRun run;
  std::vector<char> alive(inst.total_unary(), 1);
  PixelwiseMapping p = PixelwiseMapping::identity(inst);
  bool all_certified = true;
  bool any_step = false;
  double min_verify = 0.0;
  run.remaining.push_back(remaining_counts(inst, alive));

  for (int scan = 1; scan <= opt.max_scans; ++scan) {
    bool changed = false;
    run.scans = scan;

    if (opt.dee1_interleave) {
      const LabelRestriction lr = restrict_to_alive(inst, alive);
      const PersistencyCertificate d = dee1(lr.inst, opt.dee);
      WindowStep st;
      st.scan = scan;
      st.window = -1;
      st.certified = d.certified;
      st.eliminated = fold_restricted_map(inst, lr, d.p, p, alive);
      all_certified = all_certified && d.certified;
      any_step = true;
      changed = changed || st.eliminated > 0;
      run.steps.push_back(std::move(st));
    }

    for (int wi = 0; wi < static_cast<int>(windows.size()); ++wi) {
      SubProblem sp = star_subproblem(inst, alive, windows[wi]);
      WindowStep st;
      st.scan = scan;
      st.window = wi;

      const L1Layout lay(sp.inst);
      const int var_count = lay.num_vars();
      const int row_bound = sp.inst.total_unary() + 2 * sp.inst.total_pairwise() + 1;
      if (var_count > opt.budget || row_bound > opt.budget) {
        st.rejected = true;
        st.reason = "reduced LP over budget: " + std::to_string(var_count) + " variables, up to " +
                    std::to_string(row_bound) + " rows, budget " + std::to_string(opt.budget);
        run.steps.push_back(std::move(st));
        continue;
      }

      const RelaxationSupports sup = solve_test_problem(sp, opt.persist);
      std::vector<char> free_xi(sp.in_window.begin(), sp.in_window.end());
      const L1Outcome out = solve_l1(sp.inst, sup.y, opt.persist, &free_xi);

      st.eliminated = fold_sub_map(inst, sp, out.cert.p, p, alive);
      st.verify_value = out.cert.verify_value;
      st.certified = out.cert.certified;
      all_certified = all_certified && out.cert.certified;
      if (!any_step || out.cert.verify_value < min_verify) min_verify = out.cert.verify_value;
      any_step = true;
      changed = changed || st.eliminated > 0;
      run.steps.push_back(std::move(st));
    }

    run.remaining.push_back(remaining_counts(inst, alive));
    if (!changed) break;
  }

  run.cert.method = "window";
  run.cert.y.assign(inst.num_nodes(), 0);
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    Label l = 0;
    while (!alive[inst.unary_offset(s) + l]) ++l;
    run.cert.y[s] = l;
  }
  run.cert.p = std::move(p);
  run.cert.verify_value = min_verify;
  run.cert.certified = all_certified;
  run.cert.eliminated = run.cert.p.moved_count();
  run.cert.completeness = completeness_percent(inst, run.cert.eliminated);
  return run;
}

}  // namespace partopt
