#include "partopt/dee.hpp"

#include <stdexcept>
#include <utility>

#include "partopt/rational.hpp"

namespace partopt {

namespace {

// fixpoint state, templated so the same scan runs in double or exactly in
// rationals (costs lift exactly; the decisions are then free of rounding)
template <class S>
struct DeeWork {
  const EnergyInstance& inst;
  const DeeOptions& opt;
  std::vector<S> un;               // unary layout
  std::vector<S> pw;               // pairwise layout, stored orientation
  std::vector<char> alive;         // unary layout
  std::vector<Label> target;       // witness label at elimination time
  std::vector<char> excl;          // pairwise layout
  std::vector<PairExclusion> log;

  DeeWork(const EnergyInstance& in, const DeeOptions& op)
      : inst(in),
        opt(op),
        un(in.total_unary()),
        pw(in.total_pairwise()),
        alive(in.total_unary(), 1),
        target(in.total_unary(), -1),
        excl(in.total_pairwise(), 0) {
    for (NodeId s = 0; s < inst.num_nodes(); ++s)
      for (Label i = 0; i < inst.num_labels(s); ++i)
        un[inst.unary_offset(s) + i] = num::from_double<S>(inst.unary(s, i));
    for (EdgeId e = 0; e < inst.num_edges(); ++e) {
      const Edge& ed = inst.edge(e);
      for (Label i = 0; i < inst.num_labels(ed.s); ++i)
        for (Label j = 0; j < inst.num_labels(ed.t); ++j)
          pw[pidx(e, ed.s, i, j)] = num::from_double<S>(inst.edge_cost(e, i, j));
    }
  }

  // pairwise slot of (label lu at node u, lv at the other endpoint of e)
  int pidx(EdgeId e, NodeId u, Label lu, Label lv) const {
    const Edge& ed = inst.edge(e);
    return ed.s == u ? inst.pair_offset(e) + lu * inst.num_labels(ed.t) + lv
                     : inst.pair_offset(e) + lv * inst.num_labels(ed.t) + lu;
  }

  // accumulates sum over edges of u (minus skip_e) of
  //   min_x [ f(a, x) - f(b, x) ]
  // over partners x that are alive and, with feedback on, not excluded
  // against a. returns 0 on success, 1 if some range is empty (a cannot be
  // completed at all), 2 if the swap to b would land on an excluded pair
  // (witness unusable regardless of feedback)
  int star_term(NodeId u, Label a, Label b, EdgeId skip_e, S& acc) const {
    for (EdgeId e : inst.incident_edges(u)) {
      if (e == skip_e) continue;
      const Edge& ed = inst.edge(e);
      const NodeId v = ed.s == u ? ed.t : ed.s;
      const int voff = inst.unary_offset(v);
      bool any = false;
      S best{};
      for (Label x = 0; x < inst.num_labels(v); ++x) {
        if (!alive[voff + x]) continue;
        if (opt.pair_feedback && excl[pidx(e, u, a, x)]) continue;
        if (b != a && excl[pidx(e, u, b, x)]) return 2;
        S d = pw[pidx(e, u, a, x)];
        d -= pw[pidx(e, u, b, x)];
        if (!any || d < best) {
          best = d;
          any = true;
        }
      }
      if (!any) return 1;
      acc += best;
    }
    return 0;
  }

  void eliminate(NodeId s, Label a, Label b) {
    const int off = inst.unary_offset(s);
    target[off + a] = b;
    alive[off + a] = 0;
  }

  // witness for a label that lost every feasible completion; any survivor does
  Label lowest_alive_other(NodeId s, Label a) const {
    const int off = inst.unary_offset(s);
    for (Label b = 0; b < inst.num_labels(s); ++b)
      if (b != a && alive[off + b]) return b;
    throw CertificationError("dead-end elimination emptied a node's label set");
  }

  bool node_pass() {
    bool changed = false;
    for (NodeId s = 0; s < inst.num_nodes(); ++s) {
      const int off = inst.unary_offset(s);
      for (Label a = 0; a < inst.num_labels(s); ++a) {
        if (!alive[off + a]) continue;
        if (opt.pair_feedback) {
          S probe{};
          if (star_term(s, a, a, -1, probe) == 1) {
            eliminate(s, a, lowest_alive_other(s, a));
            changed = true;
            continue;
          }
        }
        for (Label b = 0; b < inst.num_labels(s); ++b) {
          if (b == a || !alive[off + b]) continue;
          S cond = un[off + a];
          cond -= un[off + b];
          if (star_term(s, a, b, -1, cond) != 0) continue;
          const int sg = num::sign(cond);
          if (sg > 0 || (!opt.strict && sg == 0 && b < a)) {
            eliminate(s, a, b);
            changed = true;
            break;
          }
        }
      }
    }
    return changed;
  }

  bool pair_pass() {
    bool changed = false;
    for (EdgeId e = 0; e < inst.num_edges(); ++e) {
      const Edge& ed = inst.edge(e);
      const int soff = inst.unary_offset(ed.s), toff = inst.unary_offset(ed.t);
      for (Label as = 0; as < inst.num_labels(ed.s); ++as) {
        if (!alive[soff + as]) continue;
        for (Label at = 0; at < inst.num_labels(ed.t); ++at) {
          if (!alive[toff + at] || excl[pidx(e, ed.s, as, at)]) continue;
          if (opt.pair_feedback) {
            S probe{};
            if (star_term(ed.s, as, as, e, probe) == 1 ||
                star_term(ed.t, at, at, e, probe) == 1) {
              exclude(e, as, at);
              changed = true;
              continue;
            }
          }
          bool done = false;
          for (Label bs = 0; bs < inst.num_labels(ed.s) && !done; ++bs) {
            if (!alive[soff + bs]) continue;
            for (Label bt = 0; bt < inst.num_labels(ed.t); ++bt) {
              if (!alive[toff + bt] || (bs == as && bt == at)) continue;
              if (excl[pidx(e, ed.s, bs, bt)]) continue;  // witness must stay feasible
              S cond = un[soff + as];
              cond -= un[soff + bs];
              cond += un[toff + at];
              cond -= un[toff + bt];
              cond += pw[pidx(e, ed.s, as, at)];
              cond -= pw[pidx(e, ed.s, bs, bt)];
              if (star_term(ed.s, as, bs, e, cond) != 0) continue;
              if (star_term(ed.t, at, bt, e, cond) != 0) continue;
              const int sg = num::sign(cond);
              if (sg > 0 || (!opt.strict && sg == 0 && (bs < as || (bs == as && bt < at)))) {
                exclude(e, as, at);
                changed = true;
                done = true;
                break;
              }
            }
          }
        }
      }
    }
    return changed;
  }

  void exclude(EdgeId e, Label i, Label j) {
    excl[inst.pair_offset(e) + i * inst.num_labels(inst.edge(e).t) + j] = 1;
    log.push_back({e, i, j});
  }

  void run(bool with_pairs) {
    bool changed = true;
    while (changed) {
      changed = node_pass();
      if (with_pairs && pair_pass()) changed = true;
    }
  }
};

template <class S>
PersistencyCertificate assemble(const EnergyInstance& inst, const DeeOptions& opt,
                                DeeWork<S>& w, const char* method) {
  // witnesses may have died in later passes; follow the chain to a survivor
  PixelwiseMapping p = PixelwiseMapping::identity(inst);
  int moved = 0;
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    const int off = inst.unary_offset(s);
    for (Label a = 0; a < inst.num_labels(s); ++a) {
      if (w.alive[off + a]) continue;
      Label l = w.target[off + a];
      for (int steps = 0; !w.alive[off + l]; ++steps) {
        if (steps > inst.num_labels(s))
          throw CertificationError("cyclic witness chain in dead-end elimination");
        l = w.target[off + l];
      }
      p.set(s, a, l);
      ++moved;
    }
  }

  PersistencyCertificate cert;
  cert.method = method;
  cert.strict = opt.strict;
  cert.y.assign(inst.num_nodes(), 0);
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    const int off = inst.unary_offset(s);
    Label l = 0;
    while (!w.alive[off + l]) ++l;
    cert.y[s] = l;
  }
  for (const PairExclusion& pe : w.log) {
    const Edge& ed = inst.edge(pe.e);
    if (w.alive[inst.unary_offset(ed.s) + pe.i] && w.alive[inst.unary_offset(ed.t) + pe.j])
      cert.excluded_pairs.push_back(pe);
  }
  cert.p = std::move(p);
  cert.certified = opt.mode != ArithMode::float_only;
  cert.eliminated = moved;
  cert.completeness = completeness_percent(inst, moved);
  return cert;
}

template <class S>
void seed_excl(const EnergyInstance& inst, DeeWork<S>& w,
               const std::vector<PairExclusion>& seeds) {
  for (const PairExclusion& pe : seeds) {
    if (pe.e < 0 || pe.e >= inst.num_edges())
      throw std::invalid_argument("seed exclusion references an unknown edge");
    const Edge& ed = inst.edge(pe.e);
    if (pe.i < 0 || pe.i >= inst.num_labels(ed.s) || pe.j < 0 || pe.j >= inst.num_labels(ed.t))
      throw std::invalid_argument("seed exclusion label out of range");
    w.excl[inst.pair_offset(pe.e) + pe.i * inst.num_labels(ed.t) + pe.j] = 1;
  }
}

PersistencyCertificate run_dee(const EnergyInstance& inst, const DeeOptions& opt,
                               bool with_pairs, const char* method,
                               const std::vector<PairExclusion>* seeds) {
  if (opt.mode == ArithMode::float_only) {
    DeeWork<double> w(inst, opt);
    if (seeds) seed_excl(inst, w, *seeds);
    w.run(with_pairs);
    return assemble(inst, opt, w, method);
  }
  DeeWork<mpq_class> w(inst, opt);
  if (seeds) seed_excl(inst, w, *seeds);
  w.run(with_pairs);
  return assemble(inst, opt, w, method);
}

}  // namespace

PersistencyCertificate dee1(const EnergyInstance& inst, const DeeOptions& opt) {
  return run_dee(inst, opt, false, "dee1", nullptr);
}

PersistencyCertificate dee2(const EnergyInstance& inst, const DeeOptions& opt,
                            const std::vector<PairExclusion>* seed_exclusions) {
  return run_dee(inst, opt, true, "dee2", seed_exclusions);
}

LabelRestriction restrict_to_alive(const EnergyInstance& inst, const std::vector<char>& alive) {
  if (static_cast<int>(alive.size()) != inst.total_unary())
    throw std::invalid_argument("restrict_to_alive: mask does not match instance");
  std::vector<int> kred(inst.num_nodes());
  std::vector<std::vector<Label>> orig(inst.num_nodes());
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    for (Label i = 0; i < inst.num_labels(s); ++i)
      if (alive[inst.unary_offset(s) + i]) orig[s].push_back(i);
    if (orig[s].empty())
      throw std::invalid_argument("restrict_to_alive: node left without labels");
    kred[s] = static_cast<int>(orig[s].size());
  }

  LabelRestriction lr{EnergyInstance(kred), std::move(orig)};
  lr.inst.set_f0(inst.f0());
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < lr.inst.num_labels(s); ++i)
      lr.inst.set_unary(s, i, inst.unary(s, lr.orig[s][i]));
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    const EdgeId re = lr.inst.add_edge(ed.s, ed.t);
    for (Label i = 0; i < lr.inst.num_labels(ed.s); ++i)
      for (Label j = 0; j < lr.inst.num_labels(ed.t); ++j)
        lr.inst.set_edge_cost(re, i, j, inst.edge_cost(e, lr.orig[ed.s][i], lr.orig[ed.t][j]));
  }
  return lr;
}

PersistencyCertificate dee2_then_l1(const EnergyInstance& inst, const DeeOptions& dopt,
                                    const PersistencyOptions& popt) {
  PersistencyCertificate c2 = dee2(inst, dopt);

  std::vector<char> alive(inst.total_unary(), 0);
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i)
      alive[inst.unary_offset(s) + i] = c2.p(s, i) == i;
  const LabelRestriction lr = restrict_to_alive(inst, alive);

  const RelaxationSupports sup = relaxation_supports(lr.inst, popt);
  const L1Outcome out = solve_l1(lr.inst, sup.y, popt);

  std::vector<std::vector<Label>> red(inst.num_nodes());
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    red[s].assign(inst.num_labels(s), -1);
    for (Label r = 0; r < lr.inst.num_labels(s); ++r) red[s][lr.orig[s][r]] = r;
  }

  PersistencyCertificate cert;
  cert.method = "dee2+l1";
  cert.y.assign(inst.num_nodes(), 0);
  cert.p = PixelwiseMapping::identity(inst);
  int moved = 0;
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    cert.y[s] = lr.orig[s][sup.y[s]];
    for (Label i = 0; i < inst.num_labels(s); ++i) {
      const Label fin = lr.orig[s][out.cert.p(s, red[s][c2.p(s, i)])];
      if (fin != i) {
        cert.p.set(s, i, fin);
        ++moved;
      }
    }
  }
  cert.excluded_pairs = c2.excluded_pairs;
  cert.verify_value = out.cert.verify_value;
  cert.certified = c2.certified && out.cert.certified;
  cert.eliminated = moved;
  cert.completeness = completeness_percent(inst, moved);
  return cert;
}

}  // namespace partopt
