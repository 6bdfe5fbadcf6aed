#include "partopt/lambda_lp.hpp"

#include <stdexcept>
#include <string>

#include "partopt/rational.hpp"

namespace partopt {

namespace {

std::string tag(const char* stem, int a) { return std::string(stem) + std::to_string(a); }

std::string tag(const char* stem, int a, int b) {
  return std::string(stem) + std::to_string(a) + "_" + std::to_string(b);
}

std::string tag(const char* stem, int a, int b, int c) {
  return tag(stem, a, b) + "_" + std::to_string(c);
}

}  // namespace

MuIndex::MuIndex(const EnergyInstance& inst) : inst_(&inst) {
  edge_row_off_.resize(inst.num_edges());
  int r = 0;
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    edge_row_off_[e] = r;
    const Edge& ed = inst.edge(e);
    r += inst.num_labels(ed.s) + inst.num_labels(ed.t);
  }
  norm_row0_ = r;
  mu0_ = inst.total_unary() + inst.total_pairwise();
}

template <class S>
LambdaObjective<S> instance_objective(const EnergyInstance& inst) {
  LambdaObjective<S> obj;
  obj.constant = num::from_double<S>(inst.f0());
  obj.unary.resize(inst.total_unary());
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i)
      obj.unary[inst.unary_offset(s) + i] = num::from_double<S>(inst.unary(s, i));
  obj.pair.resize(inst.total_pairwise());
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    const int kt = inst.num_labels(ed.t);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      for (Label j = 0; j < kt; ++j)
        obj.pair[inst.pair_offset(e) + i * kt + j] = num::from_double<S>(inst.edge_cost(e, i, j));
  }
  return obj;
}

template <class S>
LambdaObjective<S> improvement_objective(const EnergyInstance& inst, const PixelwiseMapping& p,
                                         double eps) {
  if (!p.same_shape(inst))
    throw std::invalid_argument("improvement_objective: mapping shape does not match instance");
  LambdaObjective<S> obj;
  obj.unary.resize(inst.total_unary());
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    for (Label i = 0; i < inst.num_labels(s); ++i) {
      S v = num::from_double<S>(inst.unary(s, i));
      v -= num::from_double<S>(inst.unary(s, p(s, i)));
      if (eps != 0.0 && p(s, i) != i) v -= num::from_double<S>(eps);
      obj.unary[inst.unary_offset(s) + i] = v;
    }
  }
  obj.pair.resize(inst.total_pairwise());
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    const int kt = inst.num_labels(ed.t);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i) {
      for (Label j = 0; j < kt; ++j) {
        S v = num::from_double<S>(inst.edge_cost(e, i, j));
        v -= num::from_double<S>(inst.edge_cost(e, p(ed.s, i), p(ed.t, j)));
        obj.pair[inst.pair_offset(e) + i * kt + j] = v;
      }
    }
  }
  return obj;
}

template <class S>
LinearProgram<S> build_lambda_lp(const EnergyInstance& inst, const LambdaObjective<S>& obj,
                                 bool with_names) {
  if (static_cast<int>(obj.unary.size()) != inst.total_unary() ||
      static_cast<int>(obj.pair.size()) != inst.total_pairwise())
    throw std::invalid_argument("build_lambda_lp: objective size does not match instance");
  const MuIndex ix(inst);
  LinearProgram<S> lp;

  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i)
      lp.add_var_lb(S{}, obj.unary[inst.unary_offset(s) + i]);
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    const int kt = inst.num_labels(ed.t);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      for (Label j = 0; j < kt; ++j)
        lp.add_var_lb(S{}, obj.pair[inst.pair_offset(e) + i * kt + j]);
  }
  lp.add_var(S(1), S(1), obj.constant);  // mu0

  // pencil rows, edge by edge: for a fixed source label the edge mass must
  // reproduce the node marginal, and likewise on the target side
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    const int ks = inst.num_labels(ed.s), kt = inst.num_labels(ed.t);
    for (Label i = 0; i < ks; ++i) {
      lp.begin_row_eq(S{});
      for (Label j = 0; j < kt; ++j) lp.coef(ix.edge_var(e, i, j), S(1));
      lp.coef(ix.node_var(ed.s, i), S(-1));
    }
    for (Label j = 0; j < kt; ++j) {
      lp.begin_row_eq(S{});
      for (Label i = 0; i < ks; ++i) lp.coef(ix.edge_var(e, i, j), S(1));
      lp.coef(ix.node_var(ed.t, j), S(-1));
    }
  }
  // normalization rows: each node's marginal sums to mu0
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    lp.begin_row_eq(S{});
    for (Label i = 0; i < inst.num_labels(s); ++i) lp.coef(ix.node_var(s, i), S(1));
    lp.coef(ix.mu0_var(), S(-1));
  }

  if (with_names) {
    lp.var_names.reserve(lp.num_vars());
    for (NodeId s = 0; s < inst.num_nodes(); ++s)
      for (Label i = 0; i < inst.num_labels(s); ++i) lp.var_names.push_back(tag("m_", s, i));
    for (EdgeId e = 0; e < inst.num_edges(); ++e) {
      const Edge& ed = inst.edge(e);
      for (Label i = 0; i < inst.num_labels(ed.s); ++i)
        for (Label j = 0; j < inst.num_labels(ed.t); ++j)
          lp.var_names.push_back(tag("p_", e, i, j));
    }
    lp.var_names.push_back("mu0");
    lp.row_names.reserve(lp.num_rows());
    for (EdgeId e = 0; e < inst.num_edges(); ++e) {
      const Edge& ed = inst.edge(e);
      for (Label i = 0; i < inst.num_labels(ed.s); ++i)
        lp.row_names.push_back(tag("pe_", e, 0, i));
      for (Label j = 0; j < inst.num_labels(ed.t); ++j)
        lp.row_names.push_back(tag("pe_", e, 1, j));
    }
    for (NodeId s = 0; s < inst.num_nodes(); ++s) lp.row_names.push_back(tag("nr_", s));
  }
  return lp;
}

template <class S>
LinearProgram<S> build_energy_lp(const EnergyInstance& inst, bool with_names) {
  return build_lambda_lp(inst, instance_objective<S>(inst), with_names);
}

template <class S>
Reparametrization phi_from_duals(const EnergyInstance& inst, const MuIndex& ix,
                                 const std::vector<S>& row_dual) {
  if (static_cast<int>(row_dual.size()) != ix.num_rows())
    throw std::invalid_argument("phi_from_duals: dual size does not match row layout");
  Reparametrization phi = Reparametrization::zeros(inst);
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      phi.msg_from(inst, e, ed.s, i) = num::to_double(row_dual[ix.pencil_row(e, false, i)]);
    for (Label j = 0; j < inst.num_labels(ed.t); ++j)
      phi.msg_from(inst, e, ed.t, j) = num::to_double(row_dual[ix.pencil_row(e, true, j)]);
  }
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    phi.node_off[s] = num::to_double(row_dual[ix.norm_row(s)]);
  return phi;
}

template <class S>
RelaxedLabeling mu_from_solution(const EnergyInstance& inst, const MuIndex& ix,
                                 const std::vector<S>& x) {
  if (static_cast<int>(x.size()) != ix.num_vars())
    throw std::invalid_argument("mu_from_solution: solution size does not match layout");
  RelaxedLabeling mu = RelaxedLabeling::zeros(inst);
  for (int k = 0; k < inst.total_unary(); ++k) mu.node[k] = num::to_double(x[k]);
  for (int k = 0; k < inst.total_pairwise(); ++k)
    mu.edge[k] = num::to_double(x[inst.total_unary() + k]);
  mu.mu0 = num::to_double(x[ix.mu0_var()]);
  return mu;
}

template <class S>
LinearProgram<S> build_invariant_cone_lp(const EnergyInstance& inst, const PixelwiseMapping& p) {
  const auto obj = improvement_objective<S>(inst, p, 0.0);
  LinearProgram<S> lp;
  for (int k = 0; k < inst.total_unary(); ++k) lp.add_var_lb(S{}, obj.unary[k]);
  for (int k = 0; k < inst.total_pairwise(); ++k) lp.add_var_lb(S{}, obj.pair[k]);

  const MuIndex ix(inst);
  // pencil rows evaluated on (I - P) mu: each original coefficient moves from
  // a coordinate to its image, so fixed points drop out entirely
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    const int ks = inst.num_labels(ed.s), kt = inst.num_labels(ed.t);
    for (Label i = 0; i < ks; ++i) {
      lp.begin_row_eq(S{});
      for (Label i2 = 0; i2 < ks; ++i2) {
        const int c = (i2 == i ? 1 : 0) - (p(ed.s, i2) == i ? 1 : 0);
        if (c == 0) continue;
        for (Label j2 = 0; j2 < kt; ++j2)
          lp.coef(ix.edge_var(e, i2, j2), num::from_double<S>(c));
        lp.coef(ix.node_var(ed.s, i2), num::from_double<S>(-c));
      }
    }
    for (Label j = 0; j < kt; ++j) {
      lp.begin_row_eq(S{});
      for (Label j2 = 0; j2 < kt; ++j2) {
        const int c = (j2 == j ? 1 : 0) - (p(ed.t, j2) == j ? 1 : 0);
        if (c == 0) continue;
        for (Label i2 = 0; i2 < ks; ++i2)
          lp.coef(ix.edge_var(e, i2, j2), num::from_double<S>(c));
        lp.coef(ix.node_var(ed.t, j2), num::from_double<S>(-c));
      }
    }
  }
  return lp;
}

template <class S>
Reparametrization phi_from_pencil_duals(const EnergyInstance& inst, const MuIndex& ix,
                                        const std::vector<S>& row_dual) {
  if (static_cast<int>(row_dual.size()) < ix.norm_row(0))
    throw std::invalid_argument("phi_from_pencil_duals: dual size does not cover pencil rows");
  Reparametrization phi = Reparametrization::zeros(inst);
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      phi.msg_from(inst, e, ed.s, i) = num::to_double(row_dual[ix.pencil_row(e, false, i)]);
    for (Label j = 0; j < inst.num_labels(ed.t); ++j)
      phi.msg_from(inst, e, ed.t, j) = num::to_double(row_dual[ix.pencil_row(e, true, j)]);
  }
  return phi;
}

L1Layout::L1Layout(const EnergyInstance& inst) : inst_(&inst) {
  msg0_ = inst.total_unary();
  msg_off_.resize(inst.num_edges());
  int m = 0;
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    msg_off_[e] = m;
    const Edge& ed = inst.edge(e);
    m += inst.num_labels(ed.s) + inst.num_labels(ed.t);
  }
  node0_ = msg0_ + m;
}

template <class S>
LinearProgram<S> build_l1_lp(const EnergyInstance& inst, const Labeling& y, double eps,
                             const std::vector<char>* free_xi, bool with_names) {
  inst.require_labeling(y);
  if (free_xi && static_cast<int>(free_xi->size()) != inst.num_nodes())
    throw std::invalid_argument("build_l1_lp: free_xi mask size does not match instance");
  // the inequalities below assume the costs of staying at y are exactly zero
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    if (inst.unary(s, y[s]) != 0.0)
      throw std::invalid_argument("build_l1_lp: costs are not zero-top normalized at y");
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    for (Label j = 0; j < inst.num_labels(ed.t); ++j)
      if (inst.edge_cost(e, y[ed.s], j) != 0.0)
        throw std::invalid_argument("build_l1_lp: costs are not zero-top normalized at y");
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      if (inst.edge_cost(e, i, y[ed.t]) != 0.0)
        throw std::invalid_argument("build_l1_lp: costs are not zero-top normalized at y");
  }

  const L1Layout lay(inst);
  LinearProgram<S> lp;
  lp.maximize = true;

  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    const bool movable = !free_xi || (*free_xi)[s];
    for (Label i = 0; i < inst.num_labels(s); ++i) {
      const bool fixed = (i == y[s]) || !movable;
      lp.add_var(S{}, fixed ? S{} : S(1), S(1));
    }
  }
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    const int k = inst.num_labels(ed.s) + inst.num_labels(ed.t);
    for (int l = 0; l < k; ++l) lp.add_free_var(S{});
  }
  for (NodeId s = 0; s < inst.num_nodes(); ++s) lp.add_free_var(S{});

  // node rows: the reduced cost of label i at s stays nonnegative
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    for (Label i = 0; i < inst.num_labels(s); ++i) {
      S c = num::from_double<S>(inst.unary(s, i));
      if (eps != 0.0 && i != y[s]) c -= num::from_double<S>(eps);
      lp.begin_row_ge(S{});
      if (num::sign(c) != 0) lp.coef(lay.xi_var(s, i), c);
      for (EdgeId e : inst.incident_edges(s))
        lp.coef(lay.msg_var(e, inst.edge(e).t == s, i), S(1));
      lp.coef(lay.node_off_var(s), S(-1));
    }
  }
  // edge rows: one constraint pair per label pair, scaled by whichever side's
  // mass can vacate it; nonpositive costs couple each side separately,
  // positive costs need the plain bound plus the combined one. a zero cost
  // collapses both rows to the same inequality, emitted once.
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    const int ks = inst.num_labels(ed.s), kt = inst.num_labels(ed.t);
    for (Label i = 0; i < ks; ++i) {
      for (Label j = 0; j < kt; ++j) {
        const double cv = inst.edge_cost(e, i, j);
        const int m1 = lay.msg_var(e, false, i), m2 = lay.msg_var(e, true, j);
        if (cv == 0.0) {
          lp.begin_row_ge(S{});
          lp.coef(m1, S(-1));
          lp.coef(m2, S(-1));
        } else if (cv < 0.0) {
          const S c = num::from_double<S>(cv);
          lp.begin_row_ge(S{});
          lp.coef(lay.xi_var(ed.s, i), c);
          lp.coef(m1, S(-1));
          lp.coef(m2, S(-1));
          lp.begin_row_ge(S{});
          lp.coef(lay.xi_var(ed.t, j), c);
          lp.coef(m1, S(-1));
          lp.coef(m2, S(-1));
        } else {
          S nc = num::from_double<S>(cv);
          nc = -nc;
          lp.begin_row_ge(std::move(nc));
          lp.coef(m1, S(-1));
          lp.coef(m2, S(-1));
          const S c = num::from_double<S>(cv);
          lp.begin_row_ge(S{});
          lp.coef(lay.xi_var(ed.s, i), c);
          lp.coef(lay.xi_var(ed.t, j), c);
          lp.coef(m1, S(-1));
          lp.coef(m2, S(-1));
        }
      }
    }
  }
  // the node offsets may not create value out of thin air in total
  lp.begin_row_ge(S{});
  for (NodeId s = 0; s < inst.num_nodes(); ++s) lp.coef(lay.node_off_var(s), S(1));

  if (with_names) {
    lp.var_names.reserve(lp.num_vars());
    for (NodeId s = 0; s < inst.num_nodes(); ++s)
      for (Label i = 0; i < inst.num_labels(s); ++i) lp.var_names.push_back(tag("xi_", s, i));
    for (EdgeId e = 0; e < inst.num_edges(); ++e) {
      const Edge& ed = inst.edge(e);
      for (Label i = 0; i < inst.num_labels(ed.s); ++i)
        lp.var_names.push_back(tag("ph_", e, 0, i));
      for (Label j = 0; j < inst.num_labels(ed.t); ++j)
        lp.var_names.push_back(tag("ph_", e, 1, j));
    }
    for (NodeId s = 0; s < inst.num_nodes(); ++s) lp.var_names.push_back(tag("of_", s));
    lp.row_names.reserve(lp.num_rows());
    for (NodeId s = 0; s < inst.num_nodes(); ++s)
      for (Label i = 0; i < inst.num_labels(s); ++i) lp.row_names.push_back(tag("ua_", s, i));
    for (EdgeId e = 0; e < inst.num_edges(); ++e) {
      const Edge& ed = inst.edge(e);
      for (Label i = 0; i < inst.num_labels(ed.s); ++i) {
        for (Label j = 0; j < inst.num_labels(ed.t); ++j) {
          const double cv = inst.edge_cost(e, i, j);
          if (cv == 0.0) {
            lp.row_names.push_back(tag("pb_", e, i, j));
          } else {
            lp.row_names.push_back(tag("pb_", e, i, j) + "_s");
            lp.row_names.push_back(tag("pb_", e, i, j) + "_t");
          }
        }
      }
    }
    lp.row_names.push_back("budget");
  }
  return lp;
}

template <class S>
Reparametrization phi_from_l1_solution(const EnergyInstance& inst, const L1Layout& lay,
                                       const std::vector<S>& x) {
  if (static_cast<int>(x.size()) != lay.num_vars())
    throw std::invalid_argument("phi_from_l1_solution: solution size does not match layout");
  Reparametrization phi = Reparametrization::zeros(inst);
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      phi.msg_from(inst, e, ed.s, i) = num::to_double(x[lay.msg_var(e, false, i)]);
    for (Label j = 0; j < inst.num_labels(ed.t); ++j)
      phi.msg_from(inst, e, ed.t, j) = num::to_double(x[lay.msg_var(e, true, j)]);
  }
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    phi.node_off[s] = num::to_double(x[lay.node_off_var(s)]);
  return phi;
}

template <class S>
std::vector<double> xi_from_l1_solution(const EnergyInstance& inst, const L1Layout& lay,
                                        const std::vector<S>& x) {
  if (static_cast<int>(x.size()) != lay.num_vars())
    throw std::invalid_argument("xi_from_l1_solution: solution size does not match layout");
  std::vector<double> xi(inst.total_unary());
  for (int k = 0; k < inst.total_unary(); ++k) xi[k] = num::to_double(x[k]);
  return xi;
}

template LambdaObjective<double> instance_objective<double>(const EnergyInstance&);
template LambdaObjective<mpq_class> instance_objective<mpq_class>(const EnergyInstance&);
template LambdaObjective<double> improvement_objective<double>(const EnergyInstance&,
                                                               const PixelwiseMapping&, double);
template LambdaObjective<mpq_class> improvement_objective<mpq_class>(const EnergyInstance&,
                                                                     const PixelwiseMapping&,
                                                                     double);
template LinearProgram<double> build_lambda_lp<double>(const EnergyInstance&,
                                                       const LambdaObjective<double>&, bool);
template LinearProgram<mpq_class> build_lambda_lp<mpq_class>(const EnergyInstance&,
                                                             const LambdaObjective<mpq_class>&,
                                                             bool);
template LinearProgram<double> build_energy_lp<double>(const EnergyInstance&, bool);
template LinearProgram<mpq_class> build_energy_lp<mpq_class>(const EnergyInstance&, bool);
template Reparametrization phi_from_duals<double>(const EnergyInstance&, const MuIndex&,
                                                  const std::vector<double>&);
template Reparametrization phi_from_duals<mpq_class>(const EnergyInstance&, const MuIndex&,
                                                     const std::vector<mpq_class>&);
template RelaxedLabeling mu_from_solution<double>(const EnergyInstance&, const MuIndex&,
                                                  const std::vector<double>&);
template RelaxedLabeling mu_from_solution<mpq_class>(const EnergyInstance&, const MuIndex&,
                                                     const std::vector<mpq_class>&);
template LinearProgram<double> build_invariant_cone_lp<double>(const EnergyInstance&,
                                                               const PixelwiseMapping&);
template LinearProgram<mpq_class> build_invariant_cone_lp<mpq_class>(const EnergyInstance&,
                                                                     const PixelwiseMapping&);
template Reparametrization phi_from_pencil_duals<double>(const EnergyInstance&, const MuIndex&,
                                                         const std::vector<double>&);
template Reparametrization phi_from_pencil_duals<mpq_class>(const EnergyInstance&, const MuIndex&,
                                                            const std::vector<mpq_class>&);
template LinearProgram<double> build_l1_lp<double>(const EnergyInstance&, const Labeling&, double,
                                                   const std::vector<char>*, bool);
template LinearProgram<mpq_class> build_l1_lp<mpq_class>(const EnergyInstance&, const Labeling&,
                                                         double, const std::vector<char>*, bool);
template Reparametrization phi_from_l1_solution<double>(const EnergyInstance&, const L1Layout&,
                                                        const std::vector<double>&);
template Reparametrization phi_from_l1_solution<mpq_class>(const EnergyInstance&, const L1Layout&,
                                                           const std::vector<mpq_class>&);
template std::vector<double> xi_from_l1_solution<double>(const EnergyInstance&, const L1Layout&,
                                                         const std::vector<double>&);
template std::vector<double> xi_from_l1_solution<mpq_class>(const EnergyInstance&, const L1Layout&,
                                                            const std::vector<mpq_class>&);

}  // namespace partopt
