#ifndef PARTOPT_LAMBDA_LP_HPP
#define PARTOPT_LAMBDA_LP_HPP

#include <vector>

#include "partopt/lp.hpp"
#include "partopt/mapping.hpp"
#include "partopt/model.hpp"

namespace partopt {

// variable and row layout of LPs over the local polytope of one instance.
// variables: node marginals mu_s(i) in the unary layout, then edge marginals
// mu_st(i,j) in the pairwise layout, then the homogenizing mu0 fixed to 1.
// rows: for each stored edge its source-side pencils then target-side
// pencils, then one normalization row per node.
class MuIndex {
 public:
  explicit MuIndex(const EnergyInstance& inst);

  int node_var(NodeId s, Label i) const { return inst_->unary_offset(s) + i; }
  int edge_var(EdgeId e, Label i, Label j) const {
    return inst_->total_unary() + inst_->pair_offset(e) +
           i * inst_->num_labels(inst_->edge(e).t) + j;
  }
  int mu0_var() const { return mu0_; }
  int num_vars() const { return mu0_ + 1; }

  // pencil row sum_j mu_st(i,j) - mu_s(i) = 0; tgt_side selects whether the
  // fixed label lives on the stored edge's source or target end
  int pencil_row(EdgeId e, bool tgt_side, Label l) const {
    return edge_row_off_[e] + (tgt_side ? inst_->num_labels(inst_->edge(e).s) + l : l);
  }
  int norm_row(NodeId s) const { return norm_row0_ + s; }
  int num_rows() const { return norm_row0_ + inst_->num_nodes(); }

 private:
  const EnergyInstance* inst_;
  std::vector<int> edge_row_off_;
  int mu0_ = 0, norm_row0_ = 0;
};

// objective over the local-polytope coordinates in instance layout; the
// constant multiplies mu0
template <class S>
struct LambdaObjective {
  S constant{};
  std::vector<S> unary;
  std::vector<S> pair;
};

// the instance's own costs: <obj, mu> = <f, mu>
template <class S>
LambdaObjective<S> instance_objective(const EnergyInstance& inst);

// energy difference under p: <obj, delta(x)> = E_f(x) - E_f(p(x)). a
// nonnegative minimum over the polytope certifies that p never increases the
// energy. eps > 0 additionally charges every label the map moves, making the
// certificate strict: minima must actually move.
template <class S>
LambdaObjective<S> improvement_objective(const EnergyInstance& inst, const PixelwiseMapping& p,
                                         double eps = 0.0);

// min <obj, mu> over the local polytope, rows in MuIndex order
template <class S>
LinearProgram<S> build_lambda_lp(const EnergyInstance& inst, const LambdaObjective<S>& obj,
                                 bool with_names = false);

// the standard relaxation min <f, mu>
template <class S>
LinearProgram<S> build_energy_lp(const EnergyInstance& inst, bool with_names = false);

// duals of a lambda LP as a reparametrization: phi_st(i) is the pencil-row
// dual, phi_s the normalization-row dual. the solver's reduced cost of
// mu_s(i) is then exactly f^phi_s(i), and of mu_st(i,j) exactly f^phi_st(i,j).
template <class S>
Reparametrization phi_from_duals(const EnergyInstance& inst, const MuIndex& ix,
                                 const std::vector<S>& row_dual);

// min <f - P^T f, mu> over the cone of nonnegative mu whose image under the
// map's linear extension satisfies the pencil constraints: rows are the
// pencil rows applied to (I - P) mu, variables the node and edge coordinates.
// for an improving p the optimum is 0 and the pencil duals yield a
// reparametrization phi with P^T f^phi <= f^phi component-wise; for a
// non-improving p the LP is unbounded.
template <class S>
LinearProgram<S> build_invariant_cone_lp(const EnergyInstance& inst, const PixelwiseMapping& p);

// duals of the cone LP (pencil rows only, node offsets zero)
template <class S>
Reparametrization phi_from_pencil_duals(const EnergyInstance& inst, const MuIndex& ix,
                                        const std::vector<S>& row_dual);

template <class S>
RelaxedLabeling mu_from_solution(const EnergyInstance& inst, const MuIndex& ix,
                                 const std::vector<S>& x);

// layout of the reduced certificate LP: xi in the unary layout, then per
// stored edge the [toward-target | toward-source] message block, then one
// offset phi_s per node; all phi free, xi in [0,1] with xi at y fixed to 0.
class L1Layout {
 public:
  explicit L1Layout(const EnergyInstance& inst);

  int xi_var(NodeId s, Label i) const { return inst_->unary_offset(s) + i; }
  int msg_var(EdgeId e, bool tgt_side, Label l) const {
    return msg0_ + msg_off_[e] + (tgt_side ? inst_->num_labels(inst_->edge(e).s) + l : l);
  }
  int node_off_var(NodeId s) const { return node0_ + s; }
  int num_vars() const { return node0_ + inst_->num_nodes(); }

 private:
  const EnergyInstance* inst_;
  int msg0_ = 0, node0_ = 0;
  std::vector<int> msg_off_;
};

// max sum_si xi_si subject to the certificate inequalities. requires costs
// normalized to a zero top at y (checked; see zero_top_normalize). eps > 0
// charges the movable labels, which is the strict variant. free_xi, when
// given, fixes xi of the nodes marked 0 (windowed solves); every optimal
// vertex has exactly integral xi.
template <class S>
LinearProgram<S> build_l1_lp(const EnergyInstance& inst, const Labeling& y, double eps = 0.0,
                             const std::vector<char>* free_xi = nullptr,
                             bool with_names = false);

template <class S>
Reparametrization phi_from_l1_solution(const EnergyInstance& inst, const L1Layout& lay,
                                       const std::vector<S>& x);

// xi values in the unary layout (to_double'd for exact solves)
template <class S>
std::vector<double> xi_from_l1_solution(const EnergyInstance& inst, const L1Layout& lay,
                                        const std::vector<S>& x);

}  // namespace partopt

#endif
