#ifndef PARTOPT_MODEL_HPP
#define PARTOPT_MODEL_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace partopt {

using NodeId = int;
using Label = int;
using EdgeId = int;

// a labeling x: one label per node
using Labeling = std::vector<Label>;

struct Edge {
  NodeId s = -1, t = -1;
};

// pairwise energy E_f(x) = f0 + sum_s f_s(x_s) + sum_{st in E} f_st(x_s, x_t)
// over a graph (V, E) with per-node label sets L_s = {0, ..., K_s - 1}.
//
// edges are stored in one orientation only (st in E implies ts not in E);
// the pair() accessor is symmetric and resolves direction internally.
// the type is mutated only while being assembled (generator / parser /
// transformation outputs); every algorithm treats it as immutable.
class EnergyInstance {
 public:
  EnergyInstance() = default;
  explicit EnergyInstance(std::vector<int> labels_per_node);
  static EnergyInstance uniform_labels(int num_nodes, int num_labels);

  int num_nodes() const { return static_cast<int>(num_labels_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_labels(NodeId s) const { return num_labels_[check_node(s)]; }
  const std::vector<int>& labels_per_node() const { return num_labels_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  // adjacency: edge ids incident to s, in edge-insertion order
  const std::vector<EdgeId>& incident_edges(NodeId s) const { return adj_[check_node(s)]; }
  int degree(NodeId s) const { return static_cast<int>(adj_[check_node(s)].size()); }
  // stored edge between s and t in either orientation, or -1
  EdgeId find_edge(NodeId s, NodeId t) const;

  EdgeId add_edge(NodeId s, NodeId t);  // rejects self-loops and duplicates

  double f0() const { return f0_; }
  void set_f0(double v) { f0_ = v; }

  double unary(NodeId s, Label i) const { return unary_[unary_index(s, i)]; }
  void set_unary(NodeId s, Label i, double v) { unary_[unary_index(s, i)] = v; }
  void add_unary(NodeId s, Label i, double v) { unary_[unary_index(s, i)] += v; }

  // symmetric pairwise accessor: pair(s,t,i,j) = f_st(i,j) = f_ts(j,i)
  double pair(NodeId s, NodeId t, Label i, Label j) const;
  void set_pair(NodeId s, NodeId t, Label i, Label j, double v);

  // direct access by stored edge orientation: f_e(i at source, j at target)
  double edge_cost(EdgeId e, Label i, Label j) const {
    return pairwise_[pair_index(e, i, j)];
  }
  void set_edge_cost(EdgeId e, Label i, Label j, double v) {
    pairwise_[pair_index(e, i, j)] = v;
  }

  // flattened layouts, shared by RelaxedLabeling and cost-vector builders:
  // unary slot of (s, i) is unary_offset(s) + i,
  // pairwise slot of (e, i, j) is pair_offset(e) + i * K_t + j.
  int unary_offset(NodeId s) const { return unary_off_[check_node(s)]; }
  int pair_offset(EdgeId e) const { return pair_off_[e]; }
  int total_unary() const { return static_cast<int>(unary_.size()); }
  int total_pairwise() const { return static_cast<int>(pairwise_.size()); }

  bool valid_labeling(const Labeling& x) const;
  void require_labeling(const Labeling& x) const;  // throws std::invalid_argument

  bool same_shape(const EnergyInstance& other) const;
  double max_abs_cost() const;

 private:
  int check_node(NodeId s) const;
  int unary_index(NodeId s, Label i) const;
  int pair_index(EdgeId e, Label i, Label j) const;

  std::vector<int> num_labels_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> adj_;
  double f0_ = 0.0;
  std::vector<double> unary_;
  std::vector<double> pairwise_;
  std::vector<int> unary_off_;
  std::vector<int> pair_off_;
};

// relaxed labeling mu over the index set of an instance: mu0, node marginals
// mu_s(i) and edge marginals mu_st(i,j), flattened with the instance's layout.
// plain data; all interpretation goes through the owning instance's shape.
struct RelaxedLabeling {
  double mu0 = 1.0;
  std::vector<double> node;
  std::vector<double> edge;

  static RelaxedLabeling zeros(const EnergyInstance& inst);

  double& node_at(const EnergyInstance& inst, NodeId s, Label i) {
    return node[inst.unary_offset(s) + i];
  }
  double node_at(const EnergyInstance& inst, NodeId s, Label i) const {
    return node[inst.unary_offset(s) + i];
  }
  double& edge_at(const EnergyInstance& inst, EdgeId e, Label i, Label j) {
    return edge[inst.pair_offset(e) + i * inst.num_labels(inst.edge(e).t) + j];
  }
  double edge_at(const EnergyInstance& inst, EdgeId e, Label i, Label j) const {
    return edge[inst.pair_offset(e) + i * inst.num_labels(inst.edge(e).t) + j];
  }
};

// dual vector phi: one message phi_st(i) per directed edge pencil plus a
// scalar offset phi_s per node. for stored edge e = (s,t) the block layout is
// [phi_st(0..K_s-1) | phi_ts(0..K_t-1)] at msg_offset(e).
struct Reparametrization {
  std::vector<double> msg;
  std::vector<double> node_off;
  std::vector<int> msg_off_;  // per edge

  static Reparametrization zeros(const EnergyInstance& inst);

  int msg_offset(EdgeId e) const { return msg_off_[e]; }
  // message in direction from 'a' along stored edge e (a must be an endpoint)
  double& msg_from(const EnergyInstance& inst, EdgeId e, NodeId a, Label i);
  double msg_from(const EnergyInstance& inst, EdgeId e, NodeId a, Label i) const;
};

// ---- operations ------------------------------------------------------------

double energy(const EnergyInstance& inst, const Labeling& x);

RelaxedLabeling delta_embed(const EnergyInstance& inst, const Labeling& x);

// <f, mu> including the f0 * mu0 term
double relaxed_energy(const EnergyInstance& inst, const RelaxedLabeling& mu);

// largest violation of the local-polytope constraints (0 for a member):
// negativity, per-node normalization sum_i mu_s(i) = mu0, |mu0 - 1|,
// and edge marginalization consistency.
double lambda_violation(const EnergyInstance& inst, const RelaxedLabeling& mu);

inline bool in_lambda(const EnergyInstance& inst, const RelaxedLabeling& mu,
                      double tol = 1e-8) {
  return lambda_violation(inst, mu) <= tol;
}

// f^phi: f_s(i) + sum_{t in N(s)} phi_st(i) - phi_s on nodes,
// f_st(i,j) - phi_st(i) - phi_ts(j) on edges, f0 + sum_s phi_s on the constant.
// preserves E_f(x) for every x and <f, mu> for every mu in Lambda.
EnergyInstance reparametrize(const EnergyInstance& inst, const Reparametrization& phi);

// equivalent transformation making the test labeling y a "zero top":
// f_s(y_s) = 0, f_st(y_s, j) = f_st(i, y_t) = 0, with the shift absorbed in f0.
EnergyInstance zero_top_normalize(const EnergyInstance& inst, const Labeling& y);

// error taxonomy: std::invalid_argument for malformed inputs (CLI exit 1),
// SolverError for LP failures (exit 2), CertificationError when a result that
// must certify does not (exit 3).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace partopt

#endif
