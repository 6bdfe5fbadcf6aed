#include "partopt/model.hpp"

#include <algorithm>
#include <cmath>

namespace partopt {

EnergyInstance::EnergyInstance(std::vector<int> labels_per_node)
    : num_labels_(std::move(labels_per_node)) {
  int n = static_cast<int>(num_labels_.size());
  adj_.resize(n);
  unary_off_.resize(n);
  int off = 0;
  for (int s = 0; s < n; ++s) {
    if (num_labels_[s] < 1)
      throw std::invalid_argument("node " + std::to_string(s) + " has no labels");
    unary_off_[s] = off;
    off += num_labels_[s];
  }
  unary_.assign(off, 0.0);
}

EnergyInstance EnergyInstance::uniform_labels(int num_nodes, int num_labels) {
  return EnergyInstance(std::vector<int>(num_nodes, num_labels));
}

int EnergyInstance::check_node(NodeId s) const {
  if (s < 0 || s >= num_nodes())
    throw std::invalid_argument("node id " + std::to_string(s) + " out of range");
  return s;
}

int EnergyInstance::unary_index(NodeId s, Label i) const {
  check_node(s);
  if (i < 0 || i >= num_labels_[s])
    throw std::invalid_argument("label " + std::to_string(i) + " out of range at node " +
                                std::to_string(s));
  return unary_off_[s] + i;
}

int EnergyInstance::pair_index(EdgeId e, Label i, Label j) const {
  if (e < 0 || e >= num_edges()) throw std::invalid_argument("edge id out of range");
  const Edge& ed = edges_[e];
  if (i < 0 || i >= num_labels_[ed.s] || j < 0 || j >= num_labels_[ed.t])
    throw std::invalid_argument("pair label out of range on edge " + std::to_string(e));
  return pair_off_[e] + i * num_labels_[ed.t] + j;
}

EdgeId EnergyInstance::find_edge(NodeId s, NodeId t) const {
  check_node(s);
  check_node(t);
  for (EdgeId e : adj_[s]) {
    const Edge& ed = edges_[e];
    if ((ed.s == s && ed.t == t) || (ed.s == t && ed.t == s)) return e;
  }
  return -1;
}

EdgeId EnergyInstance::add_edge(NodeId s, NodeId t) {
  check_node(s);
  check_node(t);
  if (s == t) throw std::invalid_argument("self-loop edge rejected");
  if (find_edge(s, t) != -1)
    throw std::invalid_argument("duplicate edge (" + std::to_string(s) + "," +
                                std::to_string(t) + ")");
  EdgeId e = num_edges();
  edges_.push_back({s, t});
  adj_[s].push_back(e);
  adj_[t].push_back(e);
  pair_off_.push_back(static_cast<int>(pairwise_.size()));
  pairwise_.resize(pairwise_.size() +
                   static_cast<std::size_t>(num_labels_[s]) * num_labels_[t], 0.0);
  return e;
}

double EnergyInstance::pair(NodeId s, NodeId t, Label i, Label j) const {
  EdgeId e = find_edge(s, t);
  if (e == -1)
    throw std::invalid_argument("no edge between " + std::to_string(s) + " and " +
                                std::to_string(t));
  return edges_[e].s == s ? pairwise_[pair_index(e, i, j)] : pairwise_[pair_index(e, j, i)];
}

void EnergyInstance::set_pair(NodeId s, NodeId t, Label i, Label j, double v) {
  EdgeId e = find_edge(s, t);
  if (e == -1)
    throw std::invalid_argument("no edge between " + std::to_string(s) + " and " +
                                std::to_string(t));
  pairwise_[edges_[e].s == s ? pair_index(e, i, j) : pair_index(e, j, i)] = v;
}

bool EnergyInstance::valid_labeling(const Labeling& x) const {
  if (static_cast<int>(x.size()) != num_nodes()) return false;
  for (int s = 0; s < num_nodes(); ++s)
    if (x[s] < 0 || x[s] >= num_labels_[s]) return false;
  return true;
}

void EnergyInstance::require_labeling(const Labeling& x) const {
  if (!valid_labeling(x)) throw std::invalid_argument("labeling invalid for instance");
}

bool EnergyInstance::same_shape(const EnergyInstance& other) const {
  if (num_labels_ != other.num_labels_) return false;
  if (edges_.size() != other.edges_.size()) return false;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].s != other.edges_[e].s || edges_[e].t != other.edges_[e].t) return false;
  return true;
}

double EnergyInstance::max_abs_cost() const {
  double m = std::abs(f0_);
  for (double v : unary_) m = std::max(m, std::abs(v));
  for (double v : pairwise_) m = std::max(m, std::abs(v));
  return m;
}

RelaxedLabeling RelaxedLabeling::zeros(const EnergyInstance& inst) {
  RelaxedLabeling mu;
  mu.mu0 = 0.0;
  mu.node.assign(inst.total_unary(), 0.0);
  mu.edge.assign(inst.total_pairwise(), 0.0);
  return mu;
}

Reparametrization Reparametrization::zeros(const EnergyInstance& inst) {
  Reparametrization phi;
  phi.node_off.assign(inst.num_nodes(), 0.0);
  phi.msg_off_.resize(inst.num_edges());
  int off = 0;
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    phi.msg_off_[e] = off;
    off += inst.num_labels(inst.edge(e).s) + inst.num_labels(inst.edge(e).t);
  }
  phi.msg.assign(off, 0.0);
  return phi;
}

double& Reparametrization::msg_from(const EnergyInstance& inst, EdgeId e, NodeId a, Label i) {
  const Edge& ed = inst.edge(e);
  if (a == ed.s) return msg[msg_off_[e] + i];
  if (a == ed.t) return msg[msg_off_[e] + inst.num_labels(ed.s) + i];
  throw std::invalid_argument("node is not an endpoint of edge");
}

double Reparametrization::msg_from(const EnergyInstance& inst, EdgeId e, NodeId a,
                                   Label i) const {
  return const_cast<Reparametrization*>(this)->msg_from(inst, e, a, i);
}

double energy(const EnergyInstance& inst, const Labeling& x) {
  inst.require_labeling(x);
  double v = inst.f0();
  for (NodeId s = 0; s < inst.num_nodes(); ++s) v += inst.unary(s, x[s]);
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    v += inst.edge_cost(e, x[ed.s], x[ed.t]);
  }
  return v;
}

RelaxedLabeling delta_embed(const EnergyInstance& inst, const Labeling& x) {
  inst.require_labeling(x);
  RelaxedLabeling mu = RelaxedLabeling::zeros(inst);
  mu.mu0 = 1.0;
  for (NodeId s = 0; s < inst.num_nodes(); ++s) mu.node_at(inst, s, x[s]) = 1.0;
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    mu.edge_at(inst, e, x[ed.s], x[ed.t]) = 1.0;
  }
  return mu;
}

double relaxed_energy(const EnergyInstance& inst, const RelaxedLabeling& mu) {
  double v = inst.f0() * mu.mu0;
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i)
      v += inst.unary(s, i) * mu.node_at(inst, s, i);
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      for (Label j = 0; j < inst.num_labels(ed.t); ++j)
        v += inst.edge_cost(e, i, j) * mu.edge_at(inst, e, i, j);
  }
  return v;
}

double lambda_violation(const EnergyInstance& inst, const RelaxedLabeling& mu) {
  double worst = std::abs(mu.mu0 - 1.0);
  for (double v : mu.node) worst = std::max(worst, -v);
  for (double v : mu.edge) worst = std::max(worst, -v);
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    double sum = 0.0;
    for (Label i = 0; i < inst.num_labels(s); ++i) sum += mu.node_at(inst, s, i);
    worst = std::max(worst, std::abs(sum - mu.mu0));
  }
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i) {
      double sum = 0.0;
      for (Label j = 0; j < inst.num_labels(ed.t); ++j) sum += mu.edge_at(inst, e, i, j);
      worst = std::max(worst, std::abs(sum - mu.node_at(inst, ed.s, i)));
    }
    for (Label j = 0; j < inst.num_labels(ed.t); ++j) {
      double sum = 0.0;
      for (Label i = 0; i < inst.num_labels(ed.s); ++i) sum += mu.edge_at(inst, e, i, j);
      worst = std::max(worst, std::abs(sum - mu.node_at(inst, ed.t, j)));
    }
  }
  return worst;
}

EnergyInstance reparametrize(const EnergyInstance& inst, const Reparametrization& phi) {
  if (static_cast<int>(phi.node_off.size()) != inst.num_nodes() ||
      static_cast<int>(phi.msg_off_.size()) != inst.num_edges())
    throw std::invalid_argument("reparametrization shape mismatch");
  EnergyInstance out = inst;
  double c = inst.f0();
  for (NodeId s = 0; s < inst.num_nodes(); ++s) c += phi.node_off[s];
  out.set_f0(c);
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i) {
      double v = inst.unary(s, i) - phi.node_off[s];
      for (EdgeId e : inst.incident_edges(s)) v += phi.msg_from(inst, e, s, i);
      out.set_unary(s, i, v);
    }
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      for (Label j = 0; j < inst.num_labels(ed.t); ++j)
        out.set_edge_cost(e, i, j,
                          inst.edge_cost(e, i, j) - phi.msg_from(inst, e, ed.s, i) -
                              phi.msg_from(inst, e, ed.t, j));
  }
  return out;
}

EnergyInstance zero_top_normalize(const EnergyInstance& inst, const Labeling& y) {
  inst.require_labeling(y);
  EnergyInstance out = inst;
  double c = inst.f0();
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    c += inst.edge_cost(e, y[ed.s], y[ed.t]);
  }
  for (NodeId s = 0; s < inst.num_nodes(); ++s) c += inst.unary(s, y[s]);
  out.set_f0(c);
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    for (Label i = 0; i < inst.num_labels(s); ++i) {
      double v = inst.unary(s, i) - inst.unary(s, y[s]);
      for (EdgeId e : inst.incident_edges(s)) {
        const Edge& ed = inst.edge(e);
        NodeId t = (ed.s == s) ? ed.t : ed.s;
        v += (ed.s == s ? inst.edge_cost(e, i, y[t]) : inst.edge_cost(e, y[t], i)) -
             inst.edge_cost(e, y[ed.s], y[ed.t]);
      }
      out.set_unary(s, i, v);
    }
  }
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      for (Label j = 0; j < inst.num_labels(ed.t); ++j)
        out.set_edge_cost(e, i, j,
                          inst.edge_cost(e, i, j) - inst.edge_cost(e, i, y[ed.t]) -
                              inst.edge_cost(e, y[ed.s], j) +
                              inst.edge_cost(e, y[ed.s], y[ed.t]));
  }
  return out;
}

}  // namespace partopt
