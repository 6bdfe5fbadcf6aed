#include "partopt/mapping.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace partopt {

PixelwiseMapping PixelwiseMapping::identity(const EnergyInstance& inst) {
  PixelwiseMapping p;
  p.offsets_.reserve(inst.num_nodes() + 1);
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    p.offsets_.push_back(p.offsets_.back() + inst.num_labels(s));
    for (Label i = 0; i < inst.num_labels(s); ++i) p.map_.push_back(i);
  }
  return p;
}

PixelwiseMapping PixelwiseMapping::all_to_one(const EnergyInstance& inst, const Labeling& y) {
  inst.require_labeling(y);
  PixelwiseMapping p = identity(inst);
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i) p.map_[p.slot(s, i)] = y[s];
  return p;
}

bool PixelwiseMapping::same_shape(const EnergyInstance& inst) const {
  if (num_nodes() != inst.num_nodes()) return false;
  for (NodeId s = 0; s < num_nodes(); ++s)
    if (num_labels(s) != inst.num_labels(s)) return false;
  return true;
}

int PixelwiseMapping::slot(NodeId s, Label i) const {
  if (s < 0 || s >= num_nodes()) throw std::invalid_argument("mapping: node out of range");
  if (i < 0 || i >= num_labels(s)) throw std::invalid_argument("mapping: label out of range");
  return offsets_[s] + i;
}

void PixelwiseMapping::set(NodeId s, Label i, Label to) {
  const int at = slot(s, i);
  if (to < 0 || to >= num_labels(s)) throw std::invalid_argument("mapping: target label out of range");
  map_[at] = to;
}

bool PixelwiseMapping::is_identity() const {
  for (NodeId s = 0; s < num_nodes(); ++s)
    for (Label i = 0; i < num_labels(s); ++i)
      if (map_[offsets_[s] + i] != i) return false;
  return true;
}

bool PixelwiseMapping::idempotent() const {
  for (NodeId s = 0; s < num_nodes(); ++s)
    for (Label i = 0; i < num_labels(s); ++i) {
      const Label to = map_[offsets_[s] + i];
      if (map_[offsets_[s] + to] != to) return false;
    }
  return true;
}

int PixelwiseMapping::moved_count() const {
  int n = 0;
  for (NodeId s = 0; s < num_nodes(); ++s)
    for (Label i = 0; i < num_labels(s); ++i)
      if (map_[offsets_[s] + i] != i) ++n;
  return n;
}

bool PixelwiseMapping::subset_to_one(const Labeling& y) const {
  if (static_cast<int>(y.size()) != num_nodes()) return false;
  for (NodeId s = 0; s < num_nodes(); ++s) {
    if (y[s] < 0 || y[s] >= num_labels(s)) return false;
    for (Label i = 0; i < num_labels(s); ++i) {
      const Label to = map_[offsets_[s] + i];
      if (to != i && to != y[s]) return false;
    }
    if (map_[offsets_[s] + y[s]] != y[s]) return false;
  }
  return true;
}

Labeling PixelwiseMapping::apply(const Labeling& x) const {
  if (static_cast<int>(x.size()) != num_nodes())
    throw std::invalid_argument("mapping: labeling size mismatch");
  Labeling out(x.size());
  for (NodeId s = 0; s < num_nodes(); ++s) out[s] = map_[slot(s, x[s])];
  return out;
}

PixelwiseMapping compose(const PixelwiseMapping& p1, const PixelwiseMapping& p2) {
  if (p1.num_nodes() != p2.num_nodes())
    throw std::invalid_argument("mapping composition: node counts differ");
  PixelwiseMapping out = p1;
  for (NodeId s = 0; s < p1.num_nodes(); ++s) {
    if (p1.num_labels(s) != p2.num_labels(s))
      throw std::invalid_argument("mapping composition: label counts differ");
    for (Label i = 0; i < p1.num_labels(s); ++i) out.set(s, i, p2(s, p1(s, i)));
  }
  return out;
}

void write_mapping(std::ostream& out, const PixelwiseMapping& p) {
  for (NodeId s = 0; s < p.num_nodes(); ++s)
    for (Label i = 0; i < p.num_labels(s); ++i)
      if (p(s, i) != i) out << "map " << s << ' ' << i << ' ' << p(s, i) << "\n";
}

PixelwiseMapping read_mapping(std::istream& in, const EnergyInstance& inst) {
  PixelwiseMapping p = PixelwiseMapping::identity(inst);
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (tok != "map") throw std::invalid_argument("mapping: unexpected token '" + tok + "'");
    long s = 0, i = 0, to = 0;
    if (!(in >> s >> i >> to)) throw std::invalid_argument("mapping: truncated map line");
    if (s < 0 || s >= inst.num_nodes()) throw std::invalid_argument("mapping: node out of range");
    p.set(static_cast<NodeId>(s), static_cast<Label>(i), static_cast<Label>(to));
  }
  return p;
}

void write_mapping_file(const std::string& path, const PixelwiseMapping& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  write_mapping(out, p);
}

PixelwiseMapping read_mapping_file(const std::string& path, const EnergyInstance& inst) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open mapping file: " + path);
  return read_mapping(in, inst);
}

void write_labeling(std::ostream& out, const Labeling& x) {
  for (size_t s = 0; s < x.size(); ++s) out << s << ' ' << x[s] << "\n";
}

Labeling read_labeling(std::istream& in, const EnergyInstance& inst) {
  Labeling x(inst.num_nodes(), -1);
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    long s = 0, l = 0;
    try {
      s = std::stol(tok);
    } catch (const std::exception&) {
      throw std::invalid_argument("labeling: bad node '" + tok + "'");
    }
    if (!(in >> l)) throw std::invalid_argument("labeling: truncated line");
    if (s < 0 || s >= inst.num_nodes()) throw std::invalid_argument("labeling: node out of range");
    if (x[s] != -1) throw std::invalid_argument("labeling: node listed twice");
    if (l < 0 || l >= inst.num_labels(static_cast<NodeId>(s)))
      throw std::invalid_argument("labeling: label out of range");
    x[s] = static_cast<Label>(l);
  }
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    if (x[s] < 0)
      throw std::invalid_argument("labeling: node " + std::to_string(s) + " missing");
  return x;
}

void write_labeling_file(const std::string& path, const Labeling& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  write_labeling(out, x);
}

Labeling read_labeling_file(const std::string& path, const EnergyInstance& inst) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open labeling file: " + path);
  return read_labeling(in, inst);
}

RelaxedLabeling push_forward(const EnergyInstance& inst, const PixelwiseMapping& p,
                             const RelaxedLabeling& mu) {
  if (!p.same_shape(inst)) throw std::invalid_argument("push_forward: shape mismatch");
  RelaxedLabeling out = RelaxedLabeling::zeros(inst);
  out.mu0 = mu.mu0;
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i)
      out.node_at(inst, s, p(s, i)) += mu.node_at(inst, s, i);
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      for (Label j = 0; j < inst.num_labels(ed.t); ++j)
        out.edge_at(inst, e, p(ed.s, i), p(ed.t, j)) += mu.edge_at(inst, e, i, j);
  }
  return out;
}

RelaxedLabeling push_forward_fractional(const EnergyInstance& inst, const Labeling& y,
                                        const std::vector<double>& xi,
                                        const std::vector<double>& xi_pair,
                                        const RelaxedLabeling& mu) {
  inst.require_labeling(y);
  if (static_cast<int>(xi.size()) != inst.total_unary() ||
      static_cast<int>(xi_pair.size()) != inst.total_pairwise())
    throw std::invalid_argument("fractional push-forward: xi layout mismatch");
  constexpr double band_tol = 1e-12;
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    for (Label i = 0; i < inst.num_labels(s); ++i) {
      const double v = xi[inst.unary_offset(s) + i];
      if (v < -band_tol || v > 1 + band_tol)
        throw std::invalid_argument("fractional push-forward: xi outside [0,1]");
    }
    if (std::fabs(xi[inst.unary_offset(s) + y[s]]) > band_tol)
      throw std::invalid_argument("fractional push-forward: xi at the target label must be 0");
  }
  RelaxedLabeling out = RelaxedLabeling::zeros(inst);
  out.mu0 = mu.mu0;
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i) {
      const double v = xi[inst.unary_offset(s) + i];
      const double m = mu.node_at(inst, s, i);
      out.node_at(inst, s, i) += m * (1 - v);
      out.node_at(inst, s, y[s]) += m * v;
    }
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    const int kt = inst.num_labels(ed.t);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      for (Label j = 0; j < kt; ++j) {
        const double xs = xi[inst.unary_offset(ed.s) + i];
        const double xt = xi[inst.unary_offset(ed.t) + j];
        const double xst = xi_pair[inst.pair_offset(e) + i * kt + j];
        if (xst < std::max(0.0, xs + xt - 1) - band_tol || xst > std::min(xs, xt) + band_tol)
          throw std::invalid_argument(
              "fractional push-forward: joint weight outside its admissible band");
        const double m = mu.edge_at(inst, e, i, j);
        out.edge_at(inst, e, y[ed.s], y[ed.t]) += m * xst;
        out.edge_at(inst, e, i, y[ed.t]) += m * (xt - xst);
        out.edge_at(inst, e, y[ed.s], j) += m * (xs - xst);
        out.edge_at(inst, e, i, j) += m * (1 - xs - xt + xst);
      }
  }
  return out;
}

bool component_wise_improving(const EnergyInstance& inst, const PixelwiseMapping& p,
                              const Reparametrization& phi, double tol, double* worst) {
  if (!p.same_shape(inst)) throw std::invalid_argument("component-wise check: shape mismatch");
  const EnergyInstance rep = reparametrize(inst, phi);
  double w = 0.0;
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i)
      w = std::max(w, rep.unary(s, p(s, i)) - rep.unary(s, i));
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      for (Label j = 0; j < inst.num_labels(ed.t); ++j)
        w = std::max(w, rep.edge_cost(e, p(ed.s, i), p(ed.t, j)) - rep.edge_cost(e, i, j));
  }
  if (worst != nullptr) *worst = w;
  return w <= tol;
}

}  // namespace partopt
