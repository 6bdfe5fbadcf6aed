#ifndef PARTOPT_MAPPING_HPP
#define PARTOPT_MAPPING_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "partopt/model.hpp"

namespace partopt {

// pixel-wise labeling transformation: one label map p_s per node, applied
// coordinate-wise as (p(x))_s = p_s(x_s). stored flat in the instance's unary
// layout; defaults to the identity.
class PixelwiseMapping {
 public:
  PixelwiseMapping() = default;
  static PixelwiseMapping identity(const EnergyInstance& inst);
  // everything collapses onto y: p_s(i) = y_s for all i
  static PixelwiseMapping all_to_one(const EnergyInstance& inst, const Labeling& y);

  int num_nodes() const { return static_cast<int>(offsets_.size()) - 1; }
  int num_labels(NodeId s) const { return offsets_[s + 1] - offsets_[s]; }
  bool same_shape(const EnergyInstance& inst) const;

  Label operator()(NodeId s, Label i) const { return map_[slot(s, i)]; }
  void set(NodeId s, Label i, Label to);

  bool is_identity() const;
  // idempotent: p_s(p_s(i)) == p_s(i) for every node and label
  bool idempotent() const;
  // number of (s, i) with p_s(i) != i; the count of eliminated labels
  int moved_count() const;
  // true if every non-fixed label maps directly to y_s
  bool subset_to_one(const Labeling& y) const;

  Labeling apply(const Labeling& x) const;

 private:
  int slot(NodeId s, Label i) const;
  std::vector<Label> map_;
  std::vector<int> offsets_{0};
};

// p2 after p1: x -> p2(p1(x)). shapes must match.
PixelwiseMapping compose(const PixelwiseMapping& p1, const PixelwiseMapping& p2);

// text form, one line per entry: "map <node> <from> <to>", identity omitted.
// reading requires shape agreement with inst and rejects out-of-range labels.
void write_mapping(std::ostream& out, const PixelwiseMapping& p);
PixelwiseMapping read_mapping(std::istream& in, const EnergyInstance& inst);
void write_mapping_file(const std::string& path, const PixelwiseMapping& p);
PixelwiseMapping read_mapping_file(const std::string& path, const EnergyInstance& inst);

// labeling text form: one "<node> <label>" line per node
void write_labeling(std::ostream& out, const Labeling& x);
Labeling read_labeling(std::istream& in, const EnergyInstance& inst);
void write_labeling_file(const std::string& path, const Labeling& x);
Labeling read_labeling_file(const std::string& path, const EnergyInstance& inst);

// the linear extension [P mu]: node mass mu_s(i) moves to p_s(i), edge mass
// mu_st(i,j) to (p_s(i), p_t(j)), mu0 unchanged. maps the local polytope into
// itself, which property tests check directly.
RelaxedLabeling push_forward(const EnergyInstance& inst, const PixelwiseMapping& p,
                             const RelaxedLabeling& mu);

// fractional relaxation of a subset-to-one collapse toward y: node label i
// keeps weight 1 - xi_s(i) and sends xi_s(i) to y_s. on an edge the joint
// move weight of (i, j) toward (y_s, y_t) is xi_st(i, j), which must lie in
// the Frechet band [max(0, xi_si + xi_tj - 1), min(xi_si, xi_tj)]; the
// remaining mass splits between (i, y_t) and (y_s, j). xi uses the unary
// layout, xi_pair the pairwise layout; xi at y_s must be 0.
RelaxedLabeling push_forward_fractional(const EnergyInstance& inst, const Labeling& y,
                                        const std::vector<double>& xi,
                                        const std::vector<double>& xi_pair,
                                        const RelaxedLabeling& mu);

// sufficient certificate check on a reparametrized instance: p never increases
// any unary or pairwise entry of f^phi, i.e. f^phi_s(p_s(i)) <= f^phi_s(i)
// and f^phi_st(p_s(i), p_t(j)) <= f^phi_st(i, j), all within tol.
// returns the largest violation through 'worst' if given.
bool component_wise_improving(const EnergyInstance& inst, const PixelwiseMapping& p,
                              const Reparametrization& phi, double tol,
                              double* worst = nullptr);

}  // namespace partopt

#endif
