#ifndef PARTOPT_DEE_HPP
#define PARTOPT_DEE_HPP

// dead-end elimination: local sufficient conditions that discard labels (and,
// in the pairwise variant, label pairs) without solving any LP. a discarded
// label alpha at node s comes with a witness beta such that swapping alpha to
// beta never increases the energy of any assignment that is still feasible at
// the time of the swap; iterated to a fixpoint, the composed swaps form a
// pixel-wise map whose guarantee is sequential: each elimination is valid on
// the problem restricted by all earlier ones.
//
// for the single-label condition alone the composed map is still relaxed-
// improving for the original costs: each swap improves on the face of the
// polytope spanned by the then-alive labels, and the idempotent partial
// compositions push every point into that face, so the inequalities chain.
// pair exclusions break this argument — a swap taken after an exclusion is
// only valid on mass avoiding the excluded pairs, which nothing relocates —
// so dee2 maps are not LP-verifiable in general and their soundness is
// audited combinatorially (exact arithmetic replay) instead.
//
// determinism: nodes ascending, alpha ascending, beta ascending, first
// qualifying witness wins; pair scans run edges ascending and label pairs in
// lexicographic order. at an exact tie the weak mode eliminates only when the
// witness precedes the candidate (beta < alpha, lexicographic for pairs),
// which keeps one optimum alive; the strict mode demands a strict inequality.

#include <vector>

#include "partopt/certificate.hpp"
#include "partopt/lp.hpp"
#include "partopt/model.hpp"
#include "partopt/persistency.hpp"

namespace partopt {

struct DeeOptions {
  bool strict = false;        // eliminate on > only; certificate claims every optimum
  bool pair_feedback = true;  // excluded pairs shrink the star minimization ranges
  // float_only evaluates the conditions in double; anything else replays them
  // in exact rational arithmetic and marks the certificate as certified
  ArithMode mode = ArithMode::certified;
};

// Goldstein's single-label condition, iterated to a fixpoint. the certificate
// map sends each eliminated label to its chain-resolved witness; y records the
// lowest surviving label per node (informational, the map is not all-to-one).
PersistencyCertificate dee1(const EnergyInstance& inst, const DeeOptions& opt = {});

// single-label and pair conditions together. pair eliminations cannot be
// expressed as a pixel-wise map and are reported as excluded_pairs (stored
// edge orientation); exclusions whose labels are later eliminated outright are
// dropped as subsumed. seed_exclusions, if given, pre-populate the excluded
// set without being re-reported, so a run can resume from earlier state (the
// fixpoint of dee2 is a property of the label sets *and* the exclusions:
// restricting labels alone forgets which witnesses were ruled out)
PersistencyCertificate dee2(const EnergyInstance& inst, const DeeOptions& opt = {},
                            const std::vector<PairExclusion>* seed_exclusions = nullptr);

// restriction of an instance to a surviving subset of labels per node, with
// the translation tables needed to map results back
struct LabelRestriction {
  EnergyInstance inst;                  // same nodes and edges, fewer labels
  std::vector<std::vector<Label>> orig; // orig[s][reduced label] = original label
};

// alive uses the unary layout of the source instance; every node must keep at
// least one label (throws std::invalid_argument otherwise)
LabelRestriction restrict_to_alive(const EnergyInstance& inst, const std::vector<char>& alive);

// sequential composition: dee2 first, then the reduced LP on the surviving
// labels with its test labeling chosen from the relaxation supports of the
// reduced instance. the certificate maps over original label ids and carries
// dee2's pair exclusions through.
PersistencyCertificate dee2_then_l1(const EnergyInstance& inst, const DeeOptions& dopt = {},
                                    const PersistencyOptions& popt = {});

}  // namespace partopt

#endif
