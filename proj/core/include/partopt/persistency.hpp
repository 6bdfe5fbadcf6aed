#ifndef PARTOPT_PERSISTENCY_HPP
#define PARTOPT_PERSISTENCY_HPP

#include <vector>

#include "partopt/certificate.hpp"
#include "partopt/lp.hpp"
#include "partopt/mapping.hpp"
#include "partopt/model.hpp"
#include "partopt/relint.hpp"

namespace partopt {

// solvers maximizing the number of labels a single certificate eliminates:
// the reduced LP over subset-to-one maps toward a test labeling y, its strict
// variant, the variant that also chooses y from the relaxation, and the
// generic pruning loop over per-node candidate sets.

// indicator vector of a fractional subset-to-one map: node[s,i] is the mass
// label i sends to y_s. pair indicators are optimized out of the reduced LP;
// when present they must sit in the feasibility band checked by the
// fractional applicator.
struct XiVector {
  std::vector<double> node;  // unary layout
  std::vector<double> pair;  // pairwise layout; empty when not materialized
  bool has_pair() const { return !pair.empty(); }
};

struct PersistencyOptions {
  ArithMode mode = ArithMode::certified;
  double int_tol = 1e-6;     // snapping tolerance for optimal xi
  double verify_tol = 1e-7;  // float acceptance slack on verification values
  SimplexOptions simplex;
  RelintOptions relint;
};

struct L1Outcome {
  XiVector xi;               // optimal indicators after snapping
  PersistencyCertificate cert;
  Reparametrization phi;     // message part of the LP optimum
  double lp_value = 0.0;     // number of labels moved
  int iterations = 0;
};

// maximize the number of labels sent to y over fractional subset-to-one maps
// (normalizes internally; every optimum is integral). the returned mapping is
// re-verified before the certificate is issued. free_xi, when given, pins the
// nodes marked 0 to the identity (windowed solves).
L1Outcome solve_l1(const EnergyInstance& inst, const Labeling& y,
                   const PersistencyOptions& opt = {},
                   const std::vector<char>* free_xi = nullptr);

// strict variant: charges eps > 0 on every moved label, so eliminated labels
// are avoided by all optima, not just one
L1Outcome solve_eps_l1(const EnergyInstance& inst, const Labeling& y, double eps,
                       const PersistencyOptions& opt = {});

// what the relaxation pins down: per-node support of the relative interior of
// the optimal face, and a deterministic test labeling (the integral label
// where the face is integral, otherwise the lowest index among the labels of
// largest mass)
struct RelaxationSupports {
  Labeling y;
  std::vector<char> pinned;  // per node: the face assigns one label mass 1
  std::vector<char> alive;   // unary layout: mu_s(i) > 0 somewhere on the face
  double lp_value = 0.0;
  bool certified = false;
};

RelaxationSupports relaxation_supports(const EnergyInstance& inst,
                                       const PersistencyOptions& opt = {});

// supports of the optimal facet of an already-solved LP over the local
// polytope of inst (the node variables must occupy the unary layout, as every
// builder here arranges). used by relaxation_supports and by the windowed
// test problems.
RelaxationSupports facet_supports(const EnergyInstance& inst, const LinearProgram<double>& flp,
                                  const LinearProgram<mpq_class>* qlp, const ModeSolution& ms,
                                  const RelintOptions& ropt);

// choose y from the relaxation supports, then run the strict solver with it
L1Outcome max_strong_all_to_one_unknown(const EnergyInstance& inst, double eps,
                                        const PersistencyOptions& opt = {});

// iterated pruning over per-node candidate sets C_s: start from the full
// all-to-y map, verify, and while verification fails drop candidates whose
// support pattern in a relative-interior optimal point rules them out.
// returns once the surviving map verifies.
PersistencyCertificate max_improve(const EnergyInstance& inst, const Labeling& y,
                                   const PersistencyOptions& opt = {});

// drop candidate maps that move mass the relaxation proves immovable: weakly
// improving maps must keep each support set alive (p_s maps it into itself),
// strictly improving maps must fix it pointwise
std::vector<PixelwiseMapping> necessary_condition_filter(
    const RelaxationSupports& sup, const std::vector<PixelwiseMapping>& candidates, bool strict);
std::vector<PixelwiseMapping> necessary_condition_filter(
    const EnergyInstance& inst, const std::vector<PixelwiseMapping>& candidates, bool strict,
    const PersistencyOptions& opt = {});

}  // namespace partopt

#endif
