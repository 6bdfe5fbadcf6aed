#ifndef PARTOPT_ORACLE_HPP
#define PARTOPT_ORACLE_HPP

// ground truth for small instances: exhaustive minimization returning the
// complete set of optima, a frontier ("strip") dynamic program that reaches
// grid sizes enumeration cannot, and the integrality gap against the linear
// relaxation. optima are compared by exact equality of the summed energies,
// which is the right notion for the integer-cost benchmark corpus.

#include <cstdint>
#include <utility>
#include <vector>

#include "partopt/certificate.hpp"
#include "partopt/lp.hpp"
#include "partopt/model.hpp"

namespace partopt {

struct BruteForceResult {
  double value = 0.0;
  std::vector<Labeling> argmins;  // every optimal labeling, lexicographic
};

// exhaustive enumeration; throws std::invalid_argument once the state count
// Prod_s K_s exceeds cap
BruteForceResult brute_force_minimize(const EnergyInstance& inst, std::uint64_t cap = 1000000);

// restrictions for the dynamic program: dead labels, forbidden stored-edge
// assignments, and forced single-node assignments (later entries only narrow)
struct DpRestriction {
  std::vector<char> alive;  // unary layout; empty = everything allowed
  std::vector<PairExclusion> excluded;
  std::vector<std::pair<NodeId, Label>> forced;
};

// exact minimum via a sliding frontier over the node ordering 0..n-1; the
// frontier must hold every earlier endpoint of an edge, so the reach is
// governed by the largest id span of an edge (a row-major grid spans at most
// cols + 1). throws std::invalid_argument when the frontier state count
// exceeds state_cap; returns +infinity when the restriction is infeasible.
double dp_min(const EnergyInstance& inst, const DpRestriction& r = {},
              std::uint64_t state_cap = std::uint64_t{1} << 22);

// optimum of the relaxation min <f, mu> over the local polytope
double relaxation_min(const EnergyInstance& inst, ArithMode mode = ArithMode::certified);

// integer minimum minus relaxation optimum; nonnegative up to solver
// tolerance, and zero exactly when the relaxation is tight
double integrality_gap(const EnergyInstance& inst, double brute_min,
                       ArithMode mode = ArithMode::certified);
double integrality_gap(const EnergyInstance& inst, ArithMode mode = ArithMode::certified,
                       std::uint64_t cap = 1000000);

// a certificate restricts labelings to the fixed points of its map outside
// the excluded pairs. weak soundness: some global optimum survives the
// restriction. strict soundness: every global optimum does (equivalently,
// each eliminated assignment makes the minimum strictly worse). the _dp
// variants check the same statements with the frontier program.
bool weak_certificate_sound(const EnergyInstance& inst, const PersistencyCertificate& cert,
                            std::uint64_t cap = 1000000);
bool strict_certificate_sound(const EnergyInstance& inst, const PersistencyCertificate& cert,
                              std::uint64_t cap = 1000000);
bool weak_certificate_sound_dp(const EnergyInstance& inst, const PersistencyCertificate& cert,
                               std::uint64_t state_cap = std::uint64_t{1} << 22);
bool strict_certificate_sound_dp(const EnergyInstance& inst, const PersistencyCertificate& cert,
                                 std::uint64_t state_cap = std::uint64_t{1} << 22);

}  // namespace partopt

#endif
