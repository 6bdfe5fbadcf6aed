#ifndef PARTOPT_GENERATE_HPP
#define PARTOPT_GENERATE_HPP

// random grid instances for benchmarking: integer costs drawn from fixed
// inclusive ranges (unaries and full pairwise terms from {0..100}, Potts
// attraction strengths from {0..50}), reproducible from the seed alone.
// draw order is part of the contract: unaries first (nodes ascending, labels
// ascending), then edges in creation order — for each cell (r, c) in row-major
// order: east, south, south-east, south-west as present — with pairwise
// entries drawn row by row.

#include <cstdint>
#include <string>

#include "partopt/model.hpp"
#include "partopt/rng.hpp"

namespace partopt {

enum class Family { potts, full };

Family family_from_string(const std::string& name);  // "potts" | "full"
const char* to_string(Family f);

struct GenSpec {
  std::uint64_t seed = 1;
  int rows = 10, cols = 10;
  int labels = 3;
  int connectivity = 4;  // 4 or 8
  Family family = Family::potts;
  // the Potts diagonal is -gamma(i) with one draw per (edge, label); this
  // collapses it to one draw per edge
  bool gamma_per_edge = false;
};

EnergyInstance generate(const GenSpec& spec);

}  // namespace partopt

#endif
