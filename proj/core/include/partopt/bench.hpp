#ifndef PARTOPT_BENCH_HPP
#define PARTOPT_BENCH_HPP

// seed-sweep benchmark: generate grid instances, keep those whose integrality
// gap clears the filter (integer costs put true gaps well above LP tolerance),
// run the selected persistency methods, and report completeness per run as
// CSV. output is deterministic for a fixed configuration: rows are sorted by
// (seed, method) and the deterministic flag zeroes the wall-clock column so
// reruns are byte-identical.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "partopt/dee.hpp"
#include "partopt/generate.hpp"
#include "partopt/persistency.hpp"
#include "partopt/window.hpp"

namespace partopt {

// the known method tags, in the order bench runs them per seed
const std::vector<std::string>& bench_methods();

struct BenchOptions {
  GenSpec base;                      // seed is the first one scanned
  int instances = 100;               // gap-passing instances to collect
  std::uint64_t max_seed_scan = 100000;  // give up after this many candidates
  std::vector<std::string> methods;  // empty = all of bench_methods()
  double eps = 1e-3;                 // strict charge for eps-l1 / a2ou
  double gap_min = 0.5;              // keep gap > gap_min; negative keeps all
  bool deterministic = false;        // zero the wall_ms column
  PersistencyOptions persist;
  DeeOptions dee;
  WindowOptions window;              // budget / interleave / scans for "window"
  int window_rows = 5, window_cols = 5, window_stride = 5;
};

struct BenchRow {
  std::uint64_t seed = 0;
  Family family = Family::potts;
  int K = 0, conn = 0;
  std::string method;
  bool strict = false;  // mode column
  double completeness = 0.0;
  double gap = 0.0;
  double wall_ms = 0.0;
  bool certified = false;
};

// run one method on one instance; grid shape is needed by "window".
// unknown method names throw std::invalid_argument.
PersistencyCertificate run_method(const EnergyInstance& inst, const std::string& method,
                                  const BenchOptions& opt);

std::vector<BenchRow> run_bench(const BenchOptions& opt);

void write_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace partopt

#endif
