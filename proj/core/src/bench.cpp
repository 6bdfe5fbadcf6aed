#include "partopt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "partopt/oracle.hpp"

namespace partopt {

const std::vector<std::string>& bench_methods() {
  static const std::vector<std::string> m{"a2ou",       "dee1", "dee2", "dee2+l1", "eps-l1",
                                          "l1", "maximprove", "window"};
  return m;
}

PersistencyCertificate run_method(const EnergyInstance& inst, const std::string& method,
                                  const BenchOptions& opt) {
  if (method == "dee1") return dee1(inst, opt.dee);
  if (method == "dee2") return dee2(inst, opt.dee);
  if (method == "dee2+l1") return dee2_then_l1(inst, opt.dee, opt.persist);
  if (method == "l1")
    return solve_l1(inst, relaxation_supports(inst, opt.persist).y, opt.persist).cert;
  if (method == "eps-l1")
    return solve_eps_l1(inst, relaxation_supports(inst, opt.persist).y, opt.eps, opt.persist)
        .cert;
  if (method == "a2ou") return max_strong_all_to_one_unknown(inst, opt.eps, opt.persist).cert;
  if (method == "maximprove")
    return max_improve(inst, relaxation_supports(inst, opt.persist).y, opt.persist);
  if (method == "window") {
    WindowOptions w = opt.window;
    w.persist = opt.persist;
    w.dee = opt.dee;
    const auto windows = grid_windows(opt.base.rows, opt.base.cols, opt.window_rows,
                                      opt.window_cols, opt.window_stride);
    return window_persistency(inst, windows, w).cert;
  }
  throw std::invalid_argument("unknown method '" + method + "'");
}

std::vector<BenchRow> run_bench(const BenchOptions& opt) {
  std::vector<std::string> methods = opt.methods.empty() ? bench_methods() : opt.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  for (const std::string& m : methods)
    if (std::find(bench_methods().begin(), bench_methods().end(), m) == bench_methods().end())
      throw std::invalid_argument("unknown method '" + m + "'");
  if (opt.instances < 0) throw std::invalid_argument("bench: negative instance count");

  std::vector<BenchRow> rows;
  int collected = 0;
  for (std::uint64_t tried = 0; collected < opt.instances; ++tried) {
    if (tried >= opt.max_seed_scan)
      throw std::invalid_argument("bench: seed scan budget exhausted before enough instances "
                                  "passed the gap filter");
    GenSpec g = opt.base;
    g.seed = opt.base.seed + tried;
    const EnergyInstance inst = generate(g);
    const double gap = integrality_gap(inst, dp_min(inst), opt.persist.mode);
    if (opt.gap_min >= 0 && !(gap > opt.gap_min)) continue;
    ++collected;
    for (const std::string& m : methods) {
      const auto t0 = std::chrono::steady_clock::now();
      const PersistencyCertificate cert = run_method(inst, m, opt);
      const auto t1 = std::chrono::steady_clock::now();
      BenchRow row;
      row.seed = g.seed;
      row.family = g.family;
      row.K = g.labels;
      row.conn = g.connectivity;
      row.method = m;
      row.strict = cert.strict;
      row.completeness = cert.completeness;
      row.gap = gap;
      row.wall_ms =
          opt.deterministic ? 0.0 : std::chrono::duration<double, std::milli>(t1 - t0).count();
      row.certified = cert.certified;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "seed,family,K,conn,method,mode,completeness,gap,wall_ms,certified\n";
  char buf[64];
  for (const BenchRow& r : rows) {
    os << r.seed << ',' << to_string(r.family) << ',' << r.K << ',' << r.conn << ',' << r.method
       << ',' << (r.strict ? "strict" : "weak") << ',';
    std::snprintf(buf, sizeof buf, "%.6f", r.completeness);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.6f", r.gap);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    os << buf << ',' << (r.certified ? 1 : 0) << '\n';
  }
}

}  // namespace partopt
