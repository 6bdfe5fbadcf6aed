#include "partopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>

#include "partopt/lambda_lp.hpp"

namespace partopt {

namespace {

std::uint64_t checked_state_count(const EnergyInstance& inst, std::uint64_t cap,
                                  const char* who) {
  std::uint64_t states = 1;
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    states *= static_cast<std::uint64_t>(inst.num_labels(s));
    if (states > cap)
      throw std::invalid_argument(std::string(who) + ": state count exceeds the cap");
  }
  return states;
}

// advance x as a mixed-radix odometer with the last node least significant;
// false once the sweep wrapped around
bool advance(const EnergyInstance& inst, Labeling& x) {
  for (int d = inst.num_nodes() - 1; d >= 0; --d) {
    if (++x[d] < inst.num_labels(d)) return true;
    x[d] = 0;
  }
  return false;
}

// does x respect everything the certificate rules out?
bool respects(const EnergyInstance& inst, const PersistencyCertificate& cert,
              const Labeling& x) {
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    if (cert.p(s, x[s]) != x[s]) return false;
  for (const PairExclusion& pe : cert.excluded_pairs) {
    const Edge& ed = inst.edge(pe.e);
    if (x[ed.s] == pe.i && x[ed.t] == pe.j) return false;
  }
  return true;
}

// single sweep tracking the optimum value together with whether some / every
// optimum respects the certificate
struct OptimaScan {
  double best = std::numeric_limits<double>::infinity();
  bool some_respects = false;
  bool all_respect = true;
};

OptimaScan scan_optima(const EnergyInstance& inst, const PersistencyCertificate& cert,
                       std::uint64_t cap) {
  checked_state_count(inst, cap, "certificate soundness check");
  OptimaScan out;
  Labeling x(inst.num_nodes(), 0);
  do {
    const double v = energy(inst, x);
    if (v > out.best) continue;
    const bool ok = respects(inst, cert, x);
    if (v < out.best) {
      out.best = v;
      out.some_respects = ok;
      out.all_respect = ok;
    } else {
      out.some_respects = out.some_respects || ok;
      out.all_respect = out.all_respect && ok;
    }
  } while (advance(inst, x));
  return out;
}

DpRestriction fixed_point_restriction(const EnergyInstance& inst,
                                      const PersistencyCertificate& cert) {
  DpRestriction r;
  r.alive.assign(inst.total_unary(), 0);
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i)
      if (cert.p(s, i) == i) r.alive[inst.unary_offset(s) + i] = 1;
  r.excluded = cert.excluded_pairs;
  return r;
}

// strictly-worse margin for "this assignment appears in no optimum": exact
// for integer costs (the next energy level is >= 1 away)
constexpr double kStrictSlack = 1e-6;

}  // namespace

BruteForceResult brute_force_minimize(const EnergyInstance& inst, std::uint64_t cap) {
  checked_state_count(inst, cap, "brute_force_minimize");
  BruteForceResult out;
  Labeling x(inst.num_nodes(), 0);
  out.value = energy(inst, x);
  out.argmins.push_back(x);
  while (advance(inst, x)) {
    const double v = energy(inst, x);
    if (v < out.value) {
      out.value = v;
      out.argmins.clear();
      out.argmins.push_back(x);
    } else if (v == out.value) {
      out.argmins.push_back(x);
    }
  }
  return out;
}

double dp_min(const EnergyInstance& inst, const DpRestriction& r, std::uint64_t state_cap) {
  const int n = inst.num_nodes();
  if (n == 0) return inst.f0();

  std::vector<char> ok(static_cast<size_t>(inst.total_unary()), 1);
  if (!r.alive.empty()) {
    if (static_cast<int>(r.alive.size()) != inst.total_unary())
      throw std::invalid_argument("dp_min: alive mask has the wrong size");
    ok = r.alive;
  }
  for (const auto& [s, i] : r.forced) {
    if (s < 0 || s >= n || i < 0 || i >= inst.num_labels(s))
      throw std::invalid_argument("dp_min: forced assignment out of range");
    for (Label l = 0; l < inst.num_labels(s); ++l)
      if (l != i) ok[inst.unary_offset(s) + l] = 0;
  }
  std::vector<char> excl(static_cast<size_t>(inst.total_pairwise()), 0);
  for (const PairExclusion& pe : r.excluded) {
    if (pe.e < 0 || pe.e >= inst.num_edges())
      throw std::invalid_argument("dp_min: excluded pair on an unknown edge");
    const Edge& ed = inst.edge(pe.e);
    if (pe.i < 0 || pe.i >= inst.num_labels(ed.s) || pe.j < 0 || pe.j >= inst.num_labels(ed.t))
      throw std::invalid_argument("dp_min: excluded pair labels out of range");
    excl[inst.pair_offset(pe.e) + pe.i * inst.num_labels(ed.t) + pe.j] = 1;
  }

  // frontier width: every edge's earlier endpoint must still be in the window
  int width = 1;
  for (const Edge& ed : inst.edges()) width = std::max(width, std::abs(ed.s - ed.t));

  struct Incoming {
    EdgeId e;
    NodeId t;             // earlier endpoint
    bool stored_src_is_t;
  };
  std::vector<std::vector<Incoming>> incoming(static_cast<size_t>(n));
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    const NodeId lo = std::min(ed.s, ed.t), hi = std::max(ed.s, ed.t);
    incoming[hi].push_back({e, lo, ed.s == lo});
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp{0.0};    // over window states, oldest node most significant
  std::vector<NodeId> win;        // window node ids, oldest first
  std::vector<int> digits, pos;
  for (NodeId s = 0; s < n; ++s) {
    const int Ks = inst.num_labels(s);
    const bool drop = static_cast<int>(win.size()) == width;
    std::vector<NodeId> nwin(win.begin() + (drop ? 1 : 0), win.end());
    nwin.push_back(s);
    std::uint64_t new_states = 1;
    for (NodeId u : nwin) {
      new_states *= static_cast<std::uint64_t>(inst.num_labels(u));
      if (new_states > state_cap)
        throw std::invalid_argument("dp_min: frontier state count exceeds the cap");
    }

    pos.assign(incoming[s].size(), -1);
    for (size_t q = 0; q < incoming[s].size(); ++q) {
      for (size_t w = 0; w < win.size(); ++w)
        if (win[w] == incoming[s][q].t) {
          pos[q] = static_cast<int>(w);
          break;
        }
      if (pos[q] < 0) throw std::logic_error("dp_min: frontier lost an edge endpoint");
    }

    std::vector<double> ndp(new_states, inf);
    const std::uint64_t old_states = dp.size();
    const std::uint64_t drop_stride =
        drop ? old_states / static_cast<std::uint64_t>(inst.num_labels(win.front())) : 0;
    digits.assign(win.size(), 0);
    for (std::uint64_t st = 0; st < old_states; ++st) {
      const double base = dp[st];
      if (base < inf) {
        const std::uint64_t rebased =
            (drop ? st % drop_stride : st) * static_cast<std::uint64_t>(Ks);
        for (Label k = 0; k < Ks; ++k) {
          if (!ok[inst.unary_offset(s) + k]) continue;
          double v = base + inst.unary(s, k);
          bool blocked = false;
          for (size_t q = 0; q < incoming[s].size(); ++q) {
            const Incoming& in = incoming[s][q];
            const Label lt = digits[pos[q]];
            const int slot =
                in.stored_src_is_t
                    ? inst.pair_offset(in.e) + lt * Ks + k
                    : inst.pair_offset(in.e) + k * inst.num_labels(in.t) + lt;
            if (excl[slot]) {
              blocked = true;
              break;
            }
            v += in.stored_src_is_t ? inst.edge_cost(in.e, lt, k) : inst.edge_cost(in.e, k, lt);
          }
          if (!blocked && v < ndp[rebased + k]) ndp[rebased + k] = v;
        }
      }
      for (int d = static_cast<int>(win.size()) - 1; d >= 0; --d) {
        if (++digits[d] < inst.num_labels(win[d])) break;
        digits[d] = 0;
      }
    }
    dp = std::move(ndp);
    win = std::move(nwin);
  }

  double best = inf;
  for (double v : dp) best = std::min(best, v);
  return best == inf ? inf : best + inst.f0();
}

double relaxation_min(const EnergyInstance& inst, ArithMode mode) {
  const LinearProgram<double> flp = build_energy_lp<double>(inst);
  std::optional<LinearProgram<mpq_class>> qlp;
  if (mode != ArithMode::float_only) qlp = build_energy_lp<mpq_class>(inst);
  const ModeSolution ms = solve_with_mode(flp, qlp ? &*qlp : nullptr, mode);
  const LpStatus st = ms.exact ? ms.exact->status : ms.approx.status;
  if (st != LpStatus::optimal) throw SolverError("relaxation_min: relaxation LP did not solve");
  return ms.exact ? num::to_double(ms.exact->value) : ms.approx.value;
}

double integrality_gap(const EnergyInstance& inst, double brute_min, ArithMode mode) {
  return brute_min - relaxation_min(inst, mode);
}

double integrality_gap(const EnergyInstance& inst, ArithMode mode, std::uint64_t cap) {
  return integrality_gap(inst, brute_force_minimize(inst, cap).value, mode);
}

bool weak_certificate_sound(const EnergyInstance& inst, const PersistencyCertificate& cert,
                            std::uint64_t cap) {
  return scan_optima(inst, cert, cap).some_respects;
}

bool strict_certificate_sound(const EnergyInstance& inst, const PersistencyCertificate& cert,
                              std::uint64_t cap) {
  return scan_optima(inst, cert, cap).all_respect;
}

bool weak_certificate_sound_dp(const EnergyInstance& inst, const PersistencyCertificate& cert,
                               std::uint64_t state_cap) {
  const double global = dp_min(inst, {}, state_cap);
  const double restricted = dp_min(inst, fixed_point_restriction(inst, cert), state_cap);
  return restricted <= global + kStrictSlack;
}

bool strict_certificate_sound_dp(const EnergyInstance& inst, const PersistencyCertificate& cert,
                                 std::uint64_t state_cap) {
  const double global = dp_min(inst, {}, state_cap);
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i) {
      if (cert.p(s, i) == i) continue;
      DpRestriction r;
      r.forced.emplace_back(s, i);
      if (dp_min(inst, r, state_cap) <= global + kStrictSlack) return false;
    }
  for (const PairExclusion& pe : cert.excluded_pairs) {
    const Edge& ed = inst.edge(pe.e);
    DpRestriction r;
    r.forced.emplace_back(ed.s, pe.i);
    r.forced.emplace_back(ed.t, pe.j);
    if (dp_min(inst, r, state_cap) <= global + kStrictSlack) return false;
  }
  return true;
}

}  // namespace partopt
