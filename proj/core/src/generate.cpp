#include "partopt/generate.hpp"

#include <stdexcept>

namespace partopt {

Family family_from_string(const std::string& name) {
  if (name == "potts") return Family::potts;
  if (name == "full") return Family::full;
  throw std::invalid_argument("unknown family '" + name + "' (expected potts or full)");
}

const char* to_string(Family f) {
  return f == Family::potts ? "potts" : "full";
}

namespace {

void check_spec(const GenSpec& g) {
  if (g.rows < 1 || g.cols < 1) throw std::invalid_argument("grid dimensions must be positive");
  if (g.labels < 2) throw std::invalid_argument("need at least two labels per node");
  if (g.connectivity != 4 && g.connectivity != 8)
    throw std::invalid_argument("connectivity must be 4 or 8");
}

}  // namespace

EnergyInstance generate(const GenSpec& g) {
  check_spec(g);
  EnergyInstance inst = EnergyInstance::uniform_labels(g.rows * g.cols, g.labels);

  const auto id = [&](int r, int c) { return r * g.cols + c; };
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c) {
      if (c + 1 < g.cols) inst.add_edge(id(r, c), id(r, c + 1));
      if (r + 1 < g.rows) inst.add_edge(id(r, c), id(r + 1, c));
      if (g.connectivity == 8 && r + 1 < g.rows) {
        if (c + 1 < g.cols) inst.add_edge(id(r, c), id(r + 1, c + 1));
        if (c > 0) inst.add_edge(id(r, c), id(r + 1, c - 1));
      }
    }

  SplitMix64 rng(g.seed);
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < g.labels; ++i)
      inst.set_unary(s, i, static_cast<double>(rng.uniform_int(0, 100)));

  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    switch (g.family) {
      case Family::full:
        for (Label i = 0; i < g.labels; ++i)
          for (Label j = 0; j < g.labels; ++j)
            inst.set_edge_cost(e, i, j, static_cast<double>(rng.uniform_int(0, 100)));
        break;
      case Family::potts: {
        // attractive Potts: -gamma(i) on the diagonal, 0 off it
        double gamma = g.gamma_per_edge ? static_cast<double>(rng.uniform_int(0, 50)) : 0.0;
        for (Label i = 0; i < g.labels; ++i) {
          if (!g.gamma_per_edge) gamma = static_cast<double>(rng.uniform_int(0, 50));
          for (Label j = 0; j < g.labels; ++j)
            inst.set_edge_cost(e, i, j, i == j ? -gamma : 0.0);
        }
        break;
      }
    }
  }
  return inst;
}

}  // namespace partopt
