#include "partopt/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace partopt {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& tok, int lineno) {
  double v;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw std::invalid_argument("line " + std::to_string(lineno) + ": bad number '" + tok +
                                "'");
  return v;
}

long parse_int(const std::string& tok, int lineno) {
  long v;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw std::invalid_argument("line " + std::to_string(lineno) + ": bad integer '" + tok +
                                "'");
  return v;
}

}  // namespace

EnergyInstance read_instance(std::istream& in) {
  std::string line;
  int lineno = 0;
  int n = -1;
  std::vector<int> labels;
  bool have_all_labels = false;
  EnergyInstance inst;
  bool built = false;
  double f0 = 0.0;

  auto ensure_built = [&](int ln) -> EnergyInstance& {
    if (!built) {
      if (n < 0) throw std::invalid_argument("line " + std::to_string(ln) + ": 'nodes' must come first");
      for (int s = 0; s < n; ++s)
        if (labels[s] <= 0)
          throw std::invalid_argument("node " + std::to_string(s) + " missing 'labels' line");
      inst = EnergyInstance(labels);
      have_all_labels = true;
      built = true;
    }
    return inst;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    auto want = [&](std::size_t k) {
      if (toks.size() != k)
        throw std::invalid_argument("line " + std::to_string(lineno) + ": '" + kw +
                                    "' expects " + std::to_string(k) + " fields");
    };
    if (kw == "nodes") {
      want(1);
      if (n >= 0) throw std::invalid_argument("duplicate 'nodes' line");
      n = static_cast<int>(parse_int(toks[0], lineno));
      if (n <= 0) throw std::invalid_argument("instance must have at least one node");
      labels.assign(n, 0);
    } else if (kw == "labels") {
      want(2);
      if (built) throw std::invalid_argument("'labels' after cost lines");
      int s = static_cast<int>(parse_int(toks[0], lineno));
      if (n < 0 || s < 0 || s >= n)
        throw std::invalid_argument("line " + std::to_string(lineno) + ": node out of range");
      labels[s] = static_cast<int>(parse_int(toks[1], lineno));
    } else if (kw == "f0") {
      want(1);
      f0 = parse_double(toks[0], lineno);
      ensure_built(lineno).set_f0(f0);
    } else if (kw == "unary") {
      want(3);
      auto& e = ensure_built(lineno);
      e.set_unary(static_cast<int>(parse_int(toks[0], lineno)),
                  static_cast<int>(parse_int(toks[1], lineno)), parse_double(toks[2], lineno));
    } else if (kw == "edge") {
      want(2);
      auto& e = ensure_built(lineno);
      e.add_edge(static_cast<int>(parse_int(toks[0], lineno)),
                 static_cast<int>(parse_int(toks[1], lineno)));
    } else if (kw == "pair") {
      want(5);
      auto& e = ensure_built(lineno);
      int s = static_cast<int>(parse_int(toks[0], lineno));
      int t = static_cast<int>(parse_int(toks[1], lineno));
      if (e.find_edge(s, t) == -1)
        throw std::invalid_argument("line " + std::to_string(lineno) +
                                    ": 'pair' before matching 'edge'");
      e.set_pair(s, t, static_cast<int>(parse_int(toks[2], lineno)),
                 static_cast<int>(parse_int(toks[3], lineno)), parse_double(toks[4], lineno));
    } else {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown keyword '" +
                                  kw + "'");
    }
  }
  if (n < 0) throw std::invalid_argument("empty instance file");
  ensure_built(lineno);
  (void)have_all_labels;
  return inst;
}

EnergyInstance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  return read_instance(in);
}

void write_instance(std::ostream& out, const EnergyInstance& inst) {
  out << "nodes " << inst.num_nodes() << "\n";
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    out << "labels " << s << " " << inst.num_labels(s) << "\n";
  if (inst.f0() != 0.0) out << "f0 " << format_double(inst.f0()) << "\n";
  for (NodeId s = 0; s < inst.num_nodes(); ++s)
    for (Label i = 0; i < inst.num_labels(s); ++i)
      if (inst.unary(s, i) != 0.0)
        out << "unary " << s << " " << i << " " << format_double(inst.unary(s, i)) << "\n";
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    out << "edge " << ed.s << " " << ed.t << "\n";
    for (Label i = 0; i < inst.num_labels(ed.s); ++i)
      for (Label j = 0; j < inst.num_labels(ed.t); ++j)
        if (inst.edge_cost(e, i, j) != 0.0)
          out << "pair " << ed.s << " " << ed.t << " " << i << " " << j << " "
              << format_double(inst.edge_cost(e, i, j)) << "\n";
  }
}

void write_instance_file(const std::string& path, const EnergyInstance& inst) {
  std::ofstream out(path, std::ios::binary);  // no platform newline translation
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  write_instance(out, inst);
}

}  // namespace partopt
