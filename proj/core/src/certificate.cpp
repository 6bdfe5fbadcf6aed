#include "partopt/certificate.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "partopt/lambda_lp.hpp"
#include "partopt/rational.hpp"

namespace partopt {

VerifyReport verify_improving(const EnergyInstance& inst, const PixelwiseMapping& p,
                              const VerifyOptions& opt) {
  const auto fobj = improvement_objective<double>(inst, p, opt.eps);
  const auto flp = build_lambda_lp(inst, fobj);
  LinearProgram<mpq_class> qlp;
  if (opt.mode != ArithMode::float_only) {
    const auto qobj = improvement_objective<mpq_class>(inst, p, opt.eps);
    qlp = build_lambda_lp(inst, qobj);
  }
  const ModeSolution ms = solve_with_mode(
      flp, opt.mode == ArithMode::float_only ? nullptr : &qlp, opt.mode, opt.simplex);

  VerifyReport rep;
  rep.certified_first_try = ms.certified_first_try;
  const MuIndex ix(inst);
  if (ms.exact) {
    if (ms.exact->status != LpStatus::optimal)
      throw SolverError("verify_improving: exact verification LP did not reach optimality");
    rep.certified = true;
    rep.value = num::to_double(ms.exact->value);
    rep.improving = num::sign(ms.exact->value) >= 0;
    rep.phi = phi_from_duals(inst, ix, ms.exact->row_dual);
    rep.iterations = ms.approx.iterations + ms.exact->iterations;
    if (!rep.improving) rep.witness = mu_from_solution(inst, ix, ms.exact->x);
  } else {
    if (ms.approx.status != LpStatus::optimal)
      throw SolverError("verify_improving: verification LP did not reach optimality");
    rep.value = ms.approx.value;
    rep.improving = rep.value >= -opt.tol;
    rep.phi = phi_from_duals(inst, ix, ms.approx.row_dual);
    rep.iterations = ms.approx.iterations;
    if (!rep.improving) rep.witness = mu_from_solution(inst, ix, ms.approx.x);
  }
  return rep;
}

BruteForceCheck verify_improving_bruteforce(const EnergyInstance& inst, const PixelwiseMapping& p,
                                            double eps, std::uint64_t cap) {
  if (!p.same_shape(inst))
    throw std::invalid_argument("verify_improving_bruteforce: mapping shape mismatch");
  std::uint64_t total = 1;
  for (NodeId s = 0; s < inst.num_nodes(); ++s) {
    total *= static_cast<std::uint64_t>(inst.num_labels(s));
    if (total > cap)
      throw std::invalid_argument(
          "verify_improving_bruteforce: label space exceeds the enumeration cap");
  }
  BruteForceCheck out;
  Labeling x(inst.num_nodes(), 0);
  Labeling px(inst.num_nodes());
  bool first = true;
  for (;;) {
    int moved = 0;
    for (NodeId s = 0; s < inst.num_nodes(); ++s) {
      px[s] = p(s, x[s]);
      if (px[s] != x[s]) ++moved;
    }
    const double d = energy(inst, x) - energy(inst, px) - eps * moved;
    if (first || d < out.worst) {
      out.worst = d;
      out.arg = x;
      first = false;
    }
    ++out.count;
    int s = 0;
    while (s < inst.num_nodes()) {
      if (++x[s] < inst.num_labels(s)) break;
      x[s] = 0;
      ++s;
    }
    if (s == inst.num_nodes()) break;
  }
  return out;
}

int eliminable_total(const EnergyInstance& inst) {
  int total = 0;
  for (NodeId s = 0; s < inst.num_nodes(); ++s) total += inst.num_labels(s) - 1;
  return total;
}

double completeness_percent(const EnergyInstance& inst, int eliminated) {
  const int total = eliminable_total(inst);
  if (total == 0) return 100.0;  // single-label nodes only: nothing left to decide
  return 100.0 * static_cast<double>(eliminated) / static_cast<double>(total);
}

void write_certificate(std::ostream& os, const PersistencyCertificate& cert) {
  nlohmann::json j;
  j["method"] = cert.method;
  j["strict"] = cert.strict;
  j["eps"] = cert.eps;
  j["y"] = cert.y;
  std::vector<int> labels(cert.p.num_nodes());
  for (int s = 0; s < cert.p.num_nodes(); ++s) labels[s] = cert.p.num_labels(s);
  j["labels_per_node"] = labels;
  auto entries = nlohmann::json::array();
  for (int s = 0; s < cert.p.num_nodes(); ++s)
    for (Label i = 0; i < cert.p.num_labels(s); ++i)
      if (cert.p(s, i) != i) entries.push_back({s, i, cert.p(s, i)});
  j["map"] = entries;
  auto pairs = nlohmann::json::array();
  for (const auto& px : cert.excluded_pairs) pairs.push_back({px.e, px.i, px.j});
  j["excluded_pairs"] = pairs;
  j["verify_value"] = cert.verify_value;
  j["certified"] = cert.certified;
  j["eliminated"] = cert.eliminated;
  j["completeness"] = cert.completeness;
  j["wall_ms"] = cert.wall_ms;
  os << j.dump(2) << '\n';
}

PersistencyCertificate read_certificate(std::istream& is, const EnergyInstance& inst) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("certificate: invalid JSON: ") + e.what());
  }
  PersistencyCertificate cert;
  try {
    cert.method = j.at("method").get<std::string>();
    cert.strict = j.value("strict", false);
    cert.eps = j.at("eps").get<double>();
    cert.y = j.at("y").get<Labeling>();
    const auto labels = j.at("labels_per_node").get<std::vector<int>>();
    if (static_cast<int>(labels.size()) != inst.num_nodes())
      throw std::invalid_argument("certificate: node count does not match the instance");
    for (NodeId s = 0; s < inst.num_nodes(); ++s)
      if (labels[s] != inst.num_labels(s))
        throw std::invalid_argument("certificate: label counts do not match the instance");
    cert.p = PixelwiseMapping::identity(inst);
    for (const auto& ent : j.at("map")) {
      if (!ent.is_array() || ent.size() != 3)
        throw std::invalid_argument("certificate: malformed map entry");
      cert.p.set(ent[0].get<int>(), ent[1].get<int>(), ent[2].get<int>());
    }
    for (const auto& px : j.value("excluded_pairs", nlohmann::json::array())) {
      if (!px.is_array() || px.size() != 3)
        throw std::invalid_argument("certificate: malformed excluded pair");
      PairExclusion ent{px[0].get<int>(), px[1].get<int>(), px[2].get<int>()};
      if (ent.e < 0 || ent.e >= inst.num_edges())
        throw std::invalid_argument("certificate: excluded pair names a missing edge");
      const Edge& ed = inst.edge(ent.e);
      if (ent.i < 0 || ent.i >= inst.num_labels(ed.s) || ent.j < 0 ||
          ent.j >= inst.num_labels(ed.t))
        throw std::invalid_argument("certificate: excluded pair labels out of range");
      cert.excluded_pairs.push_back(ent);
    }
    cert.verify_value = j.at("verify_value").get<double>();
    cert.certified = j.at("certified").get<bool>();
    cert.eliminated = j.at("eliminated").get<int>();
    cert.completeness = j.at("completeness").get<double>();
    cert.wall_ms = j.value("wall_ms", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("certificate: missing or mistyped field: ") +
                                e.what());
  }
  inst.require_labeling(cert.y);
  return cert;
}

void write_certificate_file(const std::string& path, const PersistencyCertificate& cert) {
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot open certificate file for writing: " + path);
  write_certificate(os, cert);
}

PersistencyCertificate read_certificate_file(const std::string& path,
                                             const EnergyInstance& inst) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open certificate file: " + path);
  return read_certificate(is, inst);
}

}  // namespace partopt
