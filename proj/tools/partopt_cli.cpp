// command-line front end: generate instances, solve the relaxation, run
// persistency methods with re-verification, sweep benchmark seeds, and check
// mappings or certificates against an instance.
//
// exit codes: 0 success, 1 usage or malformed input, 2 LP solver failure,
// 3 certification failure (including a failed verify).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "partopt/bench.hpp"
#include "partopt/dee.hpp"
#include "partopt/generate.hpp"
#include "partopt/io.hpp"
#include "partopt/oracle.hpp"
#include "partopt/persistency.hpp"
#include "partopt/window.hpp"

namespace {

using namespace partopt;

// "10x10" -> (10, 10)
std::pair<int, int> parse_shape(const std::string& text, const char* what) {
  const auto sep = text.find_first_of("xX");
  if (sep == std::string::npos || sep == 0 || sep + 1 == text.size())
    throw std::invalid_argument(std::string(what) + " must look like <rows>x<cols>");
  try {
    return {std::stoi(text.substr(0, sep)), std::stoi(text.substr(sep + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + " must look like <rows>x<cols>");
  }
}

ArithMode parse_mode(const std::string& text) {
  if (text == "float") return ArithMode::float_only;
  if (text == "exact") return ArithMode::exact;
  if (text == "certified") return ArithMode::certified;
  throw std::invalid_argument("unknown arithmetic mode '" + text + "'");
}

// shared instance source: an input file, or generation flags
struct InstanceArgs {
  std::string path;
  GenSpec gen;
  std::string grid = "10x10";
  std::string family = "potts";

  void attach(CLI::App* cmd, bool with_input = true) {
    if (with_input)
      cmd->add_option("-i,--instance", path, "instance file; omit to generate from the flags");
    cmd->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
    cmd->add_option("--grid", grid, "grid shape <rows>x<cols>")->capture_default_str();
    cmd->add_option("--labels", gen.labels, "labels per node (K >= 2)")->capture_default_str();
    cmd->add_option("--conn", gen.connectivity, "grid connectivity")
        ->check(CLI::IsMember({4, 8}))
        ->capture_default_str();
    cmd->add_option("--family", family, "cost family")
        ->check(CLI::IsMember({"potts", "full"}))
        ->capture_default_str();
    cmd->add_flag("--gamma-per-edge", gen.gamma_per_edge,
                  "draw one Potts strength per edge instead of per (edge, label)");
  }

  GenSpec spec() const {
    GenSpec g = gen;
    std::tie(g.rows, g.cols) = parse_shape(grid, "--grid");
    g.family = family_from_string(family);
    return g;
  }

  EnergyInstance load() const {
    if (!path.empty()) return read_instance_file(path);
    return generate(spec());
  }
};

Labeling pick_y(const EnergyInstance& inst, const std::string& sel,
                const PersistencyOptions& popt) {
  if (sel == "from-lp") return relaxation_supports(inst, popt).y;
  if (sel.rfind("uniform:", 0) == 0) {
    const Label k = std::stoi(sel.substr(8));
    for (NodeId s = 0; s < inst.num_nodes(); ++s)
      if (k < 0 || k >= inst.num_labels(s))
        throw std::invalid_argument("uniform test label out of range at node " +
                                    std::to_string(s));
    return Labeling(inst.num_nodes(), k);
  }
  if (sel.rfind("file:", 0) == 0) return read_labeling_file(sel.substr(5), inst);
  throw std::invalid_argument("--y must be from-lp, uniform:<k> or file:<path>");
}

void print_certificate_summary(const PersistencyCertificate& cert) {
  std::printf("method=%s mode=%s eliminated=%d completeness=%.6f%% excluded_pairs=%zu "
              "verify_value=%.9g certified=%d\n",
              cert.method.c_str(), cert.strict ? "strict" : "weak", cert.eliminated,
              cert.completeness, cert.excluded_pairs.size(), cert.verify_value,
              cert.certified ? 1 : 0);
}

int cmd_gen(const InstanceArgs& args, const std::string& out) {
  const EnergyInstance inst = generate(args.spec());
  if (out.empty() || out == "-")
    write_instance(std::cout, inst);
  else
    write_instance_file(out, inst);
  return 0;
}

int cmd_solve(const InstanceArgs& args, const std::string& mode, const std::string& dump_lp) {
  const EnergyInstance inst = args.load();
  if (!dump_lp.empty()) {
    const auto lp = build_energy_lp<double>(inst, /*with_names=*/true);
    std::ofstream os(dump_lp);
    if (!os) throw std::invalid_argument("cannot write '" + dump_lp + "'");
    lp.dump(os);
  }
  PersistencyOptions popt;
  popt.mode = parse_mode(mode);
  const RelaxationSupports sup = relaxation_supports(inst, popt);
  int pinned = 0, alive = 0;
  for (NodeId s = 0; s < inst.num_nodes(); ++s) pinned += sup.pinned[s] ? 1 : 0;
  for (char c : sup.alive) alive += c ? 1 : 0;
  std::printf("relaxation optimum %.9g (%s)\n", sup.lp_value,
              sup.certified ? "exact" : "float");
  std::printf("pinned nodes %d/%d, optimal-face support %d/%d labels\n", pinned,
              inst.num_nodes(), alive, inst.total_unary());
  std::ostringstream ys;
  for (NodeId s = 0; s < inst.num_nodes(); ++s) ys << (s ? " " : "") << sup.y[s];
  std::printf("test labeling y: %s\n", ys.str().c_str());
  return 0;
}

struct PersistArgs {
  std::string method = "l1";
  std::string y_sel = "from-lp";
  std::string mode = "certified";
  double eps = 1e-3;
  bool strict_dee = false;
  bool no_pair_feedback = false;
  std::string window_shape = "5x5";
  int stride = 5;
  int budget = 10000;
  int max_scans = 100;
  bool dee1_interleave = false;
  std::string out;
  std::string dump_lp;
};

int cmd_persist(const InstanceArgs& iargs, const PersistArgs& a) {
  const EnergyInstance inst = iargs.load();
  PersistencyOptions popt;
  popt.mode = parse_mode(a.mode);
  DeeOptions dopt;
  dopt.strict = a.strict_dee;
  dopt.pair_feedback = !a.no_pair_feedback;
  dopt.mode = popt.mode;

  if (!a.dump_lp.empty()) {
    const Labeling y = pick_y(inst, a.y_sel, popt);
    const auto lp =
        build_l1_lp<double>(zero_top_normalize(inst, y), y, 0.0, nullptr, /*with_names=*/true);
    std::ofstream os(a.dump_lp);
    if (!os) throw std::invalid_argument("cannot write '" + a.dump_lp + "'");
    lp.dump(os);
  }

  PersistencyCertificate cert;
  if (a.method == "dee1") {
    cert = dee1(inst, dopt);
  } else if (a.method == "dee2") {
    cert = dee2(inst, dopt);
  } else if (a.method == "dee2+l1") {
    cert = dee2_then_l1(inst, dopt, popt);
  } else if (a.method == "l1") {
    cert = solve_l1(inst, pick_y(inst, a.y_sel, popt), popt).cert;
  } else if (a.method == "eps-l1") {
    cert = solve_eps_l1(inst, pick_y(inst, a.y_sel, popt), a.eps, popt).cert;
  } else if (a.method == "a2ou") {
    cert = max_strong_all_to_one_unknown(inst, a.eps, popt).cert;
  } else if (a.method == "maximprove") {
    cert = max_improve(inst, pick_y(inst, a.y_sel, popt), popt);
  } else if (a.method == "window") {
    WindowOptions wopt;
    wopt.budget = a.budget;
    wopt.max_scans = a.max_scans;
    wopt.dee1_interleave = a.dee1_interleave;
    wopt.persist = popt;
    wopt.dee = dopt;
    const auto [wh, ww] = parse_shape(a.window_shape, "--window");
    const auto [rows, cols] = parse_shape(iargs.grid, "--grid");
    std::vector<Window> windows;
    if (iargs.path.empty() && rows * cols == inst.num_nodes())
      windows = grid_windows(rows, cols, wh, ww, a.stride);
    else
      windows = ball_windows(inst, std::max(wh, ww) / 2 + 1, a.stride);
    cert = window_persistency(inst, windows, wopt).cert;
  } else {
    throw std::invalid_argument("unknown method '" + a.method + "'");
  }

  // maps claiming the relaxed-improving property are re-checked against the
  // verification LP before anything is written; sequential certificates
  // (dee2, dee2+l1) are instead audited by their exact-arithmetic replay
  const bool lp_backed = a.method == "dee1" || a.method == "l1" || a.method == "eps-l1" ||
                         a.method == "a2ou" || a.method == "maximprove" || a.method == "window";
  if (lp_backed) {
    VerifyOptions vopt;
    vopt.mode = popt.mode;
    vopt.eps = cert.strict ? cert.eps : 0.0;
    const VerifyReport rep = verify_improving(inst, cert.p, vopt);
    if (!rep.improving)
      throw CertificationError("re-verification rejected the certificate mapping (value " +
                               std::to_string(rep.value) + ")");
    cert.verify_value = rep.value;
    cert.certified = cert.certified && rep.certified;
  } else if (!cert.certified) {
    throw CertificationError("sequential certificate was not replayed exactly; rerun with "
                             "--arith certified");
  }

  print_certificate_summary(cert);
  if (!a.out.empty()) write_certificate_file(a.out, cert);
  return 0;
}

struct BenchArgs {
  int instances = 100;
  std::string methods;
  double eps = 1e-3;
  double gap_min = 0.5;
  bool deterministic = false;
  std::string mode = "certified";
  std::string window_shape = "5x5";
  int stride = 5;
  std::string out;
};

int cmd_bench(const InstanceArgs& iargs, const BenchArgs& a) {
  BenchOptions opt;
  opt.base = iargs.spec();
  opt.instances = a.instances;
  opt.eps = a.eps;
  opt.gap_min = a.gap_min;
  opt.deterministic = a.deterministic;
  opt.persist.mode = parse_mode(a.mode);
  opt.dee.mode = opt.persist.mode;
  std::tie(opt.window_rows, opt.window_cols) = parse_shape(a.window_shape, "--window");
  opt.window_stride = a.stride;
  if (!a.methods.empty()) {
    std::stringstream ss(a.methods);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) opt.methods.push_back(tok);
  }
  const std::vector<BenchRow> rows = run_bench(opt);
  if (a.out.empty() || a.out == "-") {
    write_csv(std::cout, rows);
  } else {
    std::ofstream os(a.out);
    if (!os) throw std::invalid_argument("cannot write '" + a.out + "'");
    write_csv(os, rows);
  }
  return 0;
}

struct VerifyArgs {
  std::string map_path;
  std::string cert_path;
  std::string mode = "certified";
  double eps = 0.0;
  bool brute = false;
  std::uint64_t cap = 1000000;
};

int cmd_verify(const InstanceArgs& iargs, const VerifyArgs& a) {
  const EnergyInstance inst = iargs.load();
  if (a.map_path.empty() == a.cert_path.empty())
    throw std::invalid_argument("verify needs exactly one of --map or --cert");
  PixelwiseMapping p;
  double eps = a.eps;
  if (!a.map_path.empty()) {
    p = read_mapping_file(a.map_path, inst);
  } else {
    const PersistencyCertificate cert = read_certificate_file(a.cert_path, inst);
    p = cert.p;
    if (cert.strict && eps == 0.0) eps = cert.eps;
    if (!cert.excluded_pairs.empty())
      std::printf("note: %zu excluded pairs are not covered by the mapping check\n",
                  cert.excluded_pairs.size());
  }
  VerifyOptions vopt;
  vopt.mode = parse_mode(a.mode);
  vopt.eps = eps;
  const VerifyReport rep = verify_improving(inst, p, vopt);
  std::printf("improving=%d value=%.9g certified=%d moved=%d\n", rep.improving ? 1 : 0,
              rep.value, rep.certified ? 1 : 0, p.moved_count());
  if (a.brute) {
    const BruteForceCheck bc = verify_improving_bruteforce(inst, p, eps, a.cap);
    std::printf("bruteforce worst=%.9g over %llu labelings\n", bc.worst,
                static_cast<unsigned long long>(bc.count));
  }
  if (!rep.improving) {
    if (rep.witness) {
      const RelaxedLabeling& mu = *rep.witness;
      const double before = relaxed_energy(inst, mu);
      const double after = relaxed_energy(inst, push_forward(inst, p, mu));
      std::printf("witness mu: <f, mu> = %.9g but <f, P mu> = %.9g\n", before, after);
    }
    throw CertificationError("mapping is not relaxed-improving");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified partial optimality for pairwise discrete energy minimization"};
  app.require_subcommand(1);

  InstanceArgs gen_args, solve_args, persist_args, bench_args, verify_args;
  std::string gen_out, solve_mode = "certified", solve_dump;
  PersistArgs pa;
  BenchArgs ba;
  VerifyArgs va;

  CLI::App* gen = app.add_subcommand("gen", "generate a random grid instance");
  gen_args.attach(gen, /*with_input=*/false);
  gen->add_option("-o,--out", gen_out, "output path; '-' for stdout");

  CLI::App* solve = app.add_subcommand("solve", "solve the linear relaxation");
  solve_args.attach(solve);
  solve->add_option("--arith", solve_mode, "float | exact | certified")
      ->capture_default_str();
  solve->add_option("--dump-lp", solve_dump, "write the relaxation LP in text form");

  CLI::App* persist = app.add_subcommand("persist", "run a persistency method and certify");
  persist_args.attach(persist);
  persist->add_option("--method", pa.method,
                      "dee1 | dee2 | l1 | eps-l1 | a2ou | maximprove | window | dee2+l1")
      ->capture_default_str();
  persist->add_option("--y", pa.y_sel, "test labeling: from-lp | uniform:<k> | file:<path>")
      ->capture_default_str();
  persist->add_option("--arith", pa.mode, "float | exact | certified")->capture_default_str();
  persist->add_option("--eps", pa.eps, "strict charge for eps-l1 / a2ou")
      ->capture_default_str();
  persist->add_flag("--strict-dee", pa.strict_dee, "strict tie rule for dee1/dee2");
  persist->add_flag("--no-pair-feedback", pa.no_pair_feedback,
                    "do not shrink dee2 ranges by excluded pairs");
  persist->add_option("--window", pa.window_shape, "window shape <rows>x<cols>")
      ->capture_default_str();
  persist->add_option("--stride", pa.stride, "window stride")->capture_default_str();
  persist->add_option("--budget", pa.budget, "max LP size a window may pose")
      ->capture_default_str();
  persist->add_option("--max-scans", pa.max_scans, "window sweep limit")->capture_default_str();
  persist->add_flag("--dee1-interleave", pa.dee1_interleave,
                    "run a dee1 pass before every window scan");
  persist->add_option("-o,--out", pa.out, "certificate JSON output path");
  persist->add_option("--dump-lp", pa.dump_lp, "write the reduced certificate LP (for --y)");

  CLI::App* bench = app.add_subcommand("bench", "seed sweep with the gap filter, CSV out");
  bench_args.attach(bench, /*with_input=*/false);  // bench always generates
  bench->add_option("--instances", ba.instances, "gap-passing instances to collect")
      ->capture_default_str();
  bench->add_option("--methods", ba.methods, "comma-separated method list (default: all)");
  bench->add_option("--eps", ba.eps, "strict charge for eps-l1 / a2ou")->capture_default_str();
  bench->add_option("--gap-min", ba.gap_min, "keep instances with gap strictly above this; "
                                             "negative keeps all")
      ->capture_default_str();
  bench->add_flag("--deterministic", ba.deterministic, "zero the wall_ms column");
  bench->add_option("--arith", ba.mode, "float | exact | certified")->capture_default_str();
  bench->add_option("--window", ba.window_shape, "window shape for method=window")
      ->capture_default_str();
  bench->add_option("--stride", ba.stride, "window stride")->capture_default_str();
  bench->add_option("-o,--out", ba.out, "CSV path; '-' for stdout");

  CLI::App* verify = app.add_subcommand("verify", "check a mapping or certificate");
  verify_args.attach(verify);
  verify->add_option("--map", va.map_path, "mapping file to check");
  verify->add_option("--cert", va.cert_path, "certificate JSON to check");
  verify->add_option("--arith", va.mode, "float | exact | certified")->capture_default_str();
  verify->add_option("--eps", va.eps, "strict charge (defaults to the certificate's)")
      ->capture_default_str();
  verify->add_flag("--brute", va.brute, "also run the exhaustive check");
  verify->add_option("--cap", va.cap, "enumeration cap for --brute")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_gen(gen_args, gen_out);
    if (solve->parsed()) return cmd_solve(solve_args, solve_mode, solve_dump);
    if (persist->parsed()) return cmd_persist(persist_args, pa);
    if (bench->parsed()) return cmd_bench(bench_args, ba);
    if (verify->parsed()) return cmd_verify(verify_args, va);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const partopt::CertificationError& e) {
    std::fprintf(stderr, "certification failure: %s\n", e.what());
    return 3;
  } catch (const partopt::SolverError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
