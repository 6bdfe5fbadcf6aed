#ifndef PARTOPT_CERTIFICATE_HPP
#define PARTOPT_CERTIFICATE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "partopt/lp.hpp"
#include "partopt/mapping.hpp"
#include "partopt/model.hpp"

namespace partopt {

// a mapping p is (relaxed) improving when the minimum of the energy
// difference E(x) - E(p(x)), taken over the whole relaxation, is nonnegative:
// applying p then never makes any labeling worse. with eps > 0 every moved
// label is additionally charged, so a nonnegative minimum forces optima to
// actually move (strict certificates).

struct VerifyOptions {
  ArithMode mode = ArithMode::certified;
  double eps = 0.0;
  double tol = 1e-7;  // acceptance slack for float-only values
  SimplexOptions simplex;
};

struct VerifyReport {
  bool improving = false;
  bool certified = false;  // the decision is backed by exact arithmetic
  double value = 0.0;      // min of the relaxed energy difference
  Reparametrization phi;   // dual certificate at the optimum
  // optimal relaxed labeling; when not improving it exhibits the violation
  std::optional<RelaxedLabeling> witness;
  int iterations = 0;
  bool certified_first_try = false;
};

VerifyReport verify_improving(const EnergyInstance& inst, const PixelwiseMapping& p,
                              const VerifyOptions& opt = {});

// exhaustive counterpart over all labelings, for small instances only
struct BruteForceCheck {
  double worst = 0.0;  // min over x of E(x) - E(p(x)) - eps * (labels moved in x)
  Labeling arg;        // labeling attaining it
  std::uint64_t count = 0;
};

BruteForceCheck verify_improving_bruteforce(const EnergyInstance& inst, const PixelwiseMapping& p,
                                            double eps = 0.0, std::uint64_t cap = 1000000);

// a pairwise assignment ruled out on a stored edge (labels in the edge's
// stored orientation); produced by the pair elimination condition, which does
// not reduce to a pixel-wise map
struct PairExclusion {
  EdgeId e = -1;
  Label i = -1, j = -1;
  friend bool operator==(const PairExclusion&, const PairExclusion&) = default;
};

// result of a persistency method, ready to serialize. eliminated counts the
// (node, label) pairs the map sends elsewhere: a weak certificate promises
// some optimum avoids them, a strict one that every optimum does.
struct PersistencyCertificate {
  std::string method;
  bool strict = false;
  double eps = 0.0;
  Labeling y;
  PixelwiseMapping p;
  std::vector<PairExclusion> excluded_pairs;
  double verify_value = 0.0;
  bool certified = false;
  int eliminated = 0;
  double completeness = 0.0;  // eliminated / sum_s (K_s - 1), in percent
  double wall_ms = 0.0;
};

int eliminable_total(const EnergyInstance& inst);  // sum_s (K_s - 1)
double completeness_percent(const EnergyInstance& inst, int eliminated);

// JSON round trip; reading validates the stored shape against the instance
void write_certificate(std::ostream& os, const PersistencyCertificate& cert);
PersistencyCertificate read_certificate(std::istream& is, const EnergyInstance& inst);
void write_certificate_file(const std::string& path, const PersistencyCertificate& cert);
PersistencyCertificate read_certificate_file(const std::string& path, const EnergyInstance& inst);

}  // namespace partopt

#endif
