#ifndef PARTOPT_WINDOW_HPP
#define PARTOPT_WINDOW_HPP

// window-decomposed persistency for instances whose full reduced LP is out of
// reach: per-window test problems pick a local test labeling, a local reduced
// LP proposes a map that is identity outside the window, the map is verified
// on the window's star-extended subproblem (window, its boundary neighbors,
// and every edge touching the window, with boundary labels unconstrained),
// and the verified maps fold sequentially into one global map.
//
// the star-extended verification equals global verification for
// identity-outside maps: the improvement objective vanishes on coordinates
// the map fixes, and any local-polytope point of the subgraph extends to the
// full graph by taking product marginals on the missing edges. a one-time
// test asserts this equivalence against full-instance verification.

#include <string>
#include <vector>

#include "partopt/certificate.hpp"
#include "partopt/dee.hpp"
#include "partopt/model.hpp"
#include "partopt/persistency.hpp"

namespace partopt {

struct Window {
  std::vector<NodeId> nodes;  // distinct, ascending
};

// axis-aligned wh x ww rectangles over a rows x cols grid whose node ids are
// row-major (r * cols + c), anchored every stride rows/columns and clamped so
// the last window in each direction touches the border
std::vector<Window> grid_windows(int rows, int cols, int wh, int ww, int stride);

// breadth-first balls of the given radius around every stride-th node id
std::vector<Window> ball_windows(const EnergyInstance& inst, int radius, int stride);

// star-extended subproblem of a window under a per-label alive mask: nodes of
// the window and their neighbors, alive labels only, and every edge with at
// least one endpoint inside. node/edge/label tables translate back.
struct SubProblem {
  EnergyInstance inst;
  std::vector<NodeId> nodes;                 // original node per sub node, ascending
  std::vector<char> in_window;               // per sub node
  std::vector<std::vector<Label>> orig_label;  // per sub node, original label per sub label
  std::vector<EdgeId> orig_edge;             // original edge per sub edge
};

SubProblem star_subproblem(const EnergyInstance& inst, const std::vector<char>& alive,
                           const Window& w);

// the local necessary conditions: solve min <f, (I - Q) mu> over the local
// polytope of the star-extended subproblem, where q is the identity outside
// the window and collapses every window node to its first label. a weakly
// improving map that is identity outside the window permutes each support set
// O_s; the supports' test labeling seeds the windowed reduced LP.
struct WindowTest {
  SubProblem sub;
  RelaxationSupports sup;  // over sub.inst's layout
};

WindowTest window_test_problem(const EnergyInstance& inst, const Window& w,
                               const PersistencyOptions& opt = {});

struct WindowOptions {
  int budget = 10000;           // max variables and rows of a window's reduced LP
  bool dee1_interleave = false; // run a dee1 pass before every window scan
  int max_scans = 100;
  PersistencyOptions persist;
  DeeOptions dee;
};

struct WindowStep {
  int scan = 0;
  int window = -1;           // index into the windows list; -1 for a dee1 pass
  bool rejected = false;
  std::string reason;        // set when rejected
  int eliminated = 0;        // labels newly eliminated by this step (original count)
  double verify_value = 0.0;
  bool certified = false;
};

struct WindowRun {
  PersistencyCertificate cert;   // aggregate weak certificate over the input instance
  std::vector<WindowStep> steps;
  int scans = 0;
  // labels remaining per node after each scan (front: before the first scan)
  std::vector<std::vector<int>> remaining;
};

// scans the windows in index order, folding each verified local map into the
// global one, until a full scan eliminates nothing or max_scans is reached.
// every local map is verified before folding; a verification failure is a
// soundness bug and throws CertificationError. windows whose reduced LP
// exceeds the budget are recorded as rejected and skipped.
WindowRun window_persistency(const EnergyInstance& inst, const std::vector<Window>& windows,
                             const WindowOptions& opt = {});

}  // namespace partopt

#endif
