#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "shapeflow/path_energy.hpp"

namespace shapeflow {

struct SolverConfig {
  double grad_tol_rel = 1e-6;   // relative to the first gradient of a stage
  double grad_tol_abs = 1e-10;
  int max_newton_iter = 200;
  // trust radii in RMS-nodal-displacement units (level independent)
  double tr_init = 0.05;
  double tr_max = 0.5;
  // Cascadic schedule of (mesh level, K) pairs, non-decreasing in both; time
  // refinement doubles K, space refinement prolongates by one level.
  std::vector<std::pair<int, int>> schedule;
  double reset_threshold = 0.15;  // max nodal displacement triggering re-basing
  int max_resets_per_stage = 8;
  bool delta2_tracks_h = true;  // delta2 = h of the current level
  unsigned seed = 0;            // carried for provenance; the solver is deterministic

  void validate() const;
};

// Coarse-to-fine default: time refinement first at the coarsest level, then
// space refinement at the final K.
std::vector<std::pair<int, int>> default_schedule(int level_min, int level_max,
                                                  int K);

struct HistoryRow {
  int iter = 0;
  int level = 0;
  int K = 0;
  double total = 0.0;
  double sum_pair = 0.0;  // (1/tau)-weighted pair contribution
  double sum_reg = 0.0;
  double penalty0 = 0.0;
  double penaltyK = 0.0;
  double trust_radius = 0.0;
  int step_accepted = 0;
};

void write_history_csv(const std::vector<HistoryRow>& rows,
                       const std::string& path);

struct GeodesicResult {
  DiscretePath path;
  EnergyBreakdown energy;
  std::vector<HistoryRow> history;
};

// Non-convergence diagnostic: carries the last iterate so callers can write
// it out for inspection.
class geodesic_failure : public solver_failure {
public:
  geodesic_failure(const std::string& msg, GeodesicResult last)
      : solver_failure(msg),
        last_iterate(std::make_shared<GeodesicResult>(std::move(last))) {}
  std::shared_ptr<const GeodesicResult> last_iterate;
};

// Discrete geodesic between two masks: minimizes the total path energy over
// all parameterizing deformations with a Newton trust-region method, cascaded
// over the configured (level, K) schedule, re-basing reference shapes when
// deformations grow beyond the reset threshold. Throws solver_failure (with
// the last iterate attached to the message context) if the finest stage does
// not reach the gradient tolerance.
GeodesicResult minimize_path(const ShapeMask& source, const ShapeMask& target,
                             const SolverConfig& cfg, const MaterialParams& p);

// Time refinement: insert midpoints by averaging adjacent deformations
// through the reference matchings and duplicating references.
DiscretePath refine_time(const DiscretePath& path);

// Space refinement: prolongate every component one level up.
DiscretePath prolongate_path(const DiscretePath& path);

// Replace references by the current shapes, fold the deformations into the
// matchings, and reset the deformations to the identity.
DiscretePath rebase_references(const DiscretePath& path);

}  // namespace shapeflow
