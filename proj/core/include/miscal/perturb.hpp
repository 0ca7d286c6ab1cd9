// Fault injection: controlled rotational misalignments for augmentation
// (gaussian draws) and verification (uniform grid assignments).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "miscal/geometry.hpp"
#include "miscal/rng.hpp"

namespace miscal {

enum class PerturbationMode { kGaussian, kGrid, kFixed };

struct PerturbationConfig {
  PerturbationMode mode = PerturbationMode::kGrid;
  double sigma_deg = 0.5;      // gaussian mode
  double clamp_deg = 1.0;      // max magnitude per axis, any mode
  double grid_min_deg = -1.0;  // grid mode
  double grid_max_deg = 1.0;
  double grid_step_deg = 0.1;
  EulerMisalignment fixed;     // fixed mode
  uint64_t seed = 0;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Ground-truth fault assigned to one snippet.
struct InjectedFault {
  uint64_t id = 0;
  EulerMisalignment dr;
};

/// One gaussian training-style draw: each axis ~ N(0, sigma^2) clamped to
/// [-clamp, clamp]. Deterministic given the generator state.
EulerMisalignment sample_training_perturbation(const PerturbationConfig& cfg, Rng& rng);

/// The per-axis grid value set {grid_min, grid_min+step, ..., grid_max}.
std::vector<double> grid_values(const PerturbationConfig& cfg);

/// Assigns one grid fault triple per snippet, uniformly at random over the
/// per-axis value set. Substreams keyed on (seed, snippet id) make the
/// assignment independent of evaluation order.
class GridFaultSampler {
 public:
  explicit GridFaultSampler(const PerturbationConfig& cfg);

  InjectedFault fault_for_snippet(uint64_t snippet_id) const;

 private:
  std::vector<double> values_;
  uint64_t seed_ = 0;
  double clamp_deg_ = 0.0;
};

/// Rotate camera-frame points by the exact fault rotation.
std::vector<Point3> perturb_points(const std::vector<Point3>& points_cam,
                                   const EulerMisalignment& dr);

/// Right-compose the extrinsics with the fault rotation (zero translation):
/// t_perturbed = t * [R(dr) | 0]. correct_transform with the same dr undoes
/// this exactly.
RigidTransform perturb_transform(const RigidTransform& t, const EulerMisalignment& dr);

}  // namespace miscal
