// Sonar keyframe records and elastic window admission.
#pragma once

#include <span>
#include <vector>

#include "sonarloc/degeneracy.hpp"

namespace sonarloc {

/// One associated sonar detection. `landmark` is the front-end's id and
/// may be wrong.
struct Observation {
  int landmark = -1;
  double bearing = 0.0;
  double range = 0.0;
};

struct FrameRecord {
  int id = -1;
  double timestamp = 0.0;
  /// May hold several detections carrying the same id after a bad
  /// association; feature_ids() is the unique set.
  std::vector<Observation> observations;
  double sigma_min = 0.0;
  int feature_count = 0;
  FrameClass classification = FrameClass::Normal;
  Pose pose;

  /// Sorted unique landmark ids.
  std::vector<int> feature_ids() const;
};

/// Size of the intersection of the two frames' feature id sets.
int coview_count(const FrameRecord& candidate, const FrameRecord& current);

/// The reference/current pair plus the admitted sonar keyframes, ranked by
/// σ_min.
struct ElasticWindow {
  int reference = -1;
  int current = -1;
  std::vector<int> keyframes;
  int max_size = 5;
  int coview_threshold = 4;
  /// σ_aver used by the last admission.
  double sigma_average = 0.0;

  int size() const { return static_cast<int>(keyframes.size()) + 2; }
  /// Sorted ids of every frame in the window.
  std::vector<int> members() const;
};

/// Keeps carried keyframes that still co-view the current frame, then
/// admits database keyframes with coview >= N_th and σ_min >= σ_aver (the
/// mean over the carried members, 0 if none). The pool is ranked by
/// σ_min, newer first on ties, and cut to max_size - 2.
ElasticWindow admit_keyframes(std::span<const FrameRecord> db,
                              const FrameRecord& current,
                              const ElasticWindow& window);

}  // namespace sonarloc
