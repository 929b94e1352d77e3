#include "sonarloc/window.hpp"

#include <algorithm>
#include <unordered_map>

namespace sonarloc {

std::vector<int> FrameRecord::feature_ids() const {
  std::vector<int> ids;
  ids.reserve(observations.size());
  for (const auto& o : observations) ids.push_back(o.landmark);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

int coview_count(const FrameRecord& candidate, const FrameRecord& current) {
  const auto a = candidate.feature_ids();
  const auto b = current.feature_ids();
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  return static_cast<int>(common.size());
}

std::vector<int> ElasticWindow::members() const {
  std::vector<int> ids = keyframes;
  if (reference >= 0) ids.push_back(reference);
  if (current >= 0) ids.push_back(current);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

ElasticWindow admit_keyframes(std::span<const FrameRecord> db, const FrameRecord& current,
                              const ElasticWindow& window) {
  ElasticWindow out = window;
  out.current = current.id;
  out.keyframes.clear();

  std::unordered_map<int, const FrameRecord*> by_id;
  for (const auto& r : db) by_id[r.id] = &r;
  auto eligible = [&](const FrameRecord& r) {
    return r.id != current.id && r.id != window.reference &&
           coview_count(r, current) >= window.coview_threshold;
  };

  std::vector<const FrameRecord*> pool;
  for (int id : window.keyframes) {
    auto it = by_id.find(id);
    if (it != by_id.end() && eligible(*it->second)) pool.push_back(it->second);
  }
  double avg = 0.0;
  for (const auto* r : pool) avg += r->sigma_min;
  if (!pool.empty()) avg /= static_cast<double>(pool.size());
  out.sigma_average = avg;

  for (const auto& r : db) {
    const bool carried = std::any_of(pool.begin(), pool.end(),
                                     [&](const FrameRecord* p) { return p->id == r.id; });
    if (!carried && eligible(r) && r.sigma_min >= avg) pool.push_back(&r);
  }
  std::sort(pool.begin(), pool.end(), [](const FrameRecord* a, const FrameRecord* b) {
    if (a->sigma_min != b->sigma_min) return a->sigma_min > b->sigma_min;
    return a->id > b->id;
  });
  const auto keep = static_cast<std::size_t>(std::max(0, window.max_size - 2));
  if (pool.size() > keep) pool.resize(keep);
  for (const auto* r : pool) out.keyframes.push_back(r->id);
  return out;
}

}  // namespace sonarloc
