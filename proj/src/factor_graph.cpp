#include "sonarloc/factor_graph.hpp"

#include <stdexcept>
#include <string>

namespace sonarloc {

namespace {

std::string id_str(const char* kind, int id) {
  return std::string(kind) + " " + std::to_string(id);
}

struct SonarLinearization {
  Vec2 r;
  MatX J_landmark;
  MatX J_observer;  // empty when the observer is the anchor
  MatX J_anchor;    // empty when the observer is the anchor
};

SonarLinearization linearize_sonar(const FactorGraph& g, const SonarMeasurement& m) {
  const PolarLandmark& l = g.landmark(m.landmark);
  SonarLinearization out;
  if (m.frame == l.anchor) {
    out.r = Vec2(wrap_angle(l.bearing - m.bearing), l.range - m.range);
    out.J_landmark = reference_jacobian_landmark(g.mode());
    return out;
  }
  const Pose rel = g.pose(l.anchor).between(g.pose(m.frame));
  out.r = residual(m, rel, l);
  out.J_landmark = jacobian_landmark(rel, l);
  out.J_observer = jacobian_pose(rel, l);
  out.J_anchor = jacobian_anchor(rel, l);
  return out;
}

Vec2 sonar_residual(const FactorGraph& g, const SonarMeasurement& m) {
  const PolarLandmark& l = g.landmark(m.landmark);
  if (m.frame == l.anchor) {
    return Vec2(wrap_angle(l.bearing - m.bearing), l.range - m.range);
  }
  return residual(m, g.pose(l.anchor).between(g.pose(m.frame)), l);
}

}  // namespace

void FactorGraph::add_pose(int id, const Pose& value, bool fixed) {
  if (value.mode() != mode_) throw std::invalid_argument("pose mode mismatch");
  if (!poses_.emplace(id, PoseVariable{value, fixed}).second) {
    throw std::invalid_argument("duplicate " + id_str("pose", id));
  }
}

void FactorGraph::add_landmark(int id, const PolarLandmark& value) {
  if (mode_ == Mode::Planar && value.elevation != 0.0) {
    throw std::invalid_argument("planar landmarks must have zero elevation");
  }
  if (!landmarks_.emplace(id, value).second) {
    throw std::invalid_argument("duplicate " + id_str("landmark", id));
  }
}

void FactorGraph::add_sonar(const SonarMeasurement& m) { sonar_.push_back(m); }

void FactorGraph::add_odometry(const OdometryMeasurement& m) {
  odometry_.push_back(m);
}

const Pose& FactorGraph::pose(int id) const {
  auto it = poses_.find(id);
  if (it == poses_.end()) throw std::invalid_argument("unknown " + id_str("pose", id));
  return it->second.value;
}

const PolarLandmark& FactorGraph::landmark(int id) const {
  auto it = landmarks_.find(id);
  if (it == landmarks_.end()) {
    throw std::invalid_argument("unknown " + id_str("landmark", id));
  }
  return it->second;
}

void FactorGraph::set_pose(int id, const Pose& value) {
  auto it = poses_.find(id);
  if (it == poses_.end()) throw std::invalid_argument("unknown " + id_str("pose", id));
  it->second.value = value;
}

void FactorGraph::set_landmark(int id, const PolarLandmark& value) {
  auto it = landmarks_.find(id);
  if (it == landmarks_.end()) {
    throw std::invalid_argument("unknown " + id_str("landmark", id));
  }
  it->second = value;
}

void FactorGraph::validate() const {
  if (sonar_.empty() && odometry_.empty()) {
    throw std::invalid_argument("factor graph has no factors");
  }
  for (const auto& [id, l] : landmarks_) {
    if (!has_pose(l.anchor)) {
      throw std::invalid_argument(id_str("landmark", id) + " anchored at missing " +
                                  id_str("pose", l.anchor));
    }
  }
  for (const auto& m : sonar_) {
    if (!has_pose(m.frame)) {
      throw std::invalid_argument("sonar factor references missing " +
                                  id_str("pose", m.frame));
    }
    if (!has_landmark(m.landmark)) {
      throw std::invalid_argument("sonar factor references missing " +
                                  id_str("landmark", m.landmark));
    }
  }
  const int d = pose_dof(mode_);
  for (const auto& m : odometry_) {
    if (!has_pose(m.from) || !has_pose(m.to)) {
      throw std::invalid_argument("odometry factor references a missing pose");
    }
    if (m.covariance.rows() != d || m.covariance.cols() != d) {
      throw std::invalid_argument("odometry covariance has wrong dimension");
    }
    if (m.relative.mode() != mode_) {
      throw std::invalid_argument("odometry measurement mode mismatch");
    }
  }
}

double FactorGraph::cost() const {
  double c = 0.0;
  for (const auto& m : sonar_) {
    c += (inverse_sqrt(m.covariance) * sonar_residual(*this, m)).squaredNorm();
  }
  for (const auto& m : odometry_) {
    c += (inverse_sqrt(m.covariance) * odometry_residual(m, pose(m.from), pose(m.to)))
             .squaredNorm();
  }
  return c;
}

VecX odometry_residual(const OdometryMeasurement& m, const Pose& from, const Pose& to) {
  const Pose f = from.between(to);
  const Pose& z = m.relative;
  if (f.mode() == Mode::Planar) {
    return Eigen::Vector3d(wrap_angle(f.yaw() - z.yaw()),
                           f.translation().x() - z.translation().x(),
                           f.translation().y() - z.translation().y());
  }
  VecX e(6);
  e << so3_log(z.rotation().transpose() * f.rotation()),
      f.translation() - z.translation();
  return e;
}

MatX odometry_jacobian_from(const OdometryMeasurement& m, const Pose& from,
                            const Pose& to) {
  const Pose f = from.between(to);
  const Vec3& t = f.translation();
  if (f.mode() == Mode::Planar) {
    MatX J(3, 3);
    J << -1.0, 0.0, 0.0, t.y(), -1.0, 0.0, -t.x(), 0.0, -1.0;
    return J;
  }
  const Mat3 Rf = f.rotation();
  const Vec3 e = so3_log(m.relative.rotation().transpose() * Rf);
  MatX J = MatX::Zero(6, 6);
  J.topLeftCorner<3, 3>() = -so3_right_jacobian_inv(e) * Rf.transpose();
  J.bottomLeftCorner<3, 3>() = skew(t);
  J.bottomRightCorner<3, 3>() = -Mat3::Identity();
  return J;
}

MatX odometry_jacobian_to(const OdometryMeasurement& m, const Pose& from,
                          const Pose& to) {
  const Pose f = from.between(to);
  const Mat3 Rf = f.rotation();
  if (f.mode() == Mode::Planar) {
    MatX J = MatX::Zero(3, 3);
    J(0, 0) = 1.0;
    J.bottomRightCorner<2, 2>() = Rf.topLeftCorner<2, 2>();
    return J;
  }
  const Vec3 e = so3_log(m.relative.rotation().transpose() * Rf);
  MatX J = MatX::Zero(6, 6);
  J.topLeftCorner<3, 3>() = so3_right_jacobian_inv(e);
  J.bottomRightCorner<3, 3>() = Rf;
  return J;
}

LinearSystem assemble(const FactorGraph& g, const AssembleOptions& opt) {
  g.validate();
  const Mode mode = g.mode();
  const int pd = pose_dof(mode);
  const int ld = landmark_dof(mode);

  LinearSystem sys;
  int col = 0;
  for (const auto& [id, v] : g.poses()) {
    if (v.fixed) continue;
    sys.columns[{VariableKind::Pose, id}] = {col, pd};
    col += pd;
  }
  for (const auto& [id, l] : g.landmarks()) {
    sys.columns[{VariableKind::Landmark, id}] = {col, ld};
    col += ld;
  }
  if (col == 0) throw std::invalid_argument("factor graph has no free variables");

  sys.sonar_rows = 2 * static_cast<int>(g.sonar_factors().size());
  int rows = sys.sonar_rows;
  if (opt.include_odometry) rows += pd * static_cast<int>(g.odometry_factors().size());
  sys.A = MatX::Zero(rows, col);
  sys.b = VecX::Zero(rows);

  auto place = [&](int row, VariableKind kind, int id, const MatX& W, const MatX& J) {
    auto it = sys.columns.find({kind, id});
    if (it == sys.columns.end()) return;  // fixed pose
    sys.A.block(row, it->second.offset, W.rows(), it->second.size) = W * J;
  };

  int row = 0;
  for (const auto& m : g.sonar_factors()) {
    const SonarLinearization lin = linearize_sonar(g, m);
    const MatX W = opt.whiten ? inverse_sqrt(m.covariance) : MatX(MatX::Identity(2, 2));
    place(row, VariableKind::Landmark, m.landmark, W, lin.J_landmark);
    if (lin.J_observer.size() != 0) {
      const int anchor = g.landmark(m.landmark).anchor;
      place(row, VariableKind::Pose, m.frame, W, lin.J_observer);
      place(row, VariableKind::Pose, anchor, W, lin.J_anchor);
    }
    sys.b.segment<2>(row) = -(W * lin.r);
    row += 2;
  }
  if (opt.include_odometry) {
    for (const auto& m : g.odometry_factors()) {
      const Pose& from = g.pose(m.from);
      const Pose& to = g.pose(m.to);
      const MatX W = opt.whiten ? inverse_sqrt(m.covariance) : MatX(MatX::Identity(pd, pd));
      place(row, VariableKind::Pose, m.from, W, odometry_jacobian_from(m, from, to));
      place(row, VariableKind::Pose, m.to, W, odometry_jacobian_to(m, from, to));
      sys.b.segment(row, pd) = -(W * odometry_residual(m, from, to));
      row += pd;
    }
  }
  if (!sys.A.allFinite() || !sys.b.allFinite()) {
    throw std::runtime_error("assembled system has non-finite entries");
  }
  return sys;
}

FactorGraph retract(const FactorGraph& g, const LinearSystem& layout, const VecX& delta) {
  FactorGraph out = g;
  for (const auto& [key, blk] : layout.columns) {
    const VecX d = delta.segment(blk.offset, blk.size);
    if (key.kind == VariableKind::Pose) {
      out.set_pose(key.id, g.pose(key.id).retract(d));
    } else {
      out.set_landmark(key.id, retract_landmark(g.landmark(key.id), d, g.mode()));
    }
  }
  return out;
}

}  // namespace sonarloc
