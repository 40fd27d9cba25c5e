#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "motkit/errors.hpp"
#include "motkit/filters.hpp"

namespace motkit {

// ============================================================================
// Constant-acceleration multi-object models
// ============================================================================
//
// Each object carries six states ordered [x, vx, ax, y, vy, ay]; M objects
// stack into a 6M state vector. Measurements are image-plane positions
// ordered [x1, y1, x2, y2, ...], length 2M. Transition and measurement
// matrices are block-diagonal / block-row respectively, so objects evolve
// independently; coupling between objects would only enter through
// off-diagonal covariance blocks, which these models never create.

struct MultiObjectLayout {
  int object_count = 1;
  double dt = 1.0;

  int state_dim() const { return 6 * object_count; }
  int measurement_dim() const { return 2 * object_count; }
};

/// Per-object kinematic snapshot used at the tracker boundary.
struct ObjectKinematics {
  double x = 0.0, y = 0.0;
  double vx = 0.0, vy = 0.0;
  double ax = 0.0, ay = 0.0;
};

namespace detail {
inline Eigen::Matrix3d axis_transition(double dt) {
  Eigen::Matrix3d f;
  f << 1.0, dt, 0.5 * dt * dt,
       0.0, 1.0, dt,
       0.0, 0.0, 1.0;
  return f;
}
}  // namespace detail

/// Block-diagonal 6M x 6M transition; each object gets the per-axis chain
/// [1 dt dt^2/2; 0 1 dt; 0 0 1] for x and again for y.
inline Eigen::MatrixXd build_transition(const MultiObjectLayout& layout) {
  if (layout.object_count < 1) {
    throw DimensionMismatchError("layout needs at least one object");
  }
  const int n = layout.state_dim();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
  const Eigen::Matrix3d axis = detail::axis_transition(layout.dt);
  for (int i = 0; i < layout.object_count; ++i) {
    f.block<3, 3>(6 * i, 6 * i) = axis;
    f.block<3, 3>(6 * i + 3, 6 * i + 3) = axis;
  }
  return f;
}

/// 2M x 6M position selector: row 2i picks x of object i, row 2i+1 picks y.
inline Eigen::MatrixXd build_measurement(const MultiObjectLayout& layout) {
  if (layout.object_count < 1) {
    throw DimensionMismatchError("layout needs at least one object");
  }
  Eigen::MatrixXd h =
      Eigen::MatrixXd::Zero(layout.measurement_dim(), layout.state_dim());
  for (int i = 0; i < layout.object_count; ++i) {
    h(2 * i, 6 * i) = 1.0;
    h(2 * i + 1, 6 * i + 3) = 1.0;
  }
  return h;
}

/// Direct kinematic step, component-wise; agrees with build_transition * x to
/// rounding. Kept as the transition callable so the unscented path exercises
/// a genuine function evaluation rather than a matrix product.
inline Eigen::VectorXd propagate(const Eigen::VectorXd& state,
                                 const MultiObjectLayout& layout) {
  if (state.size() != layout.state_dim()) {
    throw DimensionMismatchError(
        "propagate: state length " + std::to_string(state.size()) +
        " does not match layout dimension " +
        std::to_string(layout.state_dim()));
  }
  const double dt = layout.dt;
  Eigen::VectorXd out(state.size());
  for (int i = 0; i < layout.object_count; ++i) {
    for (int axis = 0; axis < 2; ++axis) {
      const int base = 6 * i + 3 * axis;
      const double p = state(base);
      const double v = state(base + 1);
      const double a = state(base + 2);
      out(base) = p + v * dt + 0.5 * a * dt * dt;
      out(base + 1) = v + a * dt;
      out(base + 2) = a;
    }
  }
  return out;
}

/// Block-diagonal white-acceleration process noise: per axis
/// diag(q dt^4 / 4, q dt^2, q) on the (pos, vel, acc) slots.
inline Eigen::MatrixXd build_process_noise(const MultiObjectLayout& layout,
                                           double q) {
  const double dt = layout.dt;
  Eigen::VectorXd diag(layout.state_dim());
  for (int i = 0; i < layout.object_count; ++i) {
    for (int axis = 0; axis < 2; ++axis) {
      const int base = 6 * i + 3 * axis;
      diag(base) = q * dt * dt * dt * dt / 4.0;
      diag(base + 1) = q * dt * dt;
      diag(base + 2) = q;
    }
  }
  return diag.asDiagonal();
}

/// Isotropic pixel measurement noise sigma^2 * I on all 2M components.
inline Eigen::MatrixXd build_measurement_noise(const MultiObjectLayout& layout,
                                               double sigma) {
  return sigma * sigma *
         Eigen::MatrixXd::Identity(layout.measurement_dim(),
                                   layout.measurement_dim());
}

/// Full SystemModel with both the callable and matrix forms attached.
inline SystemModel make_system_model(const MultiObjectLayout& layout) {
  SystemModel m;
  m.transition = build_transition(layout);
  m.measurement = build_measurement(layout);
  m.f = [layout](const Eigen::VectorXd& x) { return propagate(x, layout); };
  m.h = [h = *m.measurement](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(h * x);
  };
  return m;
}

inline Eigen::VectorXd pack_state(const std::vector<ObjectKinematics>& objects) {
  if (objects.empty()) {
    throw DimensionMismatchError("pack_state: no objects");
  }
  Eigen::VectorXd x(6 * static_cast<int>(objects.size()));
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    x.segment<6>(6 * static_cast<int>(i)) << o.x, o.vx, o.ax, o.y, o.vy, o.ay;
  }
  return x;
}

inline std::vector<ObjectKinematics> unpack_state(const Eigen::VectorXd& state) {
  if (state.size() == 0 || state.size() % 6 != 0) {
    throw DimensionMismatchError(
        "unpack_state: length must be a positive multiple of 6, got " +
        std::to_string(state.size()));
  }
  std::vector<ObjectKinematics> objects(state.size() / 6);
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto seg = state.segment<6>(6 * static_cast<int>(i));
    objects[i] = ObjectKinematics{seg(0), seg(3), seg(1), seg(4), seg(2), seg(5)};
  }
  return objects;
}

}  // namespace motkit
