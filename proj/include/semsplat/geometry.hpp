#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace semsplat {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Gaussians closer than this to the camera plane are culled before
// projection (the perspective divide is singular at d = 0).
constexpr double kZNear = 0.01;

// Rigid world-to-camera transform: x_cam = R * x_world + t.
struct Pose {
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
    Vec3 translation = Vec3::Zero();

    static Pose identity() { return Pose{}; }

    Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
    Mat3 rotation_matrix() const { return rotation.toRotationMatrix(); }
    Mat4 matrix() const;

    // Camera center in world coordinates: -R^T t.
    Vec3 center() const { return rotation.conjugate() * (-translation); }

    void renormalize() { rotation.normalize(); }
};

struct Camera {
    double fx = 0, fy = 0, cx = 0, cy = 0;
    int width = 0, height = 0;

    // Single focal length used for radius projection.
    double mean_focal() const { return 0.5 * (fx + fy); }
    bool valid() const {
        return fx > 0 && fy > 0 && cx > 0 && cx < width && cy > 0 && cy < height &&
               width > 0 && height > 0;
    }
};

Pose compose(const Pose& a, const Pose& b);  // applies b first, then a
Pose inverse(const Pose& p);
// Maps camera-i coordinates to camera-j coordinates: T_j * T_i^-1.
Pose relative(const Pose& i, const Pose& j);

// Pose equality helpers for tests and diagnostics.
double rotation_angle(const Pose& a, const Pose& b);   // radians
double translation_distance(const Pose& a, const Pose& b);

Mat3 skew(const Vec3& v);
Eigen::Quaterniond so3_exp(const Vec3& w);
Vec3 so3_log(const Eigen::Quaterniond& q);

// SE(3) exponential/log with tangent layout (rotation, translation).
Pose se3_exp(const Vec6& delta);
Vec6 se3_log(const Pose& p);

// Left-multiplies p by exp(delta): the update rule for pose optimization.
Pose apply_tangent(const Pose& p, const Vec6& delta);

struct CenterProjection {
    Vec2 pix = Vec2::Zero();
    double depth = 0.0;
    bool in_front = false;  // false when depth <= kZNear; caller must cull
};

CenterProjection project_center(const Vec3& mu, const Pose& pose, const Camera& cam);

// r_pix = f*r/depth with f the mean focal length. Throws on depth <= 0.
double project_radius(double r, double depth, const Camera& cam);

// Inverse of project_center. Throws on depth <= 0.
Vec3 backproject(const Vec2& pix, double depth, const Pose& pose, const Camera& cam);

}  // namespace semsplat
