#include "semsplat/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace semsplat {

Mat4 Pose::matrix() const {
    Mat4 T = Mat4::Identity();
    T.block<3, 3>(0, 0) = rotation_matrix();
    T.block<3, 1>(0, 3) = translation;
    return T;
}

Pose compose(const Pose& a, const Pose& b) {
    Pose out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    out.renormalize();
    return out;
}

Pose inverse(const Pose& p) {
    Pose out;
    out.rotation = p.rotation.conjugate();
    out.translation = -(out.rotation * p.translation);
    return out;
}

Pose relative(const Pose& i, const Pose& j) { return compose(j, inverse(i)); }

double rotation_angle(const Pose& a, const Pose& b) {
    const Eigen::Quaterniond d = a.rotation.conjugate() * b.rotation;
    const double w = std::min(1.0, std::abs(d.w()));
    return 2.0 * std::acos(w);
}

double translation_distance(const Pose& a, const Pose& b) {
    return (a.translation - b.translation).norm();
}

Mat3 skew(const Vec3& v) {
    Mat3 s;
    s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return s;
}

Eigen::Quaterniond so3_exp(const Vec3& w) {
    const double theta = w.norm();
    if (theta < 1e-12) {
        Eigen::Quaterniond q(1.0, 0.5 * w.x(), 0.5 * w.y(), 0.5 * w.z());
        q.normalize();
        return q;
    }
    const double half = 0.5 * theta;
    const double s = std::sin(half) / theta;
    return Eigen::Quaterniond(std::cos(half), s * w.x(), s * w.y(), s * w.z());
}

Vec3 so3_log(const Eigen::Quaterniond& q_in) {
    Eigen::Quaterniond q = q_in.normalized();
    if (q.w() < 0) q.coeffs() *= -1.0;  // shortest arc
    const Vec3 v(q.x(), q.y(), q.z());
    const double n = v.norm();
    if (n < 1e-12) return 2.0 * v;
    const double theta = 2.0 * std::atan2(n, q.w());
    return v * (theta / n);
}

namespace {

// Left Jacobian of SO(3): the V matrix in the SE(3) exponential.
Mat3 so3_left_jacobian(const Vec3& w) {
    const double theta = w.norm();
    const Mat3 W = skew(w);
    if (theta < 1e-8) {
        return Mat3::Identity() + 0.5 * W + W * W / 6.0;
    }
    const double t2 = theta * theta;
    const double a = (1.0 - std::cos(theta)) / t2;
    const double b = (theta - std::sin(theta)) / (t2 * theta);
    return Mat3::Identity() + a * W + b * W * W;
}

Mat3 so3_left_jacobian_inv(const Vec3& w) {
    const double theta = w.norm();
    const Mat3 W = skew(w);
    if (theta < 1e-8) {
        return Mat3::Identity() - 0.5 * W + W * W / 12.0;
    }
    const double half = 0.5 * theta;
    const double cot_term = half / std::tan(half);
    return Mat3::Identity() - 0.5 * W + (1.0 - cot_term) / (theta * theta) * W * W;
}

}  // namespace

Pose se3_exp(const Vec6& delta) {
    const Vec3 w = delta.head<3>();
    const Vec3 rho = delta.tail<3>();
    Pose out;
    out.rotation = so3_exp(w);
    out.translation = so3_left_jacobian(w) * rho;
    return out;
}

Vec6 se3_log(const Pose& p) {
    Vec6 out;
    const Vec3 w = so3_log(p.rotation);
    out.head<3>() = w;
    out.tail<3>() = so3_left_jacobian_inv(w) * p.translation;
    return out;
}

Pose apply_tangent(const Pose& p, const Vec6& delta) {
    Pose out = compose(se3_exp(delta), p);
    out.renormalize();
    return out;
}

CenterProjection project_center(const Vec3& mu, const Pose& pose, const Camera& cam) {
    CenterProjection out;
    const Vec3 xc = pose.apply(mu);
    out.depth = xc.z();
    out.in_front = out.depth > kZNear;
    if (out.in_front) {
        out.pix.x() = cam.fx * xc.x() / out.depth + cam.cx;
        out.pix.y() = cam.fy * xc.y() / out.depth + cam.cy;
    }
    return out;
}

double project_radius(double r, double depth, const Camera& cam) {
    if (depth <= 0.0) {
        throw std::invalid_argument("project_radius: depth must be positive (cull first)");
    }
    return cam.mean_focal() * r / depth;
}

Vec3 backproject(const Vec2& pix, double depth, const Pose& pose, const Camera& cam) {
    if (depth <= 0.0) {
        throw std::invalid_argument("backproject: depth must be positive");
    }
    const Vec3 xc((pix.x() - cam.cx) / cam.fx * depth, (pix.y() - cam.cy) / cam.fy * depth,
                  depth);
    return pose.rotation.conjugate() * (xc - pose.translation);
}

}  // namespace semsplat
