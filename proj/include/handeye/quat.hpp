#pragma once

#include <Eigen/Dense>

#include "handeye/errors.hpp"

namespace handeye {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Quaternion q = q0 + q1 i + q2 j + q3 k stored scalar-first as (q0, q1, q2, q3).
using Quat = Eigen::Vector4d;

// Hamilton product ab.
Quat multiply(const Quat& a, const Quat& b);

// Conjugate a* = (a0, -a1, -a2, -a3).
Quat conjugate(const Quat& a);

inline double scalar_part(const Quat& a) { return a(0); }
inline Vec3 vector_part(const Quat& a) { return a.tail<3>(); }
inline double magnitude(const Quat& a) { return a.norm(); }

// Left multiplication matrix: vec(ab) = left_matrix(a) * b for all b.
Mat4 left_matrix(const Quat& a);

// Right multiplication matrix: vec(ab) = right_matrix(b) * a for all a.
Mat4 right_matrix(const Quat& b);

// Representative of the pair {q, -q} with nonnegative scalar part; when the
// scalar part is exactly zero, the first nonzero component is made positive.
Quat canonical_sign(const Quat& q);

// Rotation matrix of a unit quaternion. Throws NonUnitQuaternion when
// | |q| - 1 | > unit_tol.
Mat3 quat_to_rotation(const Quat& q, double unit_tol = 1e-8);

// Unit quaternion of a rotation matrix, branching on the largest of
// trace(R) and the diagonal entries for numerical stability. The result is
// sign-canonicalized. Throws NotARotation when R'R deviates from the identity
// by more than ortho_tol (max-abs entrywise) or det(R) <= 0.
Quat rotation_to_quat(const Mat3& R, double ortho_tol = 1e-6);

} // namespace handeye
