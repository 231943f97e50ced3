#include "handeye/quat.hpp"

#include <cmath>

namespace handeye {

Quat multiply(const Quat& a, const Quat& b) {
    const double a0 = a(0), a1 = a(1), a2 = a(2), a3 = a(3);
    const double b0 = b(0), b1 = b(1), b2 = b(2), b3 = b(3);
    return Quat(a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
                a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
                a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
                a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0);
}

Quat conjugate(const Quat& a) {
    return Quat(a(0), -a(1), -a(2), -a(3));
}

Mat4 left_matrix(const Quat& a) {
    const double a0 = a(0), a1 = a(1), a2 = a(2), a3 = a(3);
    Mat4 M;
    M << a0, -a1, -a2, -a3,
         a1,  a0, -a3,  a2,
         a2,  a3,  a0, -a1,
         a3, -a2,  a1,  a0;
    return M;
}

Mat4 right_matrix(const Quat& b) {
    const double b0 = b(0), b1 = b(1), b2 = b(2), b3 = b(3);
    Mat4 W;
    W << b0, -b1, -b2, -b3,
         b1,  b0,  b3, -b2,
         b2, -b3,  b0,  b1,
         b3,  b2, -b1,  b0;
    return W;
}

Quat canonical_sign(const Quat& q) {
    for (int i = 0; i < 4; ++i) {
        if (q(i) > 0.0) return q;
        if (q(i) < 0.0) return -q;
    }
    return q;
}

Mat3 quat_to_rotation(const Quat& q, double unit_tol) {
    if (std::abs(q.norm() - 1.0) > unit_tol)
        throw NonUnitQuaternion("quat_to_rotation: |q| deviates from 1 by more than tolerance");
    const double q0 = q(0), q1 = q(1), q2 = q(2), q3 = q(3);
    Mat3 R;
    R << q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3, 2.0 * (q1 * q2 - q0 * q3), 2.0 * (q1 * q3 + q0 * q2),
         2.0 * (q1 * q2 + q0 * q3), q0 * q0 - q1 * q1 + q2 * q2 - q3 * q3, 2.0 * (q2 * q3 - q0 * q1),
         2.0 * (q1 * q3 - q0 * q2), 2.0 * (q2 * q3 + q0 * q1), q0 * q0 - q1 * q1 - q2 * q2 + q3 * q3;
    return R;
}

Quat rotation_to_quat(const Mat3& R, double ortho_tol) {
    if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > ortho_tol ||
        R.determinant() <= 0.0)
        throw NotARotation("rotation_to_quat: matrix is not a rotation within tolerance");

    const double tr = R.trace();
    Quat q;
    if (tr >= R(0, 0) && tr >= R(1, 1) && tr >= R(2, 2)) {
        const double s = std::sqrt(tr + 1.0) * 2.0;
        q << 0.25 * s,
             (R(2, 1) - R(1, 2)) / s,
             (R(0, 2) - R(2, 0)) / s,
             (R(1, 0) - R(0, 1)) / s;
    } else if (R(0, 0) >= R(1, 1) && R(0, 0) >= R(2, 2)) {
        const double s = std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2)) * 2.0;
        q << (R(2, 1) - R(1, 2)) / s,
             0.25 * s,
             (R(0, 1) + R(1, 0)) / s,
             (R(0, 2) + R(2, 0)) / s;
    } else if (R(1, 1) >= R(2, 2)) {
        const double s = std::sqrt(1.0 + R(1, 1) - R(0, 0) - R(2, 2)) * 2.0;
        q << (R(0, 2) - R(2, 0)) / s,
             (R(0, 1) + R(1, 0)) / s,
             0.25 * s,
             (R(1, 2) + R(2, 1)) / s;
    } else {
        const double s = std::sqrt(1.0 + R(2, 2) - R(0, 0) - R(1, 1)) * 2.0;
        q << (R(1, 0) - R(0, 1)) / s,
             (R(0, 2) + R(2, 0)) / s,
             (R(1, 2) + R(2, 1)) / s,
             0.25 * s;
    }
    return canonical_sign(q.normalized());
}

} // namespace handeye
