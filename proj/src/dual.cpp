#include "handeye/dual.hpp"

#include <cmath>
#include <limits>

namespace handeye {

namespace {
constexpr double kZeroThreshold = 1e-12;
}

Ordering dn_compare(DualNumber p, DualNumber q) {
    if (p.st < q.st) return Ordering::less;
    if (p.st > q.st) return Ordering::greater;
    if (p.in < q.in) return Ordering::less;
    if (p.in > q.in) return Ordering::greater;
    return Ordering::equal;
}

DualNumber dn_abs(DualNumber q) {
    if (q.st < 0.0) return {-q.st, -q.in};
    if (q.st == 0.0 && q.in < 0.0) return {0.0, -q.in};
    return q;
}

DualQuaternion dq_multiply(const DualQuaternion& a, const DualQuaternion& b) {
    return {multiply(a.st, b.st), multiply(a.st, b.in) + multiply(a.in, b.st)};
}

DualQuaternion dq_conjugate(const DualQuaternion& q) {
    return {conjugate(q.st), conjugate(q.in)};
}

DualQuaternion dq_add(const DualQuaternion& a, const DualQuaternion& b) {
    return {a.st + b.st, a.in + b.in};
}

DualQuaternion dq_sub(const DualQuaternion& a, const DualQuaternion& b) {
    return {a.st - b.st, a.in - b.in};
}

DualQuaternion dq_scale(double s, const DualQuaternion& q) {
    return {s * q.st, s * q.in};
}

DualNumber dq_magnitude(const DualQuaternion& q) {
    const double s = q.st.norm();
    if (s <= kZeroThreshold) return {0.0, q.in.norm()};
    return {s, q.st.dot(q.in) / s};
}

bool is_unit(const DualQuaternion& q, double tol) {
    return std::abs(q.st.norm() - 1.0) <= tol && std::abs(q.st.dot(q.in)) <= tol;
}

Mat4 Pose::homogeneous() const {
    Mat4 T = Mat4::Identity();
    T.topLeftCorner<3, 3>() = R;
    T.topRightCorner<3, 1>() = t;
    return T;
}

Pose pose_compose(const Pose& a, const Pose& b) {
    return {a.R * b.R, a.R * b.t + a.t};
}

Pose pose_inverse(const Pose& a) {
    return {a.R.transpose(), -(a.R.transpose() * a.t)};
}

DualQuaternion pose_to_dq(const Pose& T, double ortho_tol) {
    DualQuaternion q;
    q.st = rotation_to_quat(T.R, ortho_tol);
    const Quat tq(0.0, T.t(0), T.t(1), T.t(2));
    q.in = 0.5 * multiply(tq, q.st);
    return q;
}

Pose dq_to_pose(const DualQuaternion& q, double unit_tol) {
    if (!is_unit(q, unit_tol))
        throw NonUnitDualQuaternion("dq_to_pose: dual quaternion is not unit within tolerance");
    Pose T;
    T.R = quat_to_rotation(q.st.normalized());
    T.t = vector_part(2.0 * multiply(q.in, conjugate(q.st)));
    return T;
}

DualNumber dqvec_norm(const std::vector<DualQuaternion>& v) {
    double ss = 0.0, cross = 0.0, ii = 0.0;
    for (const auto& q : v) {
        ss += q.st.squaredNorm();
        cross += q.st.dot(q.in);
        ii += q.in.squaredNorm();
    }
    const double s = std::sqrt(ss);
    if (s <= kZeroThreshold) return {0.0, std::sqrt(ii)};
    return {s, cross / s};
}

DualNumber residual_axxb(const MotionSet& motions, const DualQuaternion& x) {
    std::vector<DualQuaternion> r;
    r.reserve(motions.size());
    for (const auto& m : motions)
        r.push_back(dq_sub(dq_multiply(m.a, x), dq_multiply(x, m.b)));
    return dqvec_norm(r);
}

DualNumber residual_axzb(const MeasurementSet& meas, const DualQuaternion& x,
                         const DualQuaternion& z) {
    std::vector<DualQuaternion> r;
    r.reserve(meas.size());
    for (const auto& m : meas)
        r.push_back(dq_sub(dq_multiply(m.a, x), dq_multiply(z, m.b)));
    return dqvec_norm(r);
}

void make_signs_consistent(std::vector<DQPair>& pairs) {
    const int n = static_cast<int>(pairs.size());
    if (n < 2) return;

    Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXi rel = Eigen::MatrixXi::Ones(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double c = pairs[i].a.st.dot(pairs[j].a.st) *
                             pairs[i].b.st.dot(pairs[j].b.st);
            weight(i, j) = weight(j, i) = std::abs(c);
            rel(i, j) = rel(j, i) = (c >= 0.0) ? 1 : -1;
        }
    }

    // Prim over the complete graph, growing from pair 0.
    std::vector<int> sign(n, 0);
    std::vector<bool> in_tree(n, false);
    sign[0] = 1;
    in_tree[0] = true;
    for (int added = 1; added < n; ++added) {
        int bi = -1, bj = -1;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            if (!in_tree[i]) continue;
            for (int j = 0; j < n; ++j) {
                if (in_tree[j]) continue;
                if (weight(i, j) > best) {
                    best = weight(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        sign[bj] = sign[bi] * rel(bi, bj);
        in_tree[bj] = true;
    }

    // The tree fixes relative signs only. Scalar parts are invariant under
    // conjugation by the unknown, so align the remaining global sign with them.
    double align = 0.0;
    for (int i = 0; i < n; ++i)
        align += sign[i] * scalar_part(pairs[i].a.st) * scalar_part(pairs[i].b.st);
    const int global = (align < 0.0) ? -1 : 1;

    for (int i = 0; i < n; ++i) {
        if (global * sign[i] < 0) {
            pairs[i].b.st = -pairs[i].b.st;
            pairs[i].b.in = -pairs[i].b.in;
        }
    }
}

} // namespace handeye
