#pragma once

#include <vector>

#include "handeye/quat.hpp"

namespace handeye {

// Dual number p_st + p_in * eps with eps^2 = 0, "st" the standard part and
// "in" the infinitesimal part.
struct DualNumber {
    double st = 0.0;
    double in = 0.0;
};

inline DualNumber dn_add(DualNumber p, DualNumber q) { return {p.st + q.st, p.in + q.in}; }
inline DualNumber dn_sub(DualNumber p, DualNumber q) { return {p.st - q.st, p.in - q.in}; }
inline DualNumber dn_mul(DualNumber p, DualNumber q) {
    return {p.st * q.st, p.st * q.in + p.in * q.st};
}

enum class Ordering { less, equal, greater };

// Total (lexicographic) order: compare standard parts first, then
// infinitesimal parts.
Ordering dn_compare(DualNumber p, DualNumber q);

inline bool dn_less(DualNumber p, DualNumber q) { return dn_compare(p, q) == Ordering::less; }

// |q| under the total order: negate the whole number when q < 0, and negate
// only the infinitesimal part when q_st = 0 and q_in < 0.
DualNumber dn_abs(DualNumber q);

// Dual quaternion q_st + q_in * eps.
struct DualQuaternion {
    Quat st = Quat::Zero();
    Quat in = Quat::Zero();
};

DualQuaternion dq_multiply(const DualQuaternion& a, const DualQuaternion& b);
DualQuaternion dq_conjugate(const DualQuaternion& q);
DualQuaternion dq_add(const DualQuaternion& a, const DualQuaternion& b);
DualQuaternion dq_sub(const DualQuaternion& a, const DualQuaternion& b);
DualQuaternion dq_scale(double s, const DualQuaternion& q);

// Magnitude |q_st| + Sc(q_st* q_in)/|q_st| * eps; for q_st below the zero
// threshold (1e-12) the magnitude is |q_in| * eps instead.
DualNumber dq_magnitude(const DualQuaternion& q);

// Unit dual quaternion check: | |q_st| - 1 | <= tol and |Sc(q_st* q_in)| <= tol.
bool is_unit(const DualQuaternion& q, double tol = 1e-8);

// Rigid pose: rotation R and translation t.
struct Pose {
    Mat3 R = Mat3::Identity();
    Vec3 t = Vec3::Zero();

    Mat4 homogeneous() const;
};

Pose pose_compose(const Pose& a, const Pose& b);
Pose pose_inverse(const Pose& a);

// Unit dual quaternion of a pose: q_st from the rotation (sign-canonicalized),
// q_in = (0, t) q_st / 2. ortho_tol is forwarded to rotation_to_quat.
DualQuaternion pose_to_dq(const Pose& T, double ortho_tol = 1e-6);

// Pose of a unit dual quaternion: R from q_st, t = vector part of 2 q_in q_st*.
// Throws NonUnitDualQuaternion when the unit check fails at unit_tol.
Pose dq_to_pose(const DualQuaternion& q, double unit_tol = 1e-8);

// 2-norm of a vector of dual quaternions. With s = sqrt(sum |v_st,i|^2) and
// c = sum Sc(v_st,i* v_in,i), the norm is s + (c/s) eps, except that an all
// infinitesimal vector (s below the 1e-12 zero threshold) has norm
// sqrt(sum |v_in,i|^2) * eps.
DualNumber dqvec_norm(const std::vector<DualQuaternion>& v);

// One (a, b) pair of unit dual quaternions. For the single-unknown equation
// the pairs are relative motions; for the two-unknown equation they are raw
// measurements.
struct DQPair {
    DualQuaternion a;
    DualQuaternion b;
};

using MotionSet = std::vector<DQPair>;
using MeasurementSet = std::vector<DQPair>;

// Stacked residual norm of a x - x b over the set.
DualNumber residual_axxb(const MotionSet& motions, const DualQuaternion& x);

// Stacked residual norm of a x - z b over the set.
DualNumber residual_axzb(const MeasurementSet& meas, const DualQuaternion& x,
                         const DualQuaternion& z);

// Resolves the per-pair sign ambiguity of the b side. Each b entry of a pair
// is only determined up to a global flip of both parts, and independent
// canonical extraction can leave the set mutually inconsistent, which breaks
// the dual-quaternion formulation even on exact data. Compatible pairs
// satisfy Sc(a_i* a_j) = s_i s_j Sc(b_i* b_j), so the relative sign of pairs
// (i, j) is sign(<a_i,st, a_j,st> <b_i,st, b_j,st>). Signs are propagated
// over a maximum-weight spanning tree with weights |<a_i,st, a_j,st>
// <b_i,st, b_j,st>|, preferring well-conditioned edges. A no-op on already
// consistent sets, up to one harmless global flip.
void make_signs_consistent(std::vector<DQPair>& pairs);

enum class Branch { noiseless, noisy };

struct SolveOptions {
    double gamma = 2e-6;          // translation-stage regularization weight
    double tol_noiseless = 1e-6;  // per-pair threshold for the branch test
    double cluster_tol = 1e-8;    // relative eigenvalue/singular-value clustering
};

} // namespace handeye
