#include "handeye/axxb.hpp"

namespace handeye {
namespace axxb {

AxxbMatrices build_matrices(const MotionSet& motions) {
    AxxbMatrices L;
    L.n = static_cast<int>(motions.size());
    for (const auto& m : motions) {
        const Mat4 D = left_matrix(m.a.st) - right_matrix(m.b.st);
        const Mat4 E = left_matrix(m.a.in) - right_matrix(m.b.in);
        L.L11 += D.transpose() * D;
        L.L12 += D.transpose() * E;
        L.L22 += E.transpose() * E;
    }
    return L;
}

RotationStage rotation_stage(const AxxbMatrices& L, double tol_noiseless, double cluster_tol) {
    RotationStage out;
    out.basis = sym_extremal_eig(L.L11, Extremum::min, cluster_tol);
    out.noiseless = out.basis.value <= tol_noiseless * L.n;
    return out;
}

DualQuaternion solve_noiseless(const AxxbMatrices& L, const SpectralBasis& Q, double gamma) {
    SphereCoupledProblem p;
    p.H = L.L11 + gamma * Mat4::Identity();
    p.G = L.L12 * Q.basis;
    p.T = Q.basis.transpose() * (L.L22 + gamma * Mat4::Identity()) * Q.basis;
    p.constraints.push_back({Q.basis, 0});

    const SphereSolution s = solve_sphere_coupled(p);
    DualQuaternion x;
    x.st = Q.basis * s.y;
    x.in = s.w;
    return x;
}

DualQuaternion solve_noisy(const AxxbMatrices& L, const SpectralBasis& Q) {
    const Eigen::MatrixXd R = sym(Q.basis.transpose() * L.L12 * Q.basis);
    const SpectralBasis e = sym_extremal_eig(R, Extremum::min);

    DualQuaternion x;
    x.st = Q.basis * e.basis.col(0);
    const QPSolution qp = solve_eq_qp(L.L11, L.L12 * x.st, x.st.transpose());
    x.in = qp.w;
    return x;
}

AxxbSolution solve(const MotionSet& motions, const SolveOptions& opt) {
    if (motions.empty())
        throw TooFewMeasurements("axxb::solve: at least one motion is required");
    for (const auto& m : motions)
        if (!is_unit(m.a) || !is_unit(m.b))
            throw NonUnitDualQuaternion("axxb::solve: motion entries must be unit dual quaternions");

    MotionSet resolved = motions;
    make_signs_consistent(resolved);

    const AxxbMatrices L = build_matrices(resolved);
    const RotationStage rot = rotation_stage(L, opt.tol_noiseless, opt.cluster_tol);

    AxxbSolution out;
    out.branch = rot.noiseless ? Branch::noiseless : Branch::noisy;
    out.lambda0 = rot.basis.value;
    out.multiplicity = rot.basis.multiplicity;
    out.gamma = opt.gamma;
    out.x = rot.noiseless ? solve_noiseless(L, rot.basis, opt.gamma)
                          : solve_noisy(L, rot.basis);

    if (canonical_sign(out.x.st).dot(out.x.st) < 0.0) {
        out.x.st = -out.x.st;
        out.x.in = -out.x.in;
    }
    out.residual = residual_axxb(resolved, out.x);
    return out;
}

} // namespace axxb
} // namespace handeye
