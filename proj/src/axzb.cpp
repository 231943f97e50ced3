#include "handeye/axzb.hpp"

namespace handeye {
namespace axzb {

AxzbMatrices build_matrices(const MeasurementSet& meas) {
    AxzbMatrices K;
    K.n = static_cast<int>(meas.size());
    for (const auto& m : meas) {
        const Mat4 Ma = left_matrix(m.a.st);
        const Mat4 MaI = left_matrix(m.a.in);
        const Mat4 Wb = right_matrix(m.b.st);
        const Mat4 WbI = right_matrix(m.b.in);
        K.K11 += Ma.transpose() * Wb;
        K.K12 += Ma.transpose() * WbI;
        K.K21 += MaI.transpose() * Wb;
        K.P += Ma.transpose() * MaI;
        K.S += Wb.transpose() * WbI;
    }
    return K;
}

RotationStage rotation_stage(const AxzbMatrices& K, double tol_noiseless, double cluster_tol) {
    RotationStage out;
    out.svd = svd4(K.K11, cluster_tol);
    out.noiseless = (K.n - out.svd.sigma(0)) <= tol_noiseless * K.n;
    return out;
}

namespace {

Eigen::MatrixXd coupled_hessian(const AxzbMatrices& K, double gamma) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(8, 8);
    H.topLeftCorner<4, 4>() = (K.n + gamma) * Mat4::Identity();
    H.bottomRightCorner<4, 4>() = (K.n + gamma) * Mat4::Identity();
    H.topRightCorner<4, 4>() = -K.K11;
    H.bottomLeftCorner<4, 4>() = -K.K11.transpose();
    return H;
}

std::pair<DualQuaternion, DualQuaternion> assemble(const RotationStage& rot,
                                                   const Eigen::VectorXd& y,
                                                   const Eigen::VectorXd& w) {
    DualQuaternion x, z;
    x.st = rot.svd.Q1 * y;
    z.st = rot.svd.Q2 * y;
    x.in = w.head<4>();
    z.in = w.tail<4>();
    return {x, z};
}

} // namespace

std::pair<DualQuaternion, DualQuaternion> solve_noiseless(const AxzbMatrices& K,
                                                          const RotationStage& rot,
                                                          double gamma,
                                                          const MeasurementSet& meas) {
    const Eigen::MatrixXd& Q1 = rot.svd.Q1;
    const Eigen::MatrixXd& Q2 = rot.svd.Q2;
    const int k = rot.svd.multiplicity;

    SphereCoupledProblem p;
    p.H = coupled_hessian(K, gamma);
    p.G = Eigen::MatrixXd(8, k);
    p.G.topRows<4>() = K.P * Q1 - K.K12 * Q2;
    p.G.bottomRows<4>() = K.S * Q2 - K.K21.transpose() * Q1;
    p.T = Eigen::MatrixXd::Zero(k, k);
    for (const auto& m : meas) {
        const Eigen::MatrixXd E = left_matrix(m.a.in) * Q1 - right_matrix(m.b.in) * Q2;
        p.T += E.transpose() * E;
    }
    p.constant = 2.0 * gamma;
    p.constraints.push_back({Q1, 0});
    p.constraints.push_back({Q2, 4});

    const SphereSolution s = solve_sphere_coupled(p);
    return assemble(rot, s.y, s.w);
}

std::pair<DualQuaternion, DualQuaternion> solve_noisy(const AxzbMatrices& K,
                                                      const RotationStage& rot) {
    const Eigen::MatrixXd& Q1 = rot.svd.Q1;
    const Eigen::MatrixXd& Q2 = rot.svd.Q2;

    const Eigen::MatrixXd R = sym(Q1.transpose() * (K.K12 + K.K21) * Q2);
    const Eigen::VectorXd y = sym_extremal_eig(R, Extremum::max).basis.col(0);

    const Quat x_st = Q1 * y;
    const Quat z_st = Q2 * y;

    Eigen::VectorXd c(8);
    c.head<4>() = K.P * x_st - K.K12 * z_st;
    c.tail<4>() = K.S * z_st - K.K21.transpose() * x_st;

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2, 8);
    C.block<1, 4>(0, 0) = x_st.transpose();
    C.block<1, 4>(1, 4) = z_st.transpose();

    const QPSolution qp = solve_eq_qp(coupled_hessian(K, 0.0), c, C);
    return assemble(rot, y, qp.w);
}

AxzbSolution solve(const MeasurementSet& meas, const SolveOptions& opt) {
    if (meas.empty())
        throw TooFewMeasurements("axzb::solve: at least one measurement is required");
    for (const auto& m : meas)
        if (!is_unit(m.a) || !is_unit(m.b))
            throw NonUnitDualQuaternion("axzb::solve: measurements must be unit dual quaternions");

    MeasurementSet resolved = meas;
    make_signs_consistent(resolved);

    const AxzbMatrices K = build_matrices(resolved);
    const RotationStage rot = rotation_stage(K, opt.tol_noiseless, opt.cluster_tol);

    AxzbSolution out;
    out.branch = rot.noiseless ? Branch::noiseless : Branch::noisy;
    out.sigma1 = rot.svd.sigma(0);
    out.multiplicity = rot.svd.multiplicity;
    out.gamma = opt.gamma;
    auto [x, z] = rot.noiseless ? solve_noiseless(K, rot, opt.gamma, resolved)
                                : solve_noisy(K, rot);

    // a x = z b is invariant under jointly flipping x and z, but not under
    // flipping one of them, so canonicalize by x only.
    if (canonical_sign(x.st).dot(x.st) < 0.0) {
        x.st = -x.st;
        x.in = -x.in;
        z.st = -z.st;
        z.in = -z.in;
    }
    out.x = x;
    out.z = z;
    out.residual = residual_axzb(resolved, out.x, out.z);
    return out;
}

} // namespace axzb
} // namespace handeye
