#include "handeye/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

namespace handeye {

namespace {

// Portable Gaussian stream: Box-Muller over the raw mt19937_64 output, so a
// fixed seed produces identical draws on every platform.
class Gauss {
public:
    explicit Gauss(std::uint64_t seed) : gen_(seed) {}

    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

Quat random_unit_quat(Gauss& g) {
    Quat q;
    for (int i = 0; i < 4; ++i) q(i) = g();
    return canonical_sign(q.normalized());
}

Pose random_pose(Gauss& g, double t_scale) {
    Pose T;
    T.R = quat_to_rotation(random_unit_quat(g));
    for (int i = 0; i < 3; ++i) T.t(i) = (2.0 * g.uniform() - 1.0) * t_scale;
    return T;
}

Mat3 rot_z(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 R;
    R << c, -s, 0.0,
         s,  c, 0.0,
         0.0, 0.0, 1.0;
    return R;
}

} // namespace

GroundTruth benchmark_ground_truth() {
    GroundTruth gt;
    gt.X.R <<  0.9995, -0.0100,  0.0297,
               0.0116,  0.9986, -0.0523,
              -0.0291,  0.0526,  0.9982;
    gt.X.t << 9.190, 5.397, 0.0;
    gt.Z.R <<  0.2790, -0.0981, -0.9553,
              -0.5439,  0.8037, -0.2414,
               0.7914,  0.5869,  0.1709;
    gt.Z.t << 164.226, 301.638, 0.0;
    return gt;
}

std::vector<Pose> benchmark_nonparallel_As() {
    std::vector<Pose> A(4);
    A[0].R <<  0.1752, -0.6574,  0.7329,
               0.6325, -0.4954, -0.5954,
               0.7545,  0.5679,  0.3290;
    A[0].t << -10.5536, -30.5304, 50.4851;
    A[1].R << -0.0745,  0.9661,  0.2471,
               0.8573, -0.0645,  0.5108,
               0.5094,  0.2499, -0.8234;
    A[1].t << -20.4123, -50.8904, 80.8685;
    A[2].R << -0.1456, -0.6867,  0.7122,
               0.8252, -0.4814, -0.2955,
               0.5458,  0.5447,  0.6367;
    A[2].t << -20.5519, -30.6491, 60.4312;
    A[3].R << -0.1434, -0.5250,  0.8389,
               0.8158, -0.5427, -0.2001,
               0.5603,  0.6557,  0.5061;
    A[3].t << -10.5892, -50.6730, 80.4641;
    return A;
}

std::vector<Pose> benchmark_parallel_As() {
    const double pi = std::numbers::pi;
    const double angles[4] = {pi / 6.0, pi / 3.0, -pi / 6.0, -pi / 3.0};
    std::vector<Pose> A(4);
    for (int i = 0; i < 4; ++i) A[i].R = rot_z(angles[i]);
    A[0].t << -10.9865,  12.3788, -27.2571;
    A[1].t <<  38.8986,  84.6736, -93.8814;
    A[2].t << -75.7189, -53.6187,  28.5794;
    A[3].t << -52.8133,  93.3732, -70.1666;
    return A;
}

RandomFixture random_fixture(int n, std::uint64_t seed) {
    if (n < 2)
        throw TooFewMeasurements("random_fixture: at least two measurements are required");
    Gauss g(seed);
    RandomFixture fix;
    for (int attempt = 0; attempt < 256; ++attempt) {
        fix.gt.X = random_pose(g, 0.1);
        fix.gt.Z = random_pose(g, 0.1);
        fix.A.clear();
        for (int i = 0; i < n; ++i) fix.A.push_back(random_pose(g, 0.1));

        MeasurementSet meas = make_measurements(fix.gt, fix.A);
        make_signs_consistent(meas);
        const AxzbMatrices K = axzb::build_matrices(meas);
        const Svd4 sv = svd4(K.K11);
        if (n - sv.sigma(1) < 0.3) continue;

        MotionSet motions = make_motions(make_measurements(fix.gt, fix.A));
        make_signs_consistent(motions);
        const AxxbMatrices L = axxb::build_matrices(motions);
        Eigen::SelfAdjointEigenSolver<Mat4> es(L.L11);
        if (es.eigenvalues()(1) < 0.3) continue;
        break;
    }
    return fix;
}

std::vector<std::pair<Pose, Pose>> make_pose_pairs(const GroundTruth& gt,
                                                   const std::vector<Pose>& A) {
    // True matrix inverse rather than the rigid-transpose shortcut: with
    // rounded ground-truth blocks the two differ, and the benchmark data is
    // defined through the former.
    const Mat4 Zinv = gt.Z.homogeneous().inverse();
    const Mat4 X = gt.X.homogeneous();
    std::vector<std::pair<Pose, Pose>> pairs;
    pairs.reserve(A.size());
    for (const auto& a : A) {
        const Mat4 B = Zinv * (a.homogeneous() * X);
        Pose b;
        b.R = B.topLeftCorner<3, 3>();
        b.t = B.topRightCorner<3, 1>();
        pairs.push_back({a, b});
    }
    return pairs;
}

MeasurementSet to_measurements(const std::vector<std::pair<Pose, Pose>>& pairs,
                               double ortho_tol) {
    MeasurementSet meas;
    meas.reserve(pairs.size());
    for (const auto& [a, b] : pairs)
        meas.push_back({pose_to_dq(a, ortho_tol), pose_to_dq(b, ortho_tol)});
    return meas;
}

MeasurementSet make_measurements(const GroundTruth& gt, const std::vector<Pose>& A,
                                 double ortho_tol) {
    return to_measurements(make_pose_pairs(gt, A), ortho_tol);
}

MotionSet make_motions(const MeasurementSet& meas) {
    const int n = static_cast<int>(meas.size());
    if (n < 2)
        throw TooFewMeasurements("make_motions: at least two measurements are required");
    MotionSet motions;
    motions.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            DQPair m;
            m.a = dq_multiply(dq_conjugate(meas[i].a), meas[j].a);
            m.b = dq_multiply(dq_conjugate(meas[i].b), meas[j].b);
            motions.push_back(m);
        }
    }
    return motions;
}

Pose perturb_pose(const Pose& T, const NoiseModel& nm, double ortho_tol) {
    if (nm.sigma == 0.0) return T;
    Gauss g(nm.seed);
    Quat q = rotation_to_quat(T.R, ortho_tol);
    for (int i = 0; i < 4; ++i) q(i) += nm.sigma * g();
    Pose out;
    out.R = quat_to_rotation(q.normalized());
    out.t = T.t;
    for (int i = 0; i < 3; ++i) out.t(i) += nm.sigma * g();
    return out;
}

double estimation_error(const Pose& X, const Pose& ref) {
    return (X.homogeneous() - ref.homogeneous()).norm();
}

Pose canonicalize_parallel(const Pose& X, const Vec3& axis) {
    Pose out = X;
    out.t -= (X.t.dot(axis) / axis.squaredNorm()) * axis;
    return out;
}

std::pair<Pose, Pose> canonicalize_parallel(const Pose& X, const Pose& Z, const Vec3& axis) {
    const double d = -X.t.dot(axis) / axis.squaredNorm();
    Pose Xc = X, Zc = Z;
    Xc.t += d * axis;
    Zc.t += d * axis;
    return {Xc, Zc};
}

std::vector<SweepRow> robustness_sweep(const SweepConfig& cfg) {
    if (cfg.sigma_step <= 0.0)
        throw BadFlag("robustness_sweep: sigma-step must be positive");
    if (cfg.runs <= 0)
        throw BadFlag("robustness_sweep: runs must be positive");

    const GroundTruth gt = benchmark_ground_truth();
    const auto pairs = make_pose_pairs(gt, benchmark_nonparallel_As());
    const int steps = static_cast<int>(std::llround(cfg.sigma_max / cfg.sigma_step));

    std::vector<SweepRow> rows;
    for (int s = 0; s <= steps; ++s) {
        const double sigma = s * cfg.sigma_step;
        double ex = 0.0, ez = 0.0;
        for (int run = 0; run < cfg.runs; ++run) {
            MeasurementSet meas;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const NoiseModel nm{sigma, cfg.seed * 1000003ULL +
                                               static_cast<std::uint64_t>(s) * 8191ULL +
                                               static_cast<std::uint64_t>(run) * 131ULL + i};
                const Pose Bp = perturb_pose(pairs[i].second, nm);
                meas.push_back({pose_to_dq(pairs[i].first, 1e-3), pose_to_dq(Bp, 1e-3)});
            }
            if (cfg.equation == SweepConfig::Equation::axxb) {
                const AxxbSolution sol = axxb::solve(make_motions(meas), cfg.options);
                ex += estimation_error(dq_to_pose(sol.x), gt.X);
            } else {
                const AxzbSolution sol = axzb::solve(meas, cfg.options);
                ex += estimation_error(dq_to_pose(sol.x), gt.X);
                ez += estimation_error(dq_to_pose(sol.z), gt.Z);
            }
        }
        rows.push_back({sigma, ex / cfg.runs, ez / cfg.runs, cfg.runs});
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "sigma,mean_e_X,mean_e_Z,runs\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%d\n", r.sigma, r.mean_e_X,
                      r.mean_e_Z, r.runs);
        out += buf;
    }
    return out;
}

std::vector<std::pair<Pose, Pose>> to_pose_pairs(const MotionSet& set, double unit_tol) {
    std::vector<std::pair<Pose, Pose>> pairs;
    pairs.reserve(set.size());
    for (const auto& m : set)
        pairs.push_back({dq_to_pose(m.a, unit_tol), dq_to_pose(m.b, unit_tol)});
    return pairs;
}

double homogeneous_residual_axxb(const std::vector<std::pair<Pose, Pose>>& pairs,
                                 const Pose& X) {
    const Mat4 Xh = X.homogeneous();
    double total = 0.0;
    for (const auto& [a, b] : pairs)
        total += (a.homogeneous() * Xh - Xh * b.homogeneous()).squaredNorm();
    return std::sqrt(total);
}

double homogeneous_residual_axzb(const std::vector<std::pair<Pose, Pose>>& pairs,
                                 const Pose& X, const Pose& Z) {
    const Mat4 Xh = X.homogeneous();
    const Mat4 Zh = Z.homogeneous();
    double total = 0.0;
    for (const auto& [a, b] : pairs)
        total += (a.homogeneous() * Xh - Zh * b.homogeneous()).squaredNorm();
    return std::sqrt(total);
}

namespace {

Mat3 dR_dq(const Quat& q, int k) {
    const double q0 = q(0), q1 = q(1), q2 = q(2), q3 = q(3);
    Mat3 D;
    switch (k) {
    case 0:
        D <<  q0, -q3,  q2,
              q3,  q0, -q1,
             -q2,  q1,  q0;
        break;
    case 1:
        D <<  q1,  q2,  q3,
              q2, -q1, -q0,
              q3,  q0, -q1;
        break;
    case 2:
        D << -q2,  q1,  q0,
              q1,  q2,  q3,
             -q0,  q3, -q2;
        break;
    default:
        D << -q3, -q0,  q1,
              q0, -q3,  q2,
              q1,  q2,  q3;
        break;
    }
    return 2.0 * D;
}

using EvalFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

Eigen::VectorXd normalize_quat_blocks(Eigen::VectorXd v) {
    for (int b = 0; b + 4 <= v.size(); b += 4) {
        const double n = v.segment<4>(b).norm();
        if (n > 0.0) v.segment<4>(b) /= n;
    }
    return v;
}

Eigen::VectorXd project_quat_tangent(const Eigen::VectorXd& g, const Eigen::VectorXd& y) {
    Eigen::VectorXd pg = g;
    for (int b = 0; b + 4 <= y.size(); b += 4)
        pg.segment<4>(b) -= y.segment<4>(b).dot(g.segment<4>(b)) * y.segment<4>(b);
    return pg;
}

// Projected gradient descent over a product of unit-quaternion spheres, with
// Barzilai-Borwein step proposals safeguarded by Armijo backtracking.
double descend(const EvalFn& eval, Eigen::VectorXd& y, int max_iter) {
    y = normalize_quat_blocks(y);
    Eigen::VectorXd g(y.size());
    double f = eval(y, &g);
    Eigen::VectorXd y_prev, g_prev;
    double alpha = 1e-3;
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd pg = project_quat_tangent(g, y);
        const double pgn2 = pg.squaredNorm();
        if (std::sqrt(pgn2) <= 1e-12 * std::max(1.0, std::abs(f)) || f <= 1e-20) break;

        if (y_prev.size() > 0) {
            const double sy = std::abs((y - y_prev).dot(g - g_prev));
            if (sy > 1e-30)
                alpha = std::clamp((y - y_prev).squaredNorm() / sy, 1e-12, 1e2);
        }
        y_prev = y;
        g_prev = g;

        bool accepted = false;
        double a = alpha;
        while (a > 1e-17) {
            const Eigen::VectorXd cand = normalize_quat_blocks(y - a * pg);
            Eigen::VectorXd gc(y.size());
            const double fc = eval(cand, &gc);
            if (fc <= f - 1e-4 * a * pgn2) {
                y = cand;
                f = fc;
                g = gc;
                accepted = true;
                break;
            }
            a *= 0.5;
        }
        if (!accepted) break;
    }
    return f;
}

} // namespace

OracleSolution oracle_solve_axxb(const MotionSet& motions, int starts, std::uint64_t seed,
                                 const std::vector<Pose>& warm) {
    const auto pairs = to_pose_pairs(motions);
    const int n = static_cast<int>(pairs.size());

    Eigen::MatrixXd Mst(3 * n, 3);
    for (int i = 0; i < n; ++i)
        Mst.block<3, 3>(3 * i, 0) = pairs[i].first.R - Mat3::Identity();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Mst);

    Vec3 t_best = Vec3::Zero();
    auto eval = [&](const Eigen::VectorXd& yv, Eigen::VectorXd* grad) -> double {
        const Quat q = yv.head<4>();
        const Mat3 Rx = quat_to_rotation(q);
        Eigen::VectorXd rhs(3 * n);
        for (int i = 0; i < n; ++i)
            rhs.segment<3>(3 * i) = Rx * pairs[i].second.t - pairs[i].first.t;
        const Vec3 t = cod.solve(rhs);
        double cost = 0.0;
        Mat3 GR = Mat3::Zero();
        for (int i = 0; i < n; ++i) {
            const Mat3& RA = pairs[i].first.R;
            const Mat3& RB = pairs[i].second.R;
            const Mat3 D = RA * Rx - Rx * RB;
            cost += D.squaredNorm();
            const Vec3 r = (RA - Mat3::Identity()) * t - Rx * pairs[i].second.t +
                           pairs[i].first.t;
            cost += r.squaredNorm();
            if (grad) {
                GR += 2.0 * (RA.transpose() * D - D * RB.transpose());
                GR -= 2.0 * r * pairs[i].second.t.transpose();
            }
        }
        if (grad) {
            grad->resize(4);
            for (int k = 0; k < 4; ++k) (*grad)(k) = GR.cwiseProduct(dR_dq(q, k)).sum();
        }
        t_best = t;
        return cost;
    };

    Gauss rng(seed);
    std::vector<Eigen::VectorXd> inits;
    inits.push_back(Vec4(1.0, 0.0, 0.0, 0.0));
    for (int s = 1; s < starts; ++s) {
        Vec4 v;
        for (int j = 0; j < 4; ++j) v(j) = rng();
        inits.push_back(v.normalized());
    }
    for (const auto& w : warm) inits.push_back(rotation_to_quat(w.R));

    double best_f = std::numeric_limits<double>::infinity();
    Quat best_q = Quat(1.0, 0.0, 0.0, 0.0);
    for (const auto& y0 : inits) {
        Eigen::VectorXd y = y0;
        const double f = descend(eval, y, 1500);
        if (f < best_f) {
            best_f = f;
            best_q = y.head<4>();
        }
    }

    OracleSolution out;
    eval(best_q, nullptr);
    out.X = {quat_to_rotation(best_q), t_best};
    out.has_Z = false;
    out.residual = std::sqrt(std::max(best_f, 0.0));
    return out;
}

OracleSolution oracle_solve_axzb(const MeasurementSet& meas, int starts, std::uint64_t seed,
                                 const std::vector<std::pair<Pose, Pose>>& warm) {
    const auto pairs = to_pose_pairs(meas);
    const int n = static_cast<int>(pairs.size());

    Eigen::MatrixXd Mst(3 * n, 6);
    for (int i = 0; i < n; ++i) {
        Mst.block<3, 3>(3 * i, 0) = pairs[i].first.R;
        Mst.block<3, 3>(3 * i, 3) = -Mat3::Identity();
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Mst);

    Eigen::Matrix<double, 6, 1> u_best = Eigen::Matrix<double, 6, 1>::Zero();
    auto eval = [&](const Eigen::VectorXd& yv, Eigen::VectorXd* grad) -> double {
        const Quat qx = yv.head<4>();
        const Quat qz = yv.tail<4>();
        const Mat3 Rx = quat_to_rotation(qx);
        const Mat3 Rz = quat_to_rotation(qz);
        Eigen::VectorXd rhs(3 * n);
        for (int i = 0; i < n; ++i)
            rhs.segment<3>(3 * i) = Rz * pairs[i].second.t - pairs[i].first.t;
        const Eigen::Matrix<double, 6, 1> u = cod.solve(rhs);
        const Vec3 tx = u.head<3>();
        const Vec3 tz = u.tail<3>();
        double cost = 0.0;
        Mat3 GRx = Mat3::Zero(), GRz = Mat3::Zero();
        for (int i = 0; i < n; ++i) {
            const Mat3& RA = pairs[i].first.R;
            const Mat3& RB = pairs[i].second.R;
            const Mat3 D = RA * Rx - Rz * RB;
            cost += D.squaredNorm();
            const Vec3 r = RA * tx - tz - Rz * pairs[i].second.t + pairs[i].first.t;
            cost += r.squaredNorm();
            if (grad) {
                GRx += 2.0 * RA.transpose() * D;
                GRz -= 2.0 * D * RB.transpose();
                GRz -= 2.0 * r * pairs[i].second.t.transpose();
            }
        }
        if (grad) {
            grad->resize(8);
            for (int k = 0; k < 4; ++k) {
                (*grad)(k) = GRx.cwiseProduct(dR_dq(qx, k)).sum();
                (*grad)(4 + k) = GRz.cwiseProduct(dR_dq(qz, k)).sum();
            }
        }
        u_best = u;
        return cost;
    };

    Gauss rng(seed);
    std::vector<Eigen::VectorXd> inits;
    Eigen::VectorXd ident(8);
    ident << 1, 0, 0, 0, 1, 0, 0, 0;
    inits.push_back(ident);
    for (int s = 1; s < starts; ++s) {
        Eigen::VectorXd v(8);
        for (int j = 0; j < 8; ++j) v(j) = rng();
        inits.push_back(normalize_quat_blocks(v));
    }
    for (const auto& [wx, wz] : warm) {
        Eigen::VectorXd v(8);
        v.head<4>() = rotation_to_quat(wx.R);
        v.tail<4>() = rotation_to_quat(wz.R);
        inits.push_back(v);
    }

    double best_f = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_y = ident;
    for (const auto& y0 : inits) {
        Eigen::VectorXd y = y0;
        const double f = descend(eval, y, 1500);
        if (f < best_f) {
            best_f = f;
            best_y = y;
        }
    }

    OracleSolution out;
    eval(best_y, nullptr);
    out.X = {quat_to_rotation(Quat(best_y.head<4>())), u_best.head<3>()};
    out.Z = {quat_to_rotation(Quat(best_y.tail<4>())), u_best.tail<3>()};
    out.has_Z = true;
    out.residual = std::sqrt(std::max(best_f, 0.0));
    return out;
}

} // namespace handeye
