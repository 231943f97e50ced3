#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "handeye/harness.hpp"

using namespace handeye;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Benchmark measurements with Gaussian noise applied to the B poses only.
MeasurementSet noisy_benchmark(double sigma, std::uint64_t seed) {
    const auto pairs = make_pose_pairs(benchmark_ground_truth(), benchmark_nonparallel_As());
    MeasurementSet meas;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Pose Bp = perturb_pose(pairs[i].second, {sigma, seed * 977ULL + i});
        meas.push_back({pose_to_dq(pairs[i].first, 1e-3), pose_to_dq(Bp, 1e-3)});
    }
    return meas;
}

Outcome criterion_exact_recovery() {
    double worst_e = 0.0, worst_ms = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const RandomFixture fix = random_fixture(4, seed);
        const MeasurementSet meas = make_measurements(fix.gt, fix.A);

        auto t0 = std::chrono::steady_clock::now();
        const AxzbSolution sz = axzb::solve(meas);
        worst_ms = std::max(worst_ms, ms_since(t0));
        worst_e = std::max(worst_e, estimation_error(dq_to_pose(sz.x), fix.gt.X));
        worst_e = std::max(worst_e, estimation_error(dq_to_pose(sz.z), fix.gt.Z));

        const MotionSet motions = make_motions(meas);
        t0 = std::chrono::steady_clock::now();
        const AxxbSolution sx = axxb::solve(motions);
        worst_ms = std::max(worst_ms, ms_since(t0));
        worst_e = std::max(worst_e, estimation_error(dq_to_pose(sx.x), fix.gt.X));
    }
    Outcome o;
    o.pass = worst_e <= 1e-6 && worst_ms <= 50.0;
    o.detail = fmt("100 instances, worst error %.3g (bound 1e-6), worst solve %.2f ms (bound 50)",
                   worst_e, worst_ms);
    return o;
}

Outcome criterion_benchmark_axxb() {
    const MeasurementSet meas =
        make_measurements(benchmark_ground_truth(), benchmark_nonparallel_As());
    const AxxbSolution sol = axxb::solve(make_motions(meas));
    const double e = estimation_error(dq_to_pose(sol.x), benchmark_ground_truth().X);
    Outcome o;
    o.pass = e <= 0.01 && sol.branch == Branch::noiseless;
    o.detail = fmt("e_X %.6f (bound 0.01), branch %s", e,
                   sol.branch == Branch::noiseless ? "noiseless" : "noisy");
    return o;
}

Outcome criterion_benchmark_axzb() {
    const GroundTruth gt = benchmark_ground_truth();
    const AxzbSolution sol = axzb::solve(make_measurements(gt, benchmark_nonparallel_As()));
    const double ex = estimation_error(dq_to_pose(sol.x), gt.X);
    const double ez = estimation_error(dq_to_pose(sol.z), gt.Z);
    Outcome o;
    o.pass = ex <= 0.01 && ez <= 0.05 && sol.branch == Branch::noiseless;
    o.detail = fmt("e_X %.6f (bound 0.01), e_Z %.6f (bound 0.05)", ex, ez);
    return o;
}

Outcome criterion_parallel() {
    const GroundTruth gt = benchmark_ground_truth();
    const Vec3 axis(0.0, 0.0, 1.0);
    const MeasurementSet meas = make_measurements(gt, benchmark_parallel_As());

    const AxxbSolution sx = axxb::solve(make_motions(meas));
    const Pose X1 = canonicalize_parallel(dq_to_pose(sx.x), axis);
    const double ex1 = estimation_error(X1, gt.X);

    const AxzbSolution sz = axzb::solve(meas);
    const auto [X2, Z2] = canonicalize_parallel(dq_to_pose(sz.x), dq_to_pose(sz.z), axis);
    const double ex2 = estimation_error(X2, gt.X);
    const double ez2 = estimation_error(Z2, gt.Z);

    Outcome o;
    o.pass = ex1 <= 0.05 && ex2 <= 0.05 && ez2 <= 0.1 && sx.multiplicity == 2 &&
             sz.multiplicity == 2;
    o.detail = fmt("single-unknown e_X %.6f (bound 0.05) k=%d; coupled e_X %.6f (0.05) "
                   "e_Z %.6f (0.1) k=%d",
                   ex1, sx.multiplicity, ex2, ez2, sz.multiplicity);
    return o;
}

Outcome criterion_branch() {
    double worst_lambda0 = 0.0, worst_gap = 0.0;
    bool exact_ok = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const RandomFixture fix = random_fixture(4, seed);
        const MeasurementSet meas = make_measurements(fix.gt, fix.A);
        const AxzbSolution sz = axzb::solve(meas);
        const AxxbSolution sx = axxb::solve(make_motions(meas));
        worst_lambda0 = std::max(worst_lambda0, sx.lambda0);
        worst_gap = std::max(worst_gap, 4.0 - sz.sigma1);
        exact_ok = exact_ok && sx.lambda0 <= 1e-10 && (4.0 - sz.sigma1) <= 1e-10 &&
                   sx.branch == Branch::noiseless && sz.branch == Branch::noiseless;
    }

    // 100 noisy trials per equation, spread over sigma 0.002..0.02.
    int noisy_xx = 0, noisy_xz = 0;
    int trial = 0;
    for (int s = 1; s <= 10; ++s) {
        const double sigma = 0.002 * s;
        for (int run = 0; run < 10; ++run, ++trial) {
            const MeasurementSet meas = noisy_benchmark(sigma, 40000 + trial);
            if (axzb::solve(meas).branch == Branch::noisy) ++noisy_xz;
            if (axxb::solve(make_motions(meas)).branch == Branch::noisy) ++noisy_xx;
        }
    }

    Outcome o;
    o.pass = exact_ok && noisy_xx >= 95 && noisy_xz >= 95;
    o.detail = fmt("exact: worst lambda0 %.3g, worst n-sigma1 %.3g (bounds 1e-10); "
                   "noisy branch %d/100 and %d/100 (bound 95)",
                   worst_lambda0, worst_gap, noisy_xx, noisy_xz);
    return o;
}

Outcome criterion_oracle() {
    const double sigmas[3] = {0.005, 0.01, 0.02};
    double worst_rel = 0.0;
    int checked = 0;
    for (int i = 0; i < 20; ++i) {
        const double sigma = sigmas[i % 3];
        const RandomFixture fix = random_fixture(4, 2000 + i);
        const auto pairs = make_pose_pairs(fix.gt, fix.A);
        MeasurementSet meas;
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            const Pose Bp = perturb_pose(pairs[j].second, {sigma, 9000ULL + 31ULL * i + j});
            meas.push_back({pose_to_dq(pairs[j].first), pose_to_dq(Bp)});
        }

        {
            const MotionSet motions = make_motions(meas);
            const AxxbSolution sol = axxb::solve(motions);
            const Pose X = dq_to_pose(sol.x);
            const double rs = homogeneous_residual_axxb(to_pose_pairs(motions), X);
            const OracleSolution orc = oracle_solve_axxb(motions, 64, 77000 + i, {X});
            worst_rel = std::max(worst_rel, std::abs(rs - orc.residual) /
                                                std::max(orc.residual, 1e-12));
            ++checked;
        }
        {
            const AxzbSolution sol = axzb::solve(meas);
            const Pose X = dq_to_pose(sol.x);
            const Pose Z = dq_to_pose(sol.z);
            const double rs = homogeneous_residual_axzb(to_pose_pairs(meas), X, Z);
            const OracleSolution orc = oracle_solve_axzb(meas, 64, 88000 + i, {{X, Z}});
            worst_rel = std::max(worst_rel, std::abs(rs - orc.residual) /
                                                std::max(orc.residual, 1e-12));
            ++checked;
        }
    }
    Outcome o;
    o.pass = worst_rel <= 1e-4;
    o.detail = fmt("%d solver-vs-oracle comparisons, worst relative gap %.3g (bound 1e-4)",
                   checked, worst_rel);
    return o;
}

Outcome criterion_invariants() {
    std::mt19937_64 gen(7);
    auto uni = [&]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    auto rand_quat = [&]() {
        Quat q;
        for (int i = 0; i < 4; ++i) q(i) = uni();
        return q;
    };
    auto rand_unit_dq = [&]() {
        DualQuaternion d;
        d.st = rand_quat().normalized();
        const Quat t(0.0, uni(), uni(), uni());
        d.in = 0.5 * multiply(t, d.st);
        return d;
    };

    double worst = 0.0;
    auto track = [&](double v) { worst = std::max(worst, std::abs(v)); };

    for (int it = 0; it < 1000; ++it) {
        const Quat a = rand_quat(), b = rand_quat();
        track((multiply(a, b) - left_matrix(a) * b).cwiseAbs().maxCoeff());
        track((multiply(a, b) - right_matrix(b) * a).cwiseAbs().maxCoeff());
        track((left_matrix(conjugate(a)) - left_matrix(a).transpose()).cwiseAbs().maxCoeff());
        track((right_matrix(conjugate(b)) - right_matrix(b).transpose()).cwiseAbs().maxCoeff());
        track(scalar_part(multiply(conjugate(a), b)) - a.dot(b));

        // Scalar parts survive unit conjugation.
        const Quat q = rand_quat().normalized();
        track(scalar_part(multiply(multiply(q, a), conjugate(q))) - scalar_part(a));

        // Orthogonality is preserved under shared left multiplication.
        Quat c = rand_quat();
        c -= (a.dot(c) / a.dot(a)) * a;
        track(scalar_part(multiply(conjugate(multiply(q, a)), multiply(q, c))));

        // Dual-number order: totality, antisymmetry, |.| >= 0.
        const DualNumber p{uni(), uni()}, r{uni(), uni()};
        const Ordering o1 = dn_compare(p, r), o2 = dn_compare(r, p);
        if ((o1 == Ordering::less && o2 != Ordering::greater) ||
            (o1 == Ordering::greater && o2 != Ordering::less) ||
            (o1 == Ordering::equal && o2 != Ordering::equal))
            track(1.0);
        if (dn_less(dn_abs(p), DualNumber{0.0, 0.0})) track(1.0);

        // Single-unknown quadratic forms against direct residual norms.
        MotionSet motions;
        for (int m = 0; m < 3; ++m) motions.push_back({rand_unit_dq(), rand_unit_dq()});
        const DualQuaternion x = rand_unit_dq();
        const AxxbMatrices L = axxb::build_matrices(motions);
        std::vector<DualQuaternion> res;
        for (const auto& m : motions)
            res.push_back(dq_sub(dq_multiply(m.a, x), dq_multiply(x, m.b)));
        double st2 = 0.0, in2 = 0.0;
        for (const auto& f : res) {
            st2 += f.st.squaredNorm();
            in2 += f.in.squaredNorm();
        }
        track(st2 - x.st.dot(L.L11 * x.st));
        track(in2 - (x.in.dot(L.L11 * x.in) + 2.0 * x.in.dot(L.L12 * x.st) +
                     x.st.dot(L.L22 * x.st)));

        // Coupled rotation identity |a_st x_st - z_st b_st|^2 = 2n - 2 x^T K11 z.
        const DualQuaternion z = rand_unit_dq();
        const AxzbMatrices K = axzb::build_matrices(motions);
        double g2 = 0.0;
        for (const auto& m : motions)
            g2 += (multiply(m.a.st, x.st) - multiply(z.st, m.b.st)).squaredNorm();
        track(g2 - (2.0 * K.n - 2.0 * x.st.dot(K.K11 * z.st)));

        // Dual 2-norm agrees with its componentwise definition.
        const DualNumber nrm = dqvec_norm(res);
        double cross = 0.0;
        for (const auto& f : res) cross += f.st.dot(f.in);
        track(nrm.st - std::sqrt(st2));
        track(nrm.in - cross / std::sqrt(st2));
    }

    Outcome o;
    o.pass = worst <= 1e-10;
    o.detail = fmt("1000 random instances per identity, worst deviation %.3g (bound 1e-10)", worst);
    return o;
}

Outcome criterion_sweep() {
    SweepConfig cfg;
    cfg.seed = 1;
    cfg.equation = SweepConfig::Equation::axxb;
    const auto rx = robustness_sweep(cfg);
    cfg.equation = SweepConfig::Equation::axzb;
    const auto rz = robustness_sweep(cfg);

    bool ok = rx.size() == 11 && rz.size() == 11;
    std::string why;
    if (ok) {
        ok = ok && rx[0].mean_e_X <= 0.01;
        ok = ok && rz[0].mean_e_X <= 0.01 && rz[0].mean_e_Z <= 0.05;
        auto finite = [](double v) { return std::isfinite(v); };
        ok = ok && finite(rx[10].mean_e_X) && rx[10].mean_e_X > rx[1].mean_e_X;
        ok = ok && finite(rz[10].mean_e_X) && rz[10].mean_e_X > rz[1].mean_e_X;
        ok = ok && finite(rz[10].mean_e_Z) && rz[10].mean_e_Z > rz[1].mean_e_Z;
        why = fmt("11 rows; sigma=0 floors e_X %.4g / e_X %.4g, e_Z %.4g; "
                  "e_X(0.02)/e_X(0.002) = %.3g/%.3g and %.3g/%.3g",
                  rx[0].mean_e_X, rz[0].mean_e_X, rz[0].mean_e_Z, rx[10].mean_e_X,
                  rx[1].mean_e_X, rz[10].mean_e_X, rz[1].mean_e_X);
    } else {
        why = fmt("row counts %zu and %zu (expected 11)", rx.size(), rz.size());
    }
    Outcome o;
    o.pass = ok;
    o.detail = why;
    return o;
}

} // namespace

int main() {
    struct Entry {
        const char* name;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {"exact recovery at 1e-6 within 50 ms", criterion_exact_recovery},
        {"benchmark nonparallel, single-unknown accuracy", criterion_benchmark_axxb},
        {"benchmark nonparallel, coupled-unknowns accuracy", criterion_benchmark_axzb},
        {"benchmark parallel-axis accuracy after canonicalization", criterion_parallel},
        {"branch selection on exact and noisy data", criterion_branch},
        {"solver residual matches nonlinear least-squares oracle", criterion_oracle},
        {"quaternion and dual-number algebra invariants", criterion_invariants},
        {"noise-robustness sweep shape and floors", criterion_sweep},
    };

    int failures = 0;
    int id = 1;
    for (const auto& e : entries) {
        const Outcome o = e.fn();
        std::printf("[%s] criterion %d: %s - %s\n", o.pass ? "PASS" : "FAIL", id, e.name,
                    o.detail.c_str());
        if (!o.pass) ++failures;
        ++id;
    }
    std::printf("%d/8 criteria passed\n", 8 - failures);
    return failures;
}
