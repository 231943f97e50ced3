#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "handeye/spectral.hpp"

using namespace handeye;

namespace {

std::mt19937_64 rng(4242);

double uni() { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; }

Eigen::MatrixXd random_matrix(int r, int c) {
    Eigen::MatrixXd M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M(i, j) = uni();
    return M;
}

Eigen::MatrixXd random_spd(int n) {
    const Eigen::MatrixXd A = random_matrix(n, n);
    return A.transpose() * A + Eigen::MatrixXd::Identity(n, n);
}

// Null-space reference for the equality-constrained QP.
Eigen::VectorXd null_space_minimize(const Eigen::MatrixXd& H, const Eigen::VectorXd& c,
                                    const Eigen::MatrixXd& C) {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
    const Eigen::MatrixXd N = lu.kernel();
    const Eigen::VectorXd u = (N.transpose() * H * N).ldlt().solve(-N.transpose() * c);
    return N * u;
}

} // namespace

TEST_CASE("extremal eigenpair of a symmetric matrix") {
    SUBCASE("zero matrix clusters everything") {
        const SpectralBasis sb = sym_extremal_eig(Eigen::Matrix4d::Zero(), Extremum::min);
        CHECK(sb.value == 0.0);
        CHECK(sb.multiplicity == 4);
        CHECK((sb.basis.transpose() * sb.basis - Eigen::Matrix4d::Identity())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    }

    SUBCASE("diagonal matrix") {
        const Eigen::Vector4d d(0, 1, 2, 3);
        const SpectralBasis lo = sym_extremal_eig(d.asDiagonal(), Extremum::min);
        CHECK(lo.value == doctest::Approx(0.0));
        CHECK(lo.multiplicity == 1);
        CHECK((lo.basis.col(0) - Eigen::Vector4d::Unit(0)).norm() <= 1e-12);

        const SpectralBasis hi = sym_extremal_eig(d.asDiagonal(), Extremum::max);
        CHECK(hi.value == doctest::Approx(3.0));
        CHECK(hi.multiplicity == 1);
        CHECK((hi.basis.col(0) - Eigen::Vector4d::Unit(3)).norm() <= 1e-12);
    }

    SUBCASE("near-degenerate eigenvalues merge") {
        const Eigen::Vector4d d(0, 1e-12, 1, 2);
        const SpectralBasis sb = sym_extremal_eig(d.asDiagonal(), Extremum::min);
        CHECK(sb.multiplicity == 2);
    }

    SUBCASE("asymmetry is rejected") {
        Eigen::Matrix4d S = Eigen::Matrix4d::Zero();
        S(0, 1) = 1e-3;
        CHECK_THROWS_AS(sym_extremal_eig(S, Extremum::min), NotSymmetric);
    }

    SUBCASE("eigen equation and sign convention on random instances") {
        for (int it = 0; it < 200; ++it) {
            const Eigen::MatrixXd A = random_matrix(4, 4);
            const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
            for (const Extremum which : {Extremum::min, Extremum::max}) {
                const SpectralBasis sb = sym_extremal_eig(S, which);
                CHECK((S * sb.basis - sb.value * sb.basis).cwiseAbs().maxCoeff() <= 1e-8);
                CHECK((sb.basis.transpose() * sb.basis -
                       Eigen::MatrixXd::Identity(sb.multiplicity, sb.multiplicity))
                          .cwiseAbs()
                          .maxCoeff() <= 1e-10);
                for (int c = 0; c < sb.multiplicity; ++c) {
                    int imax = 0;
                    sb.basis.col(c).cwiseAbs().maxCoeff(&imax);
                    CHECK(sb.basis(imax, c) > 0.0);
                }
            }
            const double lo = sym_extremal_eig(S, Extremum::min).value;
            const double hi = sym_extremal_eig(S, Extremum::max).value;
            CHECK(lo <= hi);
        }
    }
}

TEST_CASE("4x4 singular value decomposition with paired bases") {
    SUBCASE("scaled identity clusters fully") {
        const Svd4 s = svd4(4.0 * Eigen::Matrix4d::Identity());
        CHECK(s.sigma(0) == doctest::Approx(4.0));
        CHECK(s.multiplicity == 4);
        CHECK((s.Q1 - s.Q2).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SUBCASE("reconstruction, ordering, pairing, signs") {
        for (int it = 0; it < 200; ++it) {
            const Eigen::Matrix4d K = random_matrix(4, 4);
            const Svd4 s = svd4(K);
            CHECK((s.U * s.sigma.asDiagonal() * s.V.transpose() - K).cwiseAbs().maxCoeff() <=
                  1e-10);
            CHECK((s.U.transpose() * s.U - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <=
                  1e-10);
            CHECK((s.V.transpose() * s.V - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <=
                  1e-10);
            for (int i = 0; i + 1 < 4; ++i) CHECK(s.sigma(i) >= s.sigma(i + 1));
            CHECK(s.sigma(3) >= 0.0);
            CHECK((K * s.Q2 - s.sigma(0) * s.Q1).cwiseAbs().maxCoeff() <=
                  1e-8 * std::max(1.0, s.sigma(0)));
            for (int c = 0; c < s.multiplicity; ++c) {
                int imax = 0;
                s.Q1.col(c).cwiseAbs().maxCoeff(&imax);
                CHECK(s.Q1(imax, c) > 0.0);
            }
        }
    }

    SUBCASE("orthogonal input keeps every singular value at one") {
        // A product of two orthogonal multiplication matrices stays orthogonal.
        const Eigen::Matrix4d K = random_matrix(4, 4).householderQr().householderQ();
        const Svd4 s = svd4(K);
        CHECK(std::abs(s.sigma(0) - 1.0) <= 1e-12);
        CHECK(std::abs(s.sigma(3) - 1.0) <= 1e-12);
        CHECK(s.multiplicity == 4);
    }
}

TEST_CASE("equality-constrained quadratic program") {
    SUBCASE("unconstrained direction of the gradient is removed") {
        const Eigen::MatrixXd H = Eigen::Matrix4d::Identity();
        Eigen::RowVector4d C(1, 0, 0, 0);
        const QPSolution zero = solve_eq_qp(H, Eigen::Vector4d::Zero(), C);
        CHECK(zero.w.norm() <= 1e-14);
        const QPSolution s = solve_eq_qp(H, -Eigen::Vector4d::Unit(0), C);
        CHECK(s.w.norm() <= 1e-12);
    }

    SUBCASE("matches the null-space reference on random instances") {
        for (int it = 0; it < 200; ++it) {
            const int n = 4 + (it % 5);
            const int r = 1 + (it % 2);
            const Eigen::MatrixXd H = random_spd(n);
            const Eigen::VectorXd c = random_matrix(n, 1);
            const Eigen::MatrixXd C = random_matrix(r, n);
            const QPSolution s = solve_eq_qp(H, c, C);
            CHECK((C * s.w).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((s.w - null_space_minimize(H, c, C)).cwiseAbs().maxCoeff() <= 1e-9);
            // Stationarity: the gradient is supported on the constraint rows.
            const Eigen::VectorXd g = H * s.w + c;
            const Eigen::VectorXd res = g + C.transpose() * s.lambda;
            CHECK(res.cwiseAbs().maxCoeff() <= 1e-10);
        }
    }

    SUBCASE("dependent constraint rows are rejected") {
        const Eigen::MatrixXd H = random_spd(4);
        Eigen::MatrixXd C(2, 4);
        C.row(0) << 1, 2, 3, 4;
        C.row(1) << 2, 4, 6, 8;
        CHECK_THROWS_AS(solve_eq_qp(H, Eigen::Vector4d::Zero(), C), SingularKKT);
    }
}

TEST_CASE("sphere-coupled minimization") {
    SUBCASE("one-dimensional sphere is the sign pair") {
        SphereCoupledProblem p;
        p.H = Eigen::Matrix4d::Identity();
        p.G = random_matrix(4, 1);
        p.T = random_matrix(1, 1);
        p.T(0, 0) = std::abs(p.T(0, 0));
        p.constraints.push_back({random_matrix(4, 1), 0});
        const SphereSolution s = solve_sphere_coupled(p);
        REQUIRE(s.y.size() == 1);
        CHECK(s.y(0) == 1.0);
        CHECK(s.value == doctest::Approx(sphere_objective(p, s.y)).epsilon(1e-12));
    }

    SUBCASE("rotated quadratic on the circle has a known minimizer") {
        const double theta = 0.7345;
        Eigen::Matrix2d R;
        R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        SphereCoupledProblem p;
        p.H = Eigen::Matrix2d::Identity();
        p.G = Eigen::MatrixXd::Zero(2, 2);
        p.T = R * Eigen::Vector2d(0.3, 1.7).asDiagonal() * R.transpose();
        const SphereSolution s = solve_sphere_coupled(p);
        const Eigen::Vector2d expected(std::cos(theta), std::sin(theta));
        CHECK(std::abs(std::abs(s.y.dot(expected)) - 1.0) <= 1e-8);
        CHECK(s.value == doctest::Approx(0.3).epsilon(1e-10));
    }

    SUBCASE("flat objective resolves to the first canonical direction") {
        SphereCoupledProblem p;
        p.H = Eigen::Matrix2d::Identity();
        p.G = Eigen::MatrixXd::Zero(2, 2);
        p.T = 0.9 * Eigen::Matrix2d::Identity();
        const SphereSolution s = solve_sphere_coupled(p);
        CHECK((s.y - Eigen::Vector2d(1, 0)).norm() <= 1e-12);
        CHECK(s.value == doctest::Approx(0.9).epsilon(1e-12));
    }

    SUBCASE("no deterministic sample beats the returned optimum") {
        for (int it = 0; it < 5; ++it) {
            SphereCoupledProblem p;
            p.H = random_spd(4);
            p.G = random_matrix(4, 3);
            const Eigen::MatrixXd A = random_matrix(3, 3);
            p.T = A.transpose() * A;
            p.constraints.push_back({random_matrix(4, 3), 0});
            const SphereSolution s = solve_sphere_coupled(p);

            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            for (int i = 0; i < 256; ++i) {
                const double z = 1.0 - 2.0 * (i + 0.5) / 256.0;
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                const Eigen::Vector3d y(r * std::cos(golden * i), r * std::sin(golden * i), z);
                CHECK(s.value <= sphere_objective(p, y) + 1e-8);
            }
        }
    }

    SUBCASE("envelope gradient agrees with finite differences") {
        for (int it = 0; it < 20; ++it) {
            SphereCoupledProblem p;
            p.H = random_spd(4);
            p.G = random_matrix(4, 3);
            const Eigen::MatrixXd A = random_matrix(3, 3);
            p.T = A.transpose() * A;
            p.constraints.push_back({random_matrix(4, 3), 0});

            const Eigen::Vector3d y = Eigen::Vector3d(uni(), uni(), uni()).normalized();
            Eigen::VectorXd grad;
            sphere_objective(p, y, &grad);
            const double h = 1e-6;
            for (int d = 0; d < 3; ++d) {
                const Eigen::VectorXd e = Eigen::Vector3d::Unit(d);
                const double fp = sphere_objective(p, y + h * e);
                const double fm = sphere_objective(p, y - h * e);
                const double fd = (fp - fm) / (2.0 * h);
                CHECK(std::abs(grad(d) - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}
