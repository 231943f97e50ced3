#include "handeye/spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace handeye {

namespace {

void fix_column_sign(Eigen::Ref<Eigen::VectorXd> col) {
    int idx = 0;
    col.cwiseAbs().maxCoeff(&idx);
    if (col(idx) < 0.0) col = -col;
}

double halton(std::size_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

double box_muller(double u1, double u2) {
    u1 = std::max(u1, 1e-15);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Deterministic unit-sphere candidate list for each outer dimension: the
// canonical basis directions first, then a space-filling set. phi(-y) =
// phi(y), so covering one hemisphere twice is merely redundant, not wrong.
std::vector<Eigen::VectorXd> sphere_samples(int k) {
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < k; ++i) pts.push_back(Eigen::VectorXd::Unit(k, i));
    if (k == 2) {
        const int n = 1024;
        for (int i = 0; i < n; ++i) {
            const double th = 2.0 * std::numbers::pi * i / n;
            pts.push_back(Eigen::Vector2d(std::cos(th), std::sin(th)));
        }
    } else if (k == 3) {
        const int n = 4096;
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < n; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / n;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            pts.push_back(Eigen::Vector3d(r * std::cos(golden * i), r * std::sin(golden * i), z));
        }
    } else if (k >= 4) {
        const int n = 4096;
        for (int i = 1; i <= n; ++i) {
            Eigen::VectorXd y(k);
            for (int d = 0; d + 1 < k; d += 2) {
                static const int bases[] = {2, 3, 5, 7, 11, 13};
                const double u1 = halton(static_cast<std::size_t>(i), bases[d]);
                const double u2 = halton(static_cast<std::size_t>(i), bases[d + 1]);
                y(d) = box_muller(u1, u2);
                y(d + 1) = std::sqrt(-2.0 * std::log(std::max(u1, 1e-15))) *
                           std::sin(2.0 * std::numbers::pi * u2);
            }
            if (k % 2 == 1) y(k - 1) = box_muller(halton(i, 17), halton(i, 19));
            const double nn = y.norm();
            if (nn < 1e-9) continue;
            pts.push_back(y / nn);
        }
    }
    return pts;
}

Eigen::MatrixXd stack_constraints(const SphereCoupledProblem& p, const Eigen::VectorXd& y) {
    const int m = static_cast<int>(p.H.rows());
    const int r = static_cast<int>(p.constraints.size());
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(r, m);
    for (int j = 0; j < r; ++j) {
        const auto& bc = p.constraints[j];
        C.block(j, bc.offset, 1, bc.B.rows()) = (bc.B * y).transpose();
    }
    return C;
}

} // namespace

SpectralBasis sym_extremal_eig(const Eigen::MatrixXd& S, Extremum which,
                               double cluster_tol, double sym_tol) {
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > sym_tol)
        throw NotSymmetric("sym_extremal_eig: input deviates from symmetry beyond tolerance");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(S));
    const Eigen::VectorXd vals = es.eigenvalues();  // ascending
    const int n = static_cast<int>(vals.size());

    SpectralBasis out;
    if (which == Extremum::min) {
        out.value = vals(0);
        const double tol = cluster_tol * std::max(1.0, std::abs(out.value));
        int k = 1;
        while (k < n && vals(k) - out.value <= tol) ++k;
        out.multiplicity = k;
        out.basis = es.eigenvectors().leftCols(k);
    } else {
        out.value = vals(n - 1);
        const double tol = cluster_tol * std::max(1.0, std::abs(out.value));
        int k = 1;
        while (k < n && out.value - vals(n - 1 - k) <= tol) ++k;
        out.multiplicity = k;
        out.basis.resize(n, k);
        for (int i = 0; i < k; ++i) out.basis.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    for (int i = 0; i < out.multiplicity; ++i) fix_column_sign(out.basis.col(i));
    return out;
}

Svd4 svd4(const Eigen::Matrix4d& K, double cluster_tol) {
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(K, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Svd4 out;
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    out.sigma = svd.singularValues();

    for (int i = 0; i < 4; ++i) {
        int idx = 0;
        out.U.col(i).cwiseAbs().maxCoeff(&idx);
        if (out.U(idx, i) < 0.0) {
            out.U.col(i) = -out.U.col(i);
            out.V.col(i) = -out.V.col(i);
        }
    }

    const double tol = cluster_tol * std::max(1.0, out.sigma(0));
    int k = 1;
    while (k < 4 && out.sigma(0) - out.sigma(k) <= tol) ++k;
    out.multiplicity = k;
    out.Q1 = out.U.leftCols(k);
    out.Q2 = out.V.leftCols(k);
    return out;
}

QPSolution solve_eq_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& c,
                       const Eigen::MatrixXd& C) {
    const int m = static_cast<int>(H.rows());
    const int r = static_cast<int>(C.rows());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + r, m + r);
    kkt.topLeftCorner(m, m) = H;
    kkt.topRightCorner(m, r) = C.transpose();
    kkt.bottomLeftCorner(r, m) = C;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + r);
    rhs.head(m) = -c;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible())
        throw SingularKKT("solve_eq_qp: KKT system is singular");
    const Eigen::VectorXd sol = lu.solve(rhs);

    QPSolution out;
    out.w = sol.head(m);
    out.lambda = sol.tail(r);
    return out;
}

double sphere_objective(const SphereCoupledProblem& p, const Eigen::VectorXd& y,
                        Eigen::VectorXd* grad, Eigen::VectorXd* w_out) {
    const Eigen::VectorXd c = p.G * y;
    const Eigen::MatrixXd C = stack_constraints(p, y);
    const QPSolution qp = solve_eq_qp(p.H, c, C);
    const double value = qp.w.dot(p.H * qp.w) + 2.0 * c.dot(qp.w) +
                         y.dot(p.T * y) + p.constant;
    if (grad) {
        Eigen::VectorXd g = 2.0 * p.G.transpose() * qp.w + 2.0 * p.T * y;
        for (std::size_t j = 0; j < p.constraints.size(); ++j) {
            const auto& bc = p.constraints[j];
            g += 2.0 * qp.lambda(static_cast<int>(j)) *
                 (bc.B.transpose() * qp.w.segment(bc.offset, bc.B.rows()));
        }
        *grad = g;
    }
    if (w_out) *w_out = qp.w;
    return value;
}

SphereSolution solve_sphere_coupled(const SphereCoupledProblem& p) {
    const int k = static_cast<int>(p.G.cols());
    SphereSolution best;
    best.value = std::numeric_limits<double>::infinity();

    if (k == 1) {
        best.y = Eigen::VectorXd::Ones(1);
        best.value = sphere_objective(p, best.y, nullptr, &best.w);
        return best;
    }

    for (const auto& y : sphere_samples(k)) {
        try {
            Eigen::VectorXd w;
            const double v = sphere_objective(p, y, nullptr, &w);
            if (v < best.value) {
                best.value = v;
                best.y = y;
                best.w = w;
            }
        } catch (const SingularKKT&) {
            // Degenerate candidate; skip it.
        }
    }
    if (!std::isfinite(best.value))
        throw SingularKKT("solve_sphere_coupled: every sampled candidate was degenerate");

    // On flat stretches of phi the sample winner is decided by roundoff;
    // prefer a canonical basis direction whenever one ties the best value, so
    // degenerate problems resolve deterministically (identity data maps to
    // the identity transform).
    const double tie = 1e-12 * std::max(1.0, std::abs(best.value));
    for (int i = 0; i < k; ++i) {
        const Eigen::VectorXd e = Eigen::VectorXd::Unit(k, i);
        try {
            Eigen::VectorXd w;
            const double v = sphere_objective(p, e, nullptr, &w);
            if (v <= best.value + tie) {
                best.value = v;
                best.y = e;
                best.w = w;
                break;
            }
        } catch (const SingularKKT&) {
        }
    }

    // Projected-gradient polish with Armijo backtracking.
    Eigen::VectorXd y = best.y;
    double value = best.value;
    double alpha = 1.0;
    for (int iter = 0; iter < 500; ++iter) {
        Eigen::VectorXd g, w;
        try {
            value = sphere_objective(p, y, &g, &w);
        } catch (const SingularKKT&) {
            break;
        }
        if (value < best.value) {
            best.value = value;
            best.y = y;
            best.w = w;
        }
        const Eigen::VectorXd pg = g - y.dot(g) * y;
        const double pgn2 = pg.squaredNorm();
        if (std::sqrt(pgn2) <= 1e-10) break;

        bool accepted = false;
        while (alpha > 1e-18) {
            Eigen::VectorXd yt = (y - alpha * pg).normalized();
            double vt;
            try {
                vt = sphere_objective(p, yt, nullptr, nullptr);
            } catch (const SingularKKT&) {
                alpha *= 0.5;
                continue;
            }
            if (vt <= value - 1e-4 * alpha * pgn2) {
                y = yt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        alpha = std::min(alpha * 2.0, 1e3);
    }

    Eigen::VectorXd w;
    try {
        const double v = sphere_objective(p, y, nullptr, &w);
        if (v < best.value) {
            best.value = v;
            best.y = y;
            best.w = w;
        }
    } catch (const SingularKKT&) {
    }
    return best;
}

} // namespace handeye
