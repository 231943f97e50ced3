#pragma once

#include <vector>

#include <Eigen/Dense>

#include "handeye/errors.hpp"

namespace handeye {

inline Eigen::MatrixXd sym(const Eigen::MatrixXd& M) {
    return 0.5 * (M + M.transpose());
}

enum class Extremum { min, max };

// Extremal eigenvalue of a symmetric matrix together with an orthonormal
// basis of the near-degenerate eigenspace: every eigenvalue within
// cluster_tol * max(1, |extremal|) of the extremal one joins the cluster.
struct SpectralBasis {
    double value = 0.0;
    int multiplicity = 0;
    Eigen::MatrixXd basis;  // n x multiplicity, basis.col(0) is extremal
};

// Throws NotSymmetric when max|S - S^T| > sym_tol. Basis columns are
// sign-fixed so the largest-magnitude entry of each column is positive.
SpectralBasis sym_extremal_eig(const Eigen::MatrixXd& S, Extremum which,
                               double cluster_tol = 1e-8, double sym_tol = 1e-10);

// Full SVD of a 4x4 matrix with the clustered top singular subspace exposed
// as paired bases: K * Q2 = sigma1 * Q1 column by column (up to the cluster
// spread). Singular values are descending; each (U, V) column pair is
// sign-fixed in tandem so the largest-magnitude entry of the U column is
// positive.
struct Svd4 {
    Eigen::Matrix4d U;
    Eigen::Vector4d sigma;
    Eigen::Matrix4d V;
    int multiplicity = 0;
    Eigen::MatrixXd Q1;  // 4 x multiplicity, leading columns of U
    Eigen::MatrixXd Q2;  // 4 x multiplicity, leading columns of V
};

Svd4 svd4(const Eigen::Matrix4d& K, double cluster_tol = 1e-8);

// minimize w^T H w + 2 c^T w subject to C w = 0, via the KKT system
//   [H C^T; C 0] [w; lambda] = [-c; 0].
// Throws SingularKKT when the KKT matrix is not invertible.
struct QPSolution {
    Eigen::VectorXd w;
    Eigen::VectorXd lambda;
};

QPSolution solve_eq_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& c,
                       const Eigen::MatrixXd& C);

// Constraint row of the coupled problem: (B y)^T applied to the w segment
// starting at offset, of length B.rows().
struct SphereBlockConstraint {
    Eigen::MatrixXd B;
    int offset = 0;
};

// minimize over unit y of
//   phi(y) = min_w { w^T H w + 2 (G y)^T w : C(y) w = 0 } + y^T T y + constant
// where C(y) stacks the block constraint rows. The inner problem is an
// equality-constrained QP; the outer problem is solved by deterministic
// sampling of the unit sphere followed by projected-gradient descent with
// Armijo backtracking, using the envelope gradient
//   grad phi = 2 G^T w + 2 T y + 2 sum_j lambda_j B_j^T w_j.
struct SphereCoupledProblem {
    Eigen::MatrixXd H;
    Eigen::MatrixXd G;
    Eigen::MatrixXd T;
    double constant = 0.0;
    std::vector<SphereBlockConstraint> constraints;
};

struct SphereSolution {
    Eigen::VectorXd y;
    Eigen::VectorXd w;
    double value = 0.0;
};

SphereSolution solve_sphere_coupled(const SphereCoupledProblem& p);

// phi(y) and its envelope gradient at one point; exposed for testing.
double sphere_objective(const SphereCoupledProblem& p, const Eigen::VectorXd& y,
                        Eigen::VectorXd* grad = nullptr, Eigen::VectorXd* w = nullptr);

} // namespace handeye
