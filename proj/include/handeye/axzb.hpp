#pragma once

#include "handeye/dual.hpp"
#include "handeye/spectral.hpp"

namespace handeye {

// Quadratic-form data of the two-unknown equation a x = z b over a
// measurement set:
//   K11 = sum M(a_st)^T W(b_st),   K12 = sum M(a_st)^T W(b_in),
//   K21 = sum M(a_in)^T W(b_st),   P   = sum M(a_st)^T M(a_in),
//   S   = sum W(b_st)^T W(b_in).
// For unit x_st, z_st the rotation residual satisfies
//   |a_st x_st - z_st b_st|^2 (stacked) = 2n - 2 x_st^T K11 z_st.
struct AxzbMatrices {
    Mat4 K11 = Mat4::Zero();
    Mat4 K12 = Mat4::Zero();
    Mat4 K21 = Mat4::Zero();
    Mat4 P = Mat4::Zero();
    Mat4 S = Mat4::Zero();
    int n = 0;
};

struct AxzbSolution {
    DualQuaternion x;
    DualQuaternion z;
    Branch branch = Branch::noiseless;
    double sigma1 = 0.0;
    int multiplicity = 0;
    DualNumber residual;  // of the sign-resolved measurement set
    double gamma = 0.0;
};

namespace axzb {

AxzbMatrices build_matrices(const MeasurementSet& meas);

// SVD of K11 with the paired top singular bases (Q1, Q2). The data is
// rotationwise noiseless iff n - sigma1 <= tol_noiseless * n.
struct RotationStage {
    Svd4 svd;
    bool noiseless = false;
};

RotationStage rotation_stage(const AxzbMatrices& K, double tol_noiseless,
                             double cluster_tol = 1e-8);

// Noiseless branch: with x_st = Q1 y, z_st = Q2 y, minimize over unit y and
// the stacked translation vector w = (x_in, z_in), Q1 y ⟂ x_in, Q2 y ⟂ z_in:
//   sum_i |M(a_i,st) x_in - W(b_i,st) z_in + (M(a_i,in) Q1 - W(b_i,in) Q2) y|^2
//     + γ (|x_in|^2 + |z_in|^2 + 2).
// The inner Hessian is [[(n+γ)I, -K11], [-K11^T, (n+γ)I]], positive definite
// because sigma1 <= n < n + γ. Needs the measurement set for the y-only
// quadratic, which is not a function of the stored matrices.
std::pair<DualQuaternion, DualQuaternion> solve_noiseless(const AxzbMatrices& K,
                                                          const RotationStage& rot,
                                                          double gamma,
                                                          const MeasurementSet& meas);

// Noisy branch: y = unit maximal eigenvector of Sym(Q1^T (K12 + K21) Q2),
// x_st = Q1 y, z_st = Q2 y; translations from the patch QP with Hessian
// [[nI, -K11], [-K11^T, nI]], linear term (P x_st - K12 z_st,
// S z_st - K21^T x_st), and constraints x_st ⟂ x_in, z_st ⟂ z_in.
std::pair<DualQuaternion, DualQuaternion> solve_noisy(const AxzbMatrices& K,
                                                      const RotationStage& rot);

// Full pipeline: validates units, resolves relative signs, builds K, branches
// on the rotation stage, canonicalizes the joint sign of the pair by x.
AxzbSolution solve(const MeasurementSet& meas, const SolveOptions& opt = {});

} // namespace axzb
} // namespace handeye
