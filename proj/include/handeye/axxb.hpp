#pragma once

#include "handeye/dual.hpp"
#include "handeye/spectral.hpp"

namespace handeye {

// Quadratic-form data of the single-unknown equation a x = x b over a motion
// set. With D_i = M(a_i,st) - W(b_i,st) and E_i = M(a_i,in) - W(b_i,in):
//   L11 = sum D_i^T D_i,  L12 = sum D_i^T E_i,  L22 = sum E_i^T E_i,
// so the stacked residual satisfies
//   |f_st|^2 = x_st^T L11 x_st,
//   |f_in|^2 = x_in^T L11 x_in + 2 x_in^T L12 x_st + x_st^T L22 x_st.
struct AxxbMatrices {
    Mat4 L11 = Mat4::Zero();
    Mat4 L22 = Mat4::Zero();
    Mat4 L12 = Mat4::Zero();
    int n = 0;
};

struct AxxbSolution {
    DualQuaternion x;
    Branch branch = Branch::noiseless;
    double lambda0 = 0.0;
    int multiplicity = 0;
    DualNumber residual;  // of the sign-resolved motion set
    double gamma = 0.0;
};

namespace axxb {

AxxbMatrices build_matrices(const MotionSet& motions);

// Minimal eigenpair of L11 with its near-degenerate cluster. The data is
// rotationwise noiseless iff lambda0 <= tol_noiseless * n.
struct RotationStage {
    SpectralBasis basis;
    bool noiseless = false;
};

RotationStage rotation_stage(const AxxbMatrices& L, double tol_noiseless,
                             double cluster_tol = 1e-8);

// Noiseless branch: minimize over unit y and x_in with Qy ⟂ x_in
//   x_in^T (L11 + γI) x_in + 2 x_in^T L12 Q y + y^T Q^T (L22 + γI) Q y,
// the translation objective with γ-regularization restricted to the rotation
// nullspace; x_st = Q y.
DualQuaternion solve_noiseless(const AxxbMatrices& L, const SpectralBasis& Q, double gamma);

// Noisy branch: x_st = Q * (unit minimal eigenvector of Sym(Q^T L12 Q)), then
// the translation patch  min x_in^T L11 x_in + 2 x_in^T L12 x_st  subject to
// x_st ⟂ x_in, solved through its KKT system.
DualQuaternion solve_noisy(const AxxbMatrices& L, const SpectralBasis& Q);

// Full pipeline: validates units, resolves relative signs, builds L, branches
// on the rotation stage, canonicalizes the global sign of the result.
AxxbSolution solve(const MotionSet& motions, const SolveOptions& opt = {});

} // namespace axxb
} // namespace handeye
