#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "handeye/axxb.hpp"
#include "handeye/axzb.hpp"

namespace handeye {

struct GroundTruth {
    Pose X;
    Pose Z;
};

struct NoiseModel {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

// Built-in benchmark scenario: a fixed hand-eye/robot-world ground truth with
// four sensor motions, published to 4 decimals, plus a parallel-axis variant
// whose four motions all rotate about (0,0,1).
GroundTruth benchmark_ground_truth();
std::vector<Pose> benchmark_nonparallel_As();
std::vector<Pose> benchmark_parallel_As();

// Random exact scenario: unit-norm rotations drawn uniformly, translations
// uniform in [-0.1, 0.1]^3, redrawn (bounded retries) until the instance is
// well-conditioned: second-smallest eigenvalue of the motion L11 and the gap
// n - sigma2 of the measurement K11 both at least 0.3. Deterministic in seed.
struct RandomFixture {
    GroundTruth gt;
    std::vector<Pose> A;
};

RandomFixture random_fixture(int n, std::uint64_t seed);

// B = Z^-1 A X by exact homogeneous algebra, paired with its A.
std::vector<std::pair<Pose, Pose>> make_pose_pairs(const GroundTruth& gt,
                                                   const std::vector<Pose>& A);

// Pose pairs converted to dual quaternions. ortho_tol admits 4-decimal
// rounded rotation blocks (default 1e-3).
MeasurementSet to_measurements(const std::vector<std::pair<Pose, Pose>>& pairs,
                               double ortho_tol = 1e-3);

MeasurementSet make_measurements(const GroundTruth& gt, const std::vector<Pose>& A,
                                 double ortho_tol = 1e-3);

// All n(n-1)/2 relative motions (a_i* a_j, b_i* b_j) for i < j, formed at the
// dual-quaternion level where inversion is conjugation. Throws
// TooFewMeasurements for n < 2.
MotionSet make_motions(const MeasurementSet& meas);

// Additive Gaussian noise: q <- normalize(q + dq), dq ~ N(0, sigma^2 I4) on
// the rotation quaternion, t <- t + dt, dt ~ N(0, sigma^2 I3). sigma = 0
// returns the input bitwise. Deterministic in nm.seed.
Pose perturb_pose(const Pose& T, const NoiseModel& nm, double ortho_tol = 1e-3);

// Frobenius norm of the difference of homogeneous matrices.
double estimation_error(const Pose& X, const Pose& ref);

// Slides the solution along the common rotation axis (a zero-angle screw,
// which commutes with every motion about that axis) so the translation
// component along the axis becomes zero. The two-pose overload applies the
// same slide to both so the pair remains residual-equivalent.
Pose canonicalize_parallel(const Pose& X, const Vec3& axis);
std::pair<Pose, Pose> canonicalize_parallel(const Pose& X, const Pose& Z, const Vec3& axis);

struct SweepConfig {
    enum class Equation { axxb, axzb };
    Equation equation = Equation::axxb;
    double sigma_max = 0.02;
    double sigma_step = 0.002;
    int runs = 10;
    std::uint64_t seed = 0;
    SolveOptions options;
};

struct SweepRow {
    double sigma = 0.0;
    double mean_e_X = 0.0;
    double mean_e_Z = 0.0;
    int runs = 0;
};

// Noise-robustness experiment on the benchmark nonparallel scenario: for each
// sigma in {0, step, ..., max}, `runs` seeded runs perturb the B poses only,
// rebuild measurements (and motions for the single-unknown equation), solve,
// and average the estimation errors. Deterministic for a fixed seed.
std::vector<SweepRow> robustness_sweep(const SweepConfig& cfg);

// Header `sigma,mean_e_X,mean_e_Z,runs`, one row per sigma, 12 significant
// digits.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

std::vector<std::pair<Pose, Pose>> to_pose_pairs(const MotionSet& set,
                                                 double unit_tol = 1e-8);

// sqrt of sum ||A X - X B||_F^2 (resp. ||A X - Z B||_F^2) over the pairs.
double homogeneous_residual_axxb(const std::vector<std::pair<Pose, Pose>>& pairs,
                                 const Pose& X);
double homogeneous_residual_axzb(const std::vector<std::pair<Pose, Pose>>& pairs,
                                 const Pose& X, const Pose& Z);

// Independent cross-check: multi-start projected nonlinear least squares on
// the homogeneous-matrix residual, directly over unit quaternions with the
// translations eliminated by linear least squares at every step. Extra warm
// starts may be supplied on top of the seeded random ones.
struct OracleSolution {
    Pose X;
    Pose Z;       // meaningful only when has_Z
    bool has_Z = false;
    double residual = 0.0;
};

OracleSolution oracle_solve_axxb(const MotionSet& motions, int starts = 64,
                                 std::uint64_t seed = 0,
                                 const std::vector<Pose>& warm = {});
OracleSolution oracle_solve_axzb(const MeasurementSet& meas, int starts = 64,
                                 std::uint64_t seed = 0,
                                 const std::vector<std::pair<Pose, Pose>>& warm = {});

} // namespace handeye
