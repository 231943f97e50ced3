#pragma once

#include <string>
#include <utility>
#include <vector>

#include "handeye/dual.hpp"

namespace handeye {

// Thresholds applied to every ingested homogeneous matrix. The loose
// orthonormality default admits 4-decimal rounded rotation blocks.
struct PoseValidation {
    double row_tol = 1e-9;
    double ortho_tol = 1e-3;
};

// Splits a homogeneous matrix into a Pose without projecting the rotation
// block. Throws MalformedInput when the bottom row deviates from (0,0,0,1),
// NotARotation when the rotation block fails the orthonormality check.
Pose validate_homogeneous(const Mat4& T, const PoseValidation& v = {});

struct PosePairFile {
    int format_version = 1;
    std::vector<std::pair<Pose, Pose>> pairs;
};

// JSON schema: {"format_version": 1, "pairs": [{"A": 4x4 rows, "B": 4x4 rows}]}.
PosePairFile read_pose_pairs(const std::string& path, const PoseValidation& v = {});
void write_pose_pairs(const std::string& path,
                      const std::vector<std::pair<Pose, Pose>>& pairs);

struct ResultFile {
    int format_version = 1;
    std::string equation;  // "axxb" or "axzb"
    Mat4 X = Mat4::Identity();
    bool has_Z = false;
    Mat4 Z = Mat4::Identity();
    std::string branch;  // "noiseless" or "noisy"
    double lambda0 = 0.0;  // axxb rotation-stage value
    double sigma1 = 0.0;   // axzb rotation-stage value
    int multiplicity = 0;
    double residual_standard = 0.0;
    double residual_infinitesimal = 0.0;
    double gamma = 0.0;
};

std::string result_to_json(const ResultFile& r);
void write_result(const std::string& path, const ResultFile& r);

} // namespace handeye
