#include "handeye/io.hpp"

#include <fstream>

#include <json.hpp>

namespace handeye {

namespace {

using nlohmann::json;

json matrix_to_json(const Mat4& M) {
    json rows = json::array();
    for (int i = 0; i < 4; ++i) {
        json row = json::array();
        for (int j = 0; j < 4; ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

Mat4 matrix_from_json(const json& rows, const std::string& what) {
    if (!rows.is_array() || rows.size() != 4)
        throw MalformedInput(what + ": expected 4 rows");
    Mat4 M;
    for (int i = 0; i < 4; ++i) {
        const json& row = rows[i];
        if (!row.is_array() || row.size() != 4)
            throw MalformedInput(what + ": expected 4 entries per row");
        for (int j = 0; j < 4; ++j) {
            if (!row[j].is_number())
                throw MalformedInput(what + ": matrix entries must be numbers");
            M(i, j) = row[j].get<double>();
        }
    }
    return M;
}

} // namespace

Pose validate_homogeneous(const Mat4& T, const PoseValidation& v) {
    const Eigen::RowVector4d bottom(0.0, 0.0, 0.0, 1.0);
    if ((T.row(3) - bottom).cwiseAbs().maxCoeff() > v.row_tol)
        throw MalformedInput("homogeneous matrix: bottom row must be (0,0,0,1)");
    const Mat3 R = T.topLeftCorner<3, 3>();
    if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > v.ortho_tol ||
        R.determinant() <= 0.0)
        throw NotARotation("homogeneous matrix: rotation block is not orthonormal within tolerance");
    Pose p;
    p.R = R;
    p.t = T.topRightCorner<3, 1>();
    return p;
}

PosePairFile read_pose_pairs(const std::string& path, const PoseValidation& v) {
    std::ifstream in(path);
    if (!in)
        throw MalformedInput("cannot open input file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw MalformedInput("JSON parse failure in " + path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array())
        throw MalformedInput(path + ": expected an object with a \"pairs\" array");

    PosePairFile out;
    if (doc.contains("format_version")) {
        if (!doc["format_version"].is_number_integer())
            throw MalformedInput(path + ": format_version must be an integer");
        out.format_version = doc["format_version"].get<int>();
    }
    int idx = 0;
    for (const json& rec : doc["pairs"]) {
        if (!rec.is_object() || !rec.contains("A") || !rec.contains("B"))
            throw MalformedInput(path + ": each pair needs \"A\" and \"B\" matrices");
        const std::string tag = "pair " + std::to_string(idx);
        const Pose a = validate_homogeneous(matrix_from_json(rec["A"], tag + " A"), v);
        const Pose b = validate_homogeneous(matrix_from_json(rec["B"], tag + " B"), v);
        out.pairs.push_back({a, b});
        ++idx;
    }
    return out;
}

void write_pose_pairs(const std::string& path,
                      const std::vector<std::pair<Pose, Pose>>& pairs) {
    json doc;
    doc["format_version"] = 1;
    doc["pairs"] = json::array();
    for (const auto& [a, b] : pairs) {
        json rec;
        rec["A"] = matrix_to_json(a.homogeneous());
        rec["B"] = matrix_to_json(b.homogeneous());
        doc["pairs"].push_back(rec);
    }
    std::ofstream out(path);
    if (!out)
        throw MalformedInput("cannot open output file: " + path);
    out << doc.dump(2) << '\n';
}

std::string result_to_json(const ResultFile& r) {
    json doc;
    doc["format_version"] = r.format_version;
    doc["equation"] = r.equation;
    doc["branch"] = r.branch;
    doc["multiplicity"] = r.multiplicity;
    doc["gamma"] = r.gamma;
    doc["residual_standard"] = r.residual_standard;
    doc["residual_infinitesimal"] = r.residual_infinitesimal;
    if (r.equation == "axzb")
        doc["sigma1"] = r.sigma1;
    else
        doc["lambda0"] = r.lambda0;
    doc["X"] = matrix_to_json(r.X);
    if (r.has_Z) doc["Z"] = matrix_to_json(r.Z);
    return doc.dump(2) + "\n";
}

void write_result(const std::string& path, const ResultFile& r) {
    std::ofstream out(path);
    if (!out)
        throw MalformedInput("cannot open output file: " + path);
    out << result_to_json(r);
}

} // namespace handeye
