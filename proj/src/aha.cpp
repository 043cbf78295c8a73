#include "lvmorph/aha.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lvm {

namespace {

constexpr double kApexCapFraction = 0.15;  // most distal share of the axial extent

double axial_extent(const TriangleMesh& mesh, const Vec3& dir) {
    const Eigen::VectorXd t = mesh.vertices * dir;
    return t.maxCoeff() - t.minCoeff();
}

void validate_landmarks(const Landmarks& lm) {
    const Vec3 axis = lm.apex - lm.base_centroid;
    if (axis.norm() < 1e-12) throw std::invalid_argument("landmarks: apex equals base centroid");
    const Vec3 d = axis.normalized();
    for (const Vec3& s : lm.septal) {
        const Vec3 rel = s - lm.base_centroid;
        if ((rel - rel.dot(d) * d).norm() < 1e-9)
            throw std::invalid_argument("landmarks: septal point colinear with the long axis");
    }
}

}  // namespace

std::string artery_name(Artery a) {
    switch (a) {
        case Artery::LAD: return "LAD";
        case Artery::RCA: return "RCA";
        case Artery::LCX: return "LCX";
    }
    throw std::logic_error("unreachable");
}

LongAxis compute_long_axis(const TriangleMesh& mesh, const Landmarks& landmarks) {
    validate_landmarks(landmarks);
    LongAxis axis;
    axis.direction = (landmarks.apex - landmarks.base_centroid).normalized();
    axis.extent = axial_extent(mesh, axis.direction);
    return axis;
}

LongAxis compute_long_axis(const TriangleMesh& mesh) {
    const Eigen::RowVector3d mean = mesh.vertices.colwise().mean();
    const Points centered = mesh.vertices.rowwise() - mean;
    const Eigen::Matrix3d cov =
        centered.transpose() * centered / static_cast<double>(mesh.vertex_count());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    const Eigen::Vector3d evals = es.eigenvalues();  // ascending
    if (evals[2] < 1.05 * evals[1])
        throw std::invalid_argument(
            "long axis ambiguous: two near-equal leading covariance eigenvalues; supply landmarks");

    LongAxis axis;
    axis.direction = es.eigenvectors().col(2).normalized();
    // Orient toward the farther extreme so the apex side is positive.
    const Eigen::VectorXd t = centered * axis.direction;
    if (std::abs(t.minCoeff()) > std::abs(t.maxCoeff())) axis.direction = -axis.direction;
    axis.extent = axial_extent(mesh, axis.direction);
    return axis;
}

SegmentLabeling partition_17(const TriangleMesh& mesh, const Landmarks& landmarks) {
    validate_landmarks(landmarks);
    const Vec3 d = (landmarks.apex - landmarks.base_centroid).normalized();
    Vec3 ref = landmarks.septal[0] - landmarks.base_centroid;
    ref = (ref - ref.dot(d) * d).normalized();
    const Vec3 ortho = d.cross(ref);

    const Eigen::VectorXd t =
        (mesh.vertices.rowwise() - landmarks.base_centroid.transpose()) * d;
    const double t_lo = t.minCoeff(), t_hi = t.maxCoeff();
    const double span = t_hi - t_lo;
    if (!(span > 0)) throw std::invalid_argument("mesh has no extent along the long axis");
    const double cap_start = t_lo + (1.0 - kApexCapFraction) * span;

    SegmentLabeling out;
    out.segment_of_vertex.resize(static_cast<size_t>(mesh.vertex_count()));
    for (Eigen::Index v = 0; v < mesh.vertex_count(); ++v) {
        int segment;
        if (t[v] >= cap_start) {
            segment = 17;
        } else {
            const int band = std::min(2, static_cast<int>(3.0 * (t[v] - t_lo) / (cap_start - t_lo)));
            const Vec3 rel = mesh.vertices.row(v).transpose() - landmarks.base_centroid;
            double phi = std::atan2(rel.dot(ortho), rel.dot(ref));
            if (phi < 0) phi += 2.0 * EIGEN_PI;
            if (band < 2) {
                const int sector = std::min(5, static_cast<int>(phi / (EIGEN_PI / 3.0)));
                segment = (band == 0 ? 1 : 7) + sector;
            } else {
                const int sector = std::min(3, static_cast<int>(phi / (EIGEN_PI / 2.0)));
                segment = 13 + sector;
            }
        }
        out.segment_of_vertex[static_cast<size_t>(v)] = segment;
        out.segment_vertices[static_cast<size_t>(segment - 1)].push_back(static_cast<int>(v));
    }
    return out;
}

Artery territory_of(int segment_id) {
    switch (segment_id) {
        case 1: case 2: case 7: case 8: case 13: case 14: case 17: return Artery::LAD;
        case 3: case 4: case 9: case 10: case 15: return Artery::RCA;
        case 5: case 6: case 11: case 12: case 16: return Artery::LCX;
        default: throw std::invalid_argument("segment id must be in 1..17");
    }
}

Landmarks landmarks_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": invalid JSON: " + e.what());
    }
    Landmarks lm;
    for (int a = 0; a < 3; ++a) {
        lm.apex[a] = j.at("apex").at(a).get<double>();
        lm.base_centroid[a] = j.at("base").at(a).get<double>();
        for (int s = 0; s < 3; ++s) lm.septal[s][a] = j.at("septal").at(s).at(a).get<double>();
    }
    validate_landmarks(lm);
    return lm;
}

void save_labeling_csv(const SegmentLabeling& labeling, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "vertex_id,segment_id,artery\n";
    for (size_t v = 0; v < labeling.segment_of_vertex.size(); ++v) {
        const int s = labeling.segment_of_vertex[v];
        out << v << ',' << s << ',' << artery_name(territory_of(s)) << '\n';
    }
}

SegmentLabeling load_labeling_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    SegmentLabeling out;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string vtok, stok;
        if (!std::getline(ls, vtok, ',') || !std::getline(ls, stok, ','))
            throw std::runtime_error(path + ": malformed labeling row '" + line + "'");
        const int v = std::stoi(vtok), s = std::stoi(stok);
        if (s < 1 || s > 17) throw std::runtime_error(path + ": segment id out of range");
        if (static_cast<size_t>(v) >= out.segment_of_vertex.size())
            out.segment_of_vertex.resize(static_cast<size_t>(v) + 1, 0);
        out.segment_of_vertex[static_cast<size_t>(v)] = s;
        out.segment_vertices[static_cast<size_t>(s - 1)].push_back(v);
    }
    return out;
}

}  // namespace lvm
