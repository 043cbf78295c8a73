#include "lvmorph/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lvm {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

std::string next_content_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r\n") != std::string::npos) return line;
    }
    return {};
}

TriangleMesh from_arrays(const std::vector<Vec3>& verts, const std::vector<Eigen::Vector3i>& tris) {
    Points V(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t i = 0; i < verts.size(); ++i) V.row(static_cast<Eigen::Index>(i)) = verts[i];
    Faces F(static_cast<Eigen::Index>(tris.size()), 3);
    for (size_t i = 0; i < tris.size(); ++i) F.row(static_cast<Eigen::Index>(i)) = tris[i];
    return make_mesh(std::move(V), std::move(F));
}

TriangleMesh load_off(const std::string& path, std::istream& in) {
    std::string header = next_content_line(in);
    std::istringstream hs(header);
    std::string magic;
    hs >> magic;
    if (magic != "OFF") parse_fail(path, "missing OFF header");
    long nv = -1, nf = -1, ne = 0;
    {
        std::istringstream cs(next_content_line(in));
        if (!(cs >> nv >> nf >> ne) || nv < 0 || nf < 0) parse_fail(path, "bad OFF count line");
    }
    std::vector<Vec3> verts(static_cast<size_t>(nv));
    for (auto& v : verts) {
        std::istringstream vs(next_content_line(in));
        if (!(vs >> v.x() >> v.y() >> v.z())) parse_fail(path, "bad vertex line");
    }
    std::vector<Eigen::Vector3i> tris(static_cast<size_t>(nf));
    for (auto& t : tris) {
        std::istringstream fs(next_content_line(in));
        int n = 0;
        if (!(fs >> n) || n != 3) parse_fail(path, "only triangle faces are supported");
        if (!(fs >> t.x() >> t.y() >> t.z())) parse_fail(path, "bad face line");
    }
    return from_arrays(verts, tris);
}

TriangleMesh load_ply(const std::string& path, std::istream& in) {
    std::string line = next_content_line(in);
    if (line.substr(0, 3) != "ply") parse_fail(path, "missing ply header");
    long nv = -1, nf = -1;
    bool in_vertex_element = false;
    int vertex_props = 0;
    while (true) {
        line = next_content_line(in);
        if (line.empty()) parse_fail(path, "unterminated ply header");
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "ascii") parse_fail(path, "binary PLY is not supported; re-export as ASCII");
        } else if (kw == "element") {
            std::string name;
            long count = 0;
            ls >> name >> count;
            in_vertex_element = (name == "vertex");
            if (name == "vertex") nv = count;
            if (name == "face") nf = count;
        } else if (kw == "property" && in_vertex_element) {
            ++vertex_props;
        } else if (kw == "end_header") {
            break;
        }
    }
    if (nv < 0 || nf < 0) parse_fail(path, "ply header missing vertex or face element");
    std::vector<Vec3> verts(static_cast<size_t>(nv));
    for (auto& v : verts) {
        std::istringstream vs(next_content_line(in));
        if (!(vs >> v.x() >> v.y() >> v.z())) parse_fail(path, "bad vertex line");
    }
    std::vector<Eigen::Vector3i> tris(static_cast<size_t>(nf));
    for (auto& t : tris) {
        std::istringstream fs(next_content_line(in));
        int n = 0;
        if (!(fs >> n) || n != 3) parse_fail(path, "only triangle faces are supported");
        if (!(fs >> t.x() >> t.y() >> t.z())) parse_fail(path, "bad face line");
    }
    return from_arrays(verts, tris);
}

TriangleMesh load_obj(const std::string& path, std::istream& in) {
    std::vector<Vec3> verts;
    std::vector<Eigen::Vector3i> tris;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "v") {
            Vec3 v;
            if (!(ls >> v.x() >> v.y() >> v.z())) parse_fail(path, "bad v record");
            verts.push_back(v);
        } else if (kw == "f") {
            Eigen::Vector3i t;
            for (int k = 0; k < 3; ++k) {
                std::string tok;
                if (!(ls >> tok)) parse_fail(path, "f record needs three indices");
                // accept v, v/vt, v/vt/vn and v//vn forms; only v is used
                t[k] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
            }
            std::string extra;
            if (ls >> extra) parse_fail(path, "only triangle faces are supported");
            tris.push_back(t);
        }
    }
    return from_arrays(verts, tris);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    return out;
}

}  // namespace

MeshFormat format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == "off") return MeshFormat::OFF;
    if (ext == "ply") return MeshFormat::PLY;
    if (ext == "obj") return MeshFormat::OBJ;
    throw std::runtime_error(path + ": unknown mesh extension (expected .off/.ply/.obj)");
}

TriangleMesh load_mesh(const std::string& path, MeshFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    switch (format) {
        case MeshFormat::OFF: return load_off(path, in);
        case MeshFormat::PLY: return load_ply(path, in);
        case MeshFormat::OBJ: return load_obj(path, in);
    }
    throw std::logic_error("unreachable");
}

TriangleMesh load_mesh(const std::string& path) { return load_mesh(path, format_from_path(path)); }

void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format) {
    auto out = open_out(path);
    const Eigen::Index nv = mesh.vertex_count(), nf = mesh.face_count();
    switch (format) {
        case MeshFormat::OFF: {
            out << "OFF\n" << nv << ' ' << nf << " 0\n";
            for (Eigen::Index i = 0; i < nv; ++i)
                out << mesh.vertices(i, 0) << ' ' << mesh.vertices(i, 1) << ' ' << mesh.vertices(i, 2) << '\n';
            for (Eigen::Index f = 0; f < nf; ++f)
                out << "3 " << mesh.faces(f, 0) << ' ' << mesh.faces(f, 1) << ' ' << mesh.faces(f, 2) << '\n';
            break;
        }
        case MeshFormat::PLY: {
            out << "ply\nformat ascii 1.0\nelement vertex " << nv
                << "\nproperty double x\nproperty double y\nproperty double z\nelement face " << nf
                << "\nproperty list uchar int vertex_indices\nend_header\n";
            for (Eigen::Index i = 0; i < nv; ++i)
                out << mesh.vertices(i, 0) << ' ' << mesh.vertices(i, 1) << ' ' << mesh.vertices(i, 2) << '\n';
            for (Eigen::Index f = 0; f < nf; ++f)
                out << "3 " << mesh.faces(f, 0) << ' ' << mesh.faces(f, 1) << ' ' << mesh.faces(f, 2) << '\n';
            break;
        }
        case MeshFormat::OBJ: {
            for (Eigen::Index i = 0; i < nv; ++i)
                out << "v " << mesh.vertices(i, 0) << ' ' << mesh.vertices(i, 1) << ' ' << mesh.vertices(i, 2)
                    << '\n';
            for (Eigen::Index f = 0; f < nf; ++f)
                out << "f " << mesh.faces(f, 0) + 1 << ' ' << mesh.faces(f, 1) + 1 << ' ' << mesh.faces(f, 2) + 1
                    << '\n';
            break;
        }
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

void save_mesh(const TriangleMesh& mesh, const std::string& path) {
    save_mesh(mesh, path, format_from_path(path));
}

}  // namespace lvm
