#include "quartic/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace quartic {

bool SurfacePoint::valid() const {
    if (face < 0) return false;
    double s = bary[0] + bary[1] + bary[2];
    if (std::abs(s - 1.0) > 1e-12) return false;
    return bary.minCoeff() >= -1e-12 && bary.maxCoeff() <= 1.0 + 1e-12;
}

std::vector<int> CurveGraph::edge_set(const SurfaceMesh& mesh) const {
    std::vector<int> edges;
    for (const auto& loop : loops)
        for (int h : loop.halfedges) edges.push_back(mesh.he_edge[h]);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

bool SurfaceMesh::closed() const {
    return std::all_of(he_twin.begin(), he_twin.end(), [](int t) { return t >= 0; });
}

int SurfaceMesh::euler_characteristic() const { return n_vertices() - n_edges() + n_faces(); }

double SurfaceMesh::edge_length(int e) const {
    if (metric_lengths) return (*metric_lengths)[e];
    int h = edge_he[e];
    return (positions[head(h)] - positions[tail(h)]).norm();
}

double SurfaceMesh::face_area(int f) const {
    auto hs = face_halfedges(f);
    double a = he_length(hs[0]), b = he_length(hs[1]), c = he_length(hs[2]);
    double s = 0.5 * (a + b + c);
    double r = s * (s - a) * (s - b) * (s - c);
    if (r <= 0.0) throw DegenerateFace(f);
    return std::sqrt(r);
}

double SurfaceMesh::total_area() const {
    double a = 0;
    for (int f = 0; f < n_faces(); f++) a += face_area(f);
    return a;
}

double SurfaceMesh::mean_edge_length() const {
    double s = 0;
    for (int e = 0; e < n_edges(); e++) s += edge_length(e);
    return s / std::max(1, n_edges());
}

double SurfaceMesh::corner_angle(int h) const {
    double lh = he_length(h), lp = he_length(prev(h)), lo = he_length(next(h));
    double c = (lh * lh + lp * lp - lo * lo) / (2.0 * lh * lp);
    if (!(lh > 0 && lp > 0 && lo > 0)) throw DegenerateFace(face(h));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double SurfaceMesh::cot_opposite(int h) const {
    double a = corner_angle(prev(h));
    return std::cos(a) / std::sin(a);
}

double SurfaceMesh::cotan_weight(int e) const {
    int h = edge_he[e];
    double w = cot_opposite(h);
    if (he_twin[h] >= 0) w += cot_opposite(he_twin[h]);
    return 0.5 * w;
}

std::array<int, 3> SurfaceMesh::face_halfedges(int f) const {
    int h0 = face_he[f];
    return {h0, he_next[h0], he_next[he_next[h0]]};
}

std::array<int, 3> SurfaceMesh::face_vertices(int f) const {
    auto hs = face_halfedges(f);
    return {he_origin[hs[0]], he_origin[hs[1]], he_origin[hs[2]]};
}

int SurfaceMesh::corner_of_vertex(int f, int v) const {
    auto vs = face_vertices(f);
    for (int i = 0; i < 3; i++)
        if (vs[i] == v) return i;
    return -1;
}

std::array<complexd, 3> SurfaceMesh::embed_face(int f) const {
    auto hs = face_halfedges(f);
    double l01 = he_length(hs[0]), l12 = he_length(hs[1]), l20 = he_length(hs[2]);
    double x = (l01 * l01 + l20 * l20 - l12 * l12) / (2.0 * l01);
    double y2 = l20 * l20 - x * x;
    if (!(y2 > 0))  throw DegenerateFace(f);
    return {complexd(0, 0), complexd(l01, 0), complexd(x, std::sqrt(y2))};
}

complexd SurfaceMesh::embed_point(const SurfacePoint& p) const {
    auto z = embed_face(p.face);
    return p.bary[0] * z[0] + p.bary[1] * z[1] + p.bary[2] * z[2];
}

std::vector<int> SurfaceMesh::outgoing_halfedges(int v) const {
    std::vector<int> out;
    int h0 = vert_he[v];
    // On meshes with boundary, rewind clockwise to the boundary-adjacent start first.
    int h = h0;
    while (he_twin[h] >= 0) {
        int n = he_next[he_twin[h]];
        if (n == h0) break;
        h = n;
    }
    int start = h;
    while (true) {
        out.push_back(h);
        int n = rot_ccw(h);
        if (n < 0 || n == start) break;
        h = n;
    }
    return out;
}

void SurfaceMesh::check_structure() const {
    for (int h = 0; h < n_halfedges(); h++) {
        if (he_next[he_next[he_next[h]]] != h) throw Error("broken next cycle at halfedge " + std::to_string(h));
        int t = he_twin[h];
        if (t >= 0) {
            if (he_twin[t] != h) throw Error("twin not involutive at halfedge " + std::to_string(h));
            if (tail(h) != head(t) || head(h) != tail(t))
                throw Error("twin endpoints mismatch at halfedge " + std::to_string(h));
        }
    }
    for (int f = 0; f < n_faces(); f++)
        if (he_face[face_he[f]] != f) throw Error("face pointer mismatch at face " + std::to_string(f));
}

SurfaceMesh SurfaceMesh::build(std::vector<Vec3> positions, const std::vector<std::array<int, 3>>& faces,
                               bool require_closed) {
    SurfaceMesh m;
    m.positions = std::move(positions);
    int nv = m.n_vertices();
    int nf = (int)faces.size();
    m.he_origin.resize(3 * nf);
    m.he_twin.assign(3 * nf, -1);
    m.he_next.resize(3 * nf);
    m.he_face.resize(3 * nf);
    m.face_he.resize(nf);
    m.vert_he.assign(nv, -1);

    std::map<std::pair<int, int>, int> directed;
    for (int f = 0; f < nf; f++) {
        const auto& fv = faces[f];
        for (int i = 0; i < 3; i++) {
            int h = 3 * f + i;
            int a = fv[i], b = fv[(i + 1) % 3];
            if (a < 0 || a >= nv || b < 0 || b >= nv) throw IoError("face " + std::to_string(f) + " has bad vertex index");
            if (a == b) throw DegenerateFace(f);
            m.he_origin[h] = a;
            m.he_next[h] = 3 * f + (i + 1) % 3;
            m.he_face[h] = f;
            if (m.vert_he[a] < 0) m.vert_he[a] = h;
            auto ins = directed.emplace(std::make_pair(a, b), h);
            if (!ins.second) throw NonManifoldEdge(a, b);  // repeated directed edge: non-manifold or inconsistent orientation
        }
        m.face_he[f] = 3 * f;
    }
    for (auto& [key, h] : directed) {
        auto it = directed.find({key.second, key.first});
        if (it != directed.end()) {
            m.he_twin[h] = it->second;
        } else if (require_closed) {
            throw BoundaryPresent(key.first, key.second);
        }
    }
    // Edge ids: representative is the smaller halfedge of the pair.
    m.he_edge.assign(3 * nf, -1);
    for (int h = 0; h < 3 * nf; h++) {
        if (m.he_edge[h] >= 0) continue;
        int e = (int)m.edge_he.size();
        m.he_edge[h] = e;
        if (m.he_twin[h] >= 0) m.he_edge[m.he_twin[h]] = e;
        m.edge_he.push_back(h);
    }
    for (int v = 0; v < nv; v++)
        if (m.vert_he[v] < 0) throw Error("isolated vertex " + std::to_string(v));

    // Vertex fans must be single cycles (or single chains on boundary).
    std::vector<int> incident(nv, 0);
    for (int h = 0; h < 3 * nf; h++) incident[m.he_origin[h]]++;
    for (int v = 0; v < nv; v++)
        if ((int)m.outgoing_halfedges(v).size() != incident[v]) throw NonManifoldVertex(v);

    // Connectivity over vertices.
    std::vector<int> comp(nv, -1);
    int ncomp = 0;
    for (int s = 0; s < nv; s++) {
        if (comp[s] >= 0) continue;
        std::queue<int> q;
        q.push(s);
        comp[s] = ncomp;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int h : m.outgoing_halfedges(v)) {
                int w = m.head(h);
                if (comp[w] < 0) {
                    comp[w] = ncomp;
                    q.push(w);
                }
            }
        }
        ncomp++;
    }
    if (ncomp > 1) throw MultipleComponents(ncomp);
    m.check_structure();
    return m;
}

int genus(const SurfaceMesh& mesh) {
    int chi = mesh.euler_characteristic();
    return (2 - chi) / 2;
}

std::vector<double> angle_defect_curvature(const SurfaceMesh& mesh) {
    std::vector<double> K(mesh.n_vertices(), 2.0 * M_PI);
    for (int h = 0; h < mesh.n_halfedges(); h++) K[mesh.tail(h)] -= mesh.corner_angle(h);
    return K;
}

SurfacePoint vertex_point(const SurfaceMesh& mesh, int v) {
    int h = mesh.vert_he[v];
    int f = mesh.face(h);
    return SurfacePoint::at_corner(f, mesh.corner_of_vertex(f, v));
}

int nearest_vertex(const SurfaceMesh& mesh, const SurfacePoint& p) {
    auto vs = mesh.face_vertices(p.face);
    int best = 0;
    for (int i = 1; i < 3; i++)
        if (p.bary[i] > p.bary[best]) best = i;
    return vs[best];
}

// ---------------------------------------------------------------------------
// Slicing

SlicedMesh slice_along(const SurfaceMesh& mesh, const CurveGraph& cut) {
    std::vector<char> is_cut(mesh.n_edges(), 0);
    for (int e : cut.edge_set(mesh)) is_cut[e] = 1;

    SlicedMesh out;
    out.mesh = mesh;
    SurfaceMesh& m = out.mesh;
    out.copies.assign(mesh.n_vertices(), {});

    // Wedges: arcs of the vertex fan delimited by cut spokes. Each wedge becomes one copy.
    std::vector<int> new_origin(mesh.n_halfedges(), -1);
    int next_vertex = 0;
    std::vector<Vec3> new_positions;
    std::vector<int> vertex_origin;
    for (int v = 0; v < mesh.n_vertices(); v++) {
        auto ring = mesh.outgoing_halfedges(v);
        std::vector<int> spokes;
        for (int i = 0; i < (int)ring.size(); i++)
            if (is_cut[mesh.he_edge[ring[i]]]) spokes.push_back(i);
        auto add_copy = [&]() {
            int id = next_vertex++;
            new_positions.push_back(mesh.positions[v]);
            vertex_origin.push_back(v);
            out.copies[v].push_back(id);
            return id;
        };
        if (spokes.empty()) {
            int id = add_copy();
            for (int h : ring) new_origin[h] = id;
        } else {
            int k = (int)spokes.size();
            for (int s = 0; s < k; s++) {
                int id = add_copy();
                int from = spokes[s];
                int to = spokes[(s + 1) % k];  // exclusive
                int i = from;
                while (true) {
                    new_origin[ring[i]] = id;
                    i = (i + 1) % (int)ring.size();
                    if (i == to) break;
                }
            }
        }
    }
    m.positions = std::move(new_positions);
    m.he_origin = std::move(new_origin);
    out.vertex_origin = std::move(vertex_origin);

    for (int e = 0; e < mesh.n_edges(); e++) {
        if (!is_cut[e]) continue;
        int h = mesh.edge_he[e];
        int t = mesh.he_twin[h];
        m.he_twin[h] = -1;
        if (t >= 0) m.he_twin[t] = -1;
    }

    // Rebuild edge ids: boundary halfedges now each own an edge.
    m.he_edge.assign(m.n_halfedges(), -1);
    m.edge_he.clear();
    std::vector<double> new_lengths;
    for (int h = 0; h < m.n_halfedges(); h++) {
        if (m.he_edge[h] >= 0) continue;
        int e = (int)m.edge_he.size();
        m.he_edge[h] = e;
        if (m.he_twin[h] >= 0) m.he_edge[m.he_twin[h]] = e;
        m.edge_he.push_back(h);
        if (mesh.metric_lengths) new_lengths.push_back(mesh.edge_length(mesh.he_edge[h]));
    }
    if (mesh.metric_lengths) m.metric_lengths = std::move(new_lengths);

    m.vert_he.assign(m.n_vertices(), -1);
    for (int h = 0; h < m.n_halfedges(); h++)
        if (m.vert_he[m.he_origin[h]] < 0) m.vert_he[m.he_origin[h]] = h;

    // Complement must stay connected: BFS over faces across interior edges.
    std::vector<int> fcomp(m.n_faces(), -1);
    int nfc = 0;
    for (int s = 0; s < m.n_faces(); s++) {
        if (fcomp[s] >= 0) continue;
        std::queue<int> q;
        q.push(s);
        fcomp[s] = nfc;
        while (!q.empty()) {
            int f = q.front();
            q.pop();
            for (int h : m.face_halfedges(f)) {
                int t = m.he_twin[h];
                if (t >= 0 && fcomp[m.he_face[t]] < 0) {
                    fcomp[m.he_face[t]] = nfc;
                    q.push(m.he_face[t]);
                }
            }
        }
        nfc++;
    }
    if (nfc > 1) throw CutDisconnects(nfc);
    m.check_structure();
    return out;
}

int SlicedMesh::boundary_halfedge_count() const {
    int c = 0;
    for (int t : mesh.he_twin)
        if (t < 0) c++;
    return c;
}

// ---------------------------------------------------------------------------
// I/O

static SurfaceMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Vec3> positions;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        std::istringstream ss(line);
        std::string kw;
        ss >> kw;
        if (kw == "v") {
            Vec3 p;
            ss >> p[0] >> p[1] >> p[2];
            positions.push_back(p);
        } else if (kw == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok) {
                size_t slash = tok.find('/');
                int i = std::stoi(slash == std::string::npos ? tok : tok.substr(0, slash));
                if (i < 0) i = (int)positions.size() + 1 + i;
                idx.push_back(i - 1);
            }
            if (idx.size() != 3) throw NonTriangleFace((int)faces.size());
            faces.push_back({idx[0], idx[1], idx[2]});
        }
    }
    return SurfaceMesh::build(std::move(positions), faces, true);
}

namespace {

struct PlyProperty {
    std::string type;
    std::string name;
    bool is_list = false;
    std::string count_type;
};

double read_binary_scalar(std::istream& in, const std::string& type) {
    auto rd = [&](auto v) {
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        return (double)v;
    };
    if (type == "float" || type == "float32") return rd(float{});
    if (type == "double" || type == "float64") return rd(double{});
    if (type == "char" || type == "int8") return rd(int8_t{});
    if (type == "uchar" || type == "uint8") return rd(uint8_t{});
    if (type == "short" || type == "int16") return rd(int16_t{});
    if (type == "ushort" || type == "uint16") return rd(uint16_t{});
    if (type == "int" || type == "int32") return rd(int32_t{});
    if (type == "uint" || type == "uint32") return rd(uint32_t{});
    throw IoError("unsupported PLY type " + type);
}

}  // namespace

static SurfaceMesh load_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("ply", 0) != 0) throw IoError("not a PLY file: " + path);
    std::string format;
    struct Element {
        std::string name;
        long count = 0;
        std::vector<PlyProperty> props;
    };
    std::vector<Element> elements;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string kw;
        ss >> kw;
        if (kw == "format") {
            ss >> format;
        } else if (kw == "element") {
            Element e;
            ss >> e.name >> e.count;
            elements.push_back(e);
        } else if (kw == "property") {
            PlyProperty p;
            std::string t;
            ss >> t;
            if (t == "list") {
                p.is_list = true;
                ss >> p.count_type >> p.type >> p.name;
            } else {
                p.type = t;
                ss >> p.name;
            }
            if (elements.empty()) throw IoError("PLY property before element");
            elements.back().props.push_back(p);
        } else if (kw == "end_header") {
            break;
        }
    }
    bool binary = format == "binary_little_endian";
    if (!binary && format != "ascii") throw IoError("unsupported PLY format " + format);

    std::vector<Vec3> positions;
    std::vector<std::array<int, 3>> faces;
    for (const auto& el : elements) {
        for (long i = 0; i < el.count; i++) {
            if (el.name == "vertex") {
                Vec3 p = Vec3::Zero();
                for (const auto& pr : el.props) {
                    double v = binary ? read_binary_scalar(in, pr.type) : [&] {
                        double x;
                        in >> x;
                        return x;
                    }();
                    if (pr.name == "x") p[0] = v;
                    else if (pr.name == "y") p[1] = v;
                    else if (pr.name == "z") p[2] = v;
                }
                positions.push_back(p);
            } else if (el.name == "face") {
                for (const auto& pr : el.props) {
                    if (!pr.is_list) {
                        if (binary) read_binary_scalar(in, pr.type);
                        else { double d; in >> d; }
                        continue;
                    }
                    long n = binary ? (long)read_binary_scalar(in, pr.count_type) : [&] {
                        long x;
                        in >> x;
                        return x;
                    }();
                    std::vector<int> idx(n);
                    for (long k = 0; k < n; k++)
                        idx[k] = binary ? (int)read_binary_scalar(in, pr.type) : [&] {
                            int x;
                            in >> x;
                            return x;
                        }();
                    if (pr.name == "vertex_indices" || pr.name == "vertex_index") {
                        if (n != 3) throw NonTriangleFace((int)faces.size());
                        faces.push_back({idx[0], idx[1], idx[2]});
                    }
                }
            } else {
                // skip unknown element rows
                for (const auto& pr : el.props) {
                    if (pr.is_list) {
                        long n = binary ? (long)read_binary_scalar(in, pr.count_type) : [&] { long x; in >> x; return x; }();
                        for (long k = 0; k < n; k++) {
                            if (binary) read_binary_scalar(in, pr.type);
                            else { double d; in >> d; }
                        }
                    } else {
                        if (binary) read_binary_scalar(in, pr.type);
                        else { double d; in >> d; }
                    }
                }
            }
        }
    }
    return SurfaceMesh::build(std::move(positions), faces, true);
}

SurfaceMesh load_mesh(const std::string& path) {
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = (char)std::tolower(c);
    if (ext == "obj") return load_obj(path);
    if (ext == "ply") return load_ply(path);
    throw IoError("unsupported mesh format: " + path);
}

void save_obj(const SurfaceMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    char buf[128];
    for (const auto& p : mesh.positions) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p[0], p[1], p[2]);
        out << buf;
    }
    for (int f = 0; f < mesh.n_faces(); f++) {
        auto vs = mesh.face_vertices(f);
        out << "f " << vs[0] + 1 << ' ' << vs[1] + 1 << ' ' << vs[2] + 1 << '\n';
    }
}

std::string curve_graph_to_json(const CurveGraph& g) {
    nlohmann::json j;
    j["loops"] = nlohmann::json::array();
    for (const auto& loop : g.loops) {
        nlohmann::json l;
        l["tag"] = loop.tag;
        l["halfedges"] = loop.halfedges;
        l["closed"] = loop.closed;
        j["loops"].push_back(l);
    }
    return j.dump(2);
}

CurveGraph curve_graph_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    CurveGraph g;
    for (const auto& l : j.at("loops")) {
        CurveLoop loop;
        loop.tag = l.at("tag").get<std::string>();
        loop.halfedges = l.at("halfedges").get<std::vector<int>>();
        loop.closed = l.value("closed", true);
        g.loops.push_back(std::move(loop));
    }
    return g;
}

}  // namespace quartic
