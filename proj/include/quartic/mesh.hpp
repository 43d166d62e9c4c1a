#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace quartic {

using Vec3 = Eigen::Vector3d;
using complexd = std::complex<double>;

// Base class for all domain errors; subclasses carry the offending element.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonTriangleFace : Error {
    int face;
    explicit NonTriangleFace(int f) : Error("non-triangle face " + std::to_string(f)), face(f) {}
};
struct NonManifoldEdge : Error {
    int v0, v1;
    NonManifoldEdge(int a, int b)
        : Error("non-manifold edge (" + std::to_string(a) + "," + std::to_string(b) + ")"), v0(a), v1(b) {}
};
struct NonManifoldVertex : Error {
    int vertex;
    explicit NonManifoldVertex(int v) : Error("non-manifold vertex " + std::to_string(v)), vertex(v) {}
};
struct BoundaryPresent : Error {
    int v0, v1;
    BoundaryPresent(int a, int b)
        : Error("boundary edge (" + std::to_string(a) + "," + std::to_string(b) + ")"), v0(a), v1(b) {}
};
struct MultipleComponents : Error {
    int count;
    explicit MultipleComponents(int c) : Error("mesh has " + std::to_string(c) + " components"), count(c) {}
};
struct DegenerateFace : Error {
    int face;
    explicit DegenerateFace(int f) : Error("degenerate face " + std::to_string(f)), face(f) {}
};
struct CutDisconnects : Error {
    int components;
    explicit CutDisconnects(int c) : Error("cut disconnects surface into " + std::to_string(c) + " components"),
                                     components(c) {}
};
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// A point on the surface: face id plus barycentric coordinates (non-negative, summing to 1).
struct SurfacePoint {
    int face = -1;
    Eigen::Vector3d bary = Eigen::Vector3d::Zero();

    SurfacePoint() = default;
    SurfacePoint(int f, const Eigen::Vector3d& b) : face(f), bary(b) {}
    static SurfacePoint at_corner(int face, int corner) {
        Eigen::Vector3d b = Eigen::Vector3d::Zero();
        b[corner] = 1.0;
        return {face, b};
    }
    bool valid() const;
};

// Oriented curve on the mesh: a sequence of halfedges, consecutive ones sharing a vertex.
struct CurveLoop {
    std::string tag;
    std::vector<int> halfedges;
    bool closed = true;
};

struct CurveGraph {
    std::vector<CurveLoop> loops;
    std::vector<int> edge_set(const struct SurfaceMesh& mesh) const;  // sorted unique edge ids
    bool empty() const { return loops.empty(); }
};

// Index-based halfedge mesh. Closed meshes have every twin set; sliced meshes use twin == -1
// on boundary halfedges. Immutable after construction: operations return new values.
struct SurfaceMesh {
    std::vector<Vec3> positions;
    std::vector<int> he_origin;  // tail vertex of halfedge
    std::vector<int> he_twin;    // opposite halfedge, -1 on boundary
    std::vector<int> he_next;    // next halfedge around face (3-cycles)
    std::vector<int> he_face;
    std::vector<int> face_he;    // one halfedge per face
    std::vector<int> vert_he;    // one outgoing halfedge per vertex
    std::vector<int> he_edge;    // edge id of halfedge
    std::vector<int> edge_he;    // representative halfedge per edge
    // When set, overrides position-derived lengths (flat metrics, intrinsic triangulations).
    std::optional<std::vector<double>> metric_lengths;

    int n_vertices() const { return (int)positions.size(); }
    int n_halfedges() const { return (int)he_origin.size(); }
    int n_faces() const { return (int)face_he.size(); }
    int n_edges() const { return (int)edge_he.size(); }

    int next(int h) const { return he_next[h]; }
    int prev(int h) const { return he_next[he_next[h]]; }
    int twin(int h) const { return he_twin[h]; }
    int tail(int h) const { return he_origin[h]; }
    int head(int h) const { return he_origin[he_next[h]]; }
    int face(int h) const { return he_face[h]; }
    int edge(int h) const { return he_edge[h]; }
    bool is_boundary_he(int h) const { return he_twin[h] < 0; }
    bool is_boundary_edge(int e) const { return he_twin[edge_he[e]] < 0; }

    // CCW rotation of an outgoing halfedge around its tail vertex; -1 when blocked by boundary.
    int rot_ccw(int h) const { return he_twin[prev(h)]; }
    int rot_cw(int h) const { return he_twin[h] < 0 ? -1 : he_next[he_twin[h]]; }

    bool closed() const;
    int euler_characteristic() const;

    double edge_length(int e) const;
    double he_length(int h) const { return edge_length(he_edge[h]); }
    double face_area(int f) const;
    double total_area() const;
    double mean_edge_length() const;

    // Interior angle at the tail of h within face(h), by the cosine law on edge lengths.
    double corner_angle(int h) const;
    // cot of the angle opposite halfedge h in face(h).
    double cot_opposite(int h) const;
    // (cot a + cot b)/2 over the faces adjacent to edge e; single-sided on boundary edges.
    double cotan_weight(int e) const;

    // Isometric embedding of face f into the plane: corner i is the tail of the i-th halfedge
    // (starting at face_he[f]); corner 0 at the origin, corner 1 on the positive x-axis.
    std::array<complexd, 3> embed_face(int f) const;
    // Halfedges of face f starting at face_he[f].
    std::array<int, 3> face_halfedges(int f) const;
    std::array<int, 3> face_vertices(int f) const;
    int corner_of_vertex(int f, int v) const;  // index in face_vertices, -1 if absent
    complexd embed_point(const SurfacePoint& p) const;

    std::vector<int> outgoing_halfedges(int v) const;  // CCW ring, starting at vert_he[v]

    // Construction from a triangle soup. validate_closed additionally rejects boundary.
    static SurfaceMesh build(std::vector<Vec3> positions, const std::vector<std::array<int, 3>>& faces,
                             bool require_closed = true);

    void check_structure() const;  // twin/next invariants; throws on violation
};

// Result of cutting a mesh open along a curve graph. Faces and halfedges keep their indices;
// only vertex ids and twin pointers change, so element correspondence is the identity on
// faces/halfedges and vertex_origin on vertices.
struct SlicedMesh {
    SurfaceMesh mesh;
    std::vector<int> vertex_origin;          // sliced vertex -> closed vertex
    std::vector<std::vector<int>> copies;    // closed vertex -> its sliced copies

    int boundary_halfedge_count() const;
};

SurfaceMesh load_mesh(const std::string& path);
void save_obj(const SurfaceMesh& mesh, const std::string& path);

int genus(const SurfaceMesh& mesh);

// Angle defect 2*pi - sum of incident corner angles, per vertex.
std::vector<double> angle_defect_curvature(const SurfaceMesh& mesh);

// Cut the mesh open along the given edge subcomplex. The complement must stay connected.
SlicedMesh slice_along(const SurfaceMesh& mesh, const CurveGraph& cut);

// Barycentric coordinates of vertex v seen from face f (a corner), for point conversions.
SurfacePoint vertex_point(const SurfaceMesh& mesh, int v);
int nearest_vertex(const SurfaceMesh& mesh, const SurfacePoint& p);

std::string curve_graph_to_json(const CurveGraph& g);
CurveGraph curve_graph_from_json(const std::string& text);

}  // namespace quartic
