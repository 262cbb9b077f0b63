#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nudged_ns {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Boundary tag ids. Square meshes only use `wall`.
enum class BoundaryTag : int {
    wall = 1,
    inflow = 2,
    outflow = 3,
    cylinder = 4,
};

const char* to_string(BoundaryTag tag);
bool is_valid_tag(int id);

using Cell = std::array<int, 3>;

struct BoundaryEdge {
    std::array<int, 2> v{};
    BoundaryTag tag = BoundaryTag::wall;

    friend bool operator==(const BoundaryEdge&, const BoundaryEdge&) = default;
};

/// Undirected mesh edge, stored with v[0] < v[1].
struct Edge {
    std::array<int, 2> v{};
};

/// Conforming triangulation with tagged boundary.
///
/// Immutable after construction. The constructor validates every invariant
/// (positive orientation, conformity, complete and unique boundary tagging)
/// and throws ConformityError otherwise. Edges are numbered in lexicographic
/// order of their sorted vertex pair, which fixes the global P2 numbering.
class Mesh {
public:
    Mesh() = default;
    Mesh(std::vector<Point> vertices, std::vector<Cell> cells,
         std::vector<BoundaryEdge> boundary_edges);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
    const std::vector<Edge>& edges() const { return edges_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_boundary_edges() const { return static_cast<int>(boundary_.size()); }

    /// Global edge index of local edge k of cell c (the edge opposite vertex k).
    int cell_edge(int c, int k) const { return cell_edges_[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)]; }
    /// Edge index of boundary edge b.
    int boundary_edge_index(int b) const { return boundary_edge_ids_[static_cast<std::size_t>(b)]; }
    /// Tag of edge e, or 0 for interior edges.
    int edge_tag(int e) const { return edge_tags_[static_cast<std::size_t>(e)]; }

    double h_max() const { return h_max_; }
    double cell_area(int c) const;
    double total_area() const;
    Point centroid(int c) const;
    std::array<Point, 3> cell_points(int c) const;

    bool has_tag(BoundaryTag tag) const;

    /// True when cells come in consecutive triples sharing a barycentric vertex,
    /// i.e. the mesh is the output of barycentric_refine.
    bool is_barycentric_refinement() const;

    /// Re-check all invariants; throws ConformityError on violation.
    void validate() const;

    friend bool operator==(const Mesh& a, const Mesh& b) {
        return a.vertices_ == b.vertices_ && a.cells_ == b.cells_ && a.boundary_ == b.boundary_;
    }

private:
    void build_topology();

    std::vector<Point> vertices_;
    std::vector<Cell> cells_;
    std::vector<BoundaryEdge> boundary_;

    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> cell_edges_;
    std::vector<int> boundary_edge_ids_;
    std::vector<int> edge_tags_;
    double h_max_ = 0.0;
};

double signed_area(const Point& a, const Point& b, const Point& c);

/// Barycentric coordinates of p with respect to triangle (a, b, c).
std::array<double, 3> barycentric(const Point& a, const Point& b, const Point& c, const Point& p);

/// n x n grid of the unit square, every square cut from lower-left to upper-right.
Mesh gen_unit_square(int n);

/// Split every cell into three by its barycenter. Child k of cell c is 3c+k and
/// the new vertex of cell c is num_vertices() + c.
Mesh barycentric_refine(const Mesh& m);

/// Channel [0,2.2]x[0,0.41] with a circular hole of radius 0.05 at (0.2,0.2).
///
/// A graded tensor grid is cut around the hole: every cell touching a vertex
/// strictly inside the disk is removed, the exposed vertices are projected
/// radially onto the circle, and cylinder edges are split at arc midpoints
/// until the hole has at least n_circ vertices.
Mesh gen_channel_cylinder(int nx, int ny, int n_circ);

struct ChannelGeometry {
    static constexpr double length = 2.2;
    static constexpr double height = 0.41;
    static constexpr double cx = 0.2;
    static constexpr double cy = 0.2;
    static constexpr double radius = 0.05;
};

void write_mesh(const Mesh& m, const std::filesystem::path& path);
Mesh read_mesh(const std::filesystem::path& path);
std::string format_mesh(const Mesh& m);
Mesh parse_mesh(const std::string& text);

/// Cell whose closed triangle contains p; lowest index on ties.
int locate(const Mesh& m, const Point& p);

} // namespace nudged_ns
