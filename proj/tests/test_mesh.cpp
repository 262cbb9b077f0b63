#include "nudged_ns/error.hpp"
#include "nudged_ns/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>

using namespace nudged_ns;

namespace {

bool contains(const Mesh& m, int c, const Point& p) {
    const auto t = m.cell_points(c);
    const auto l = barycentric(t[0], t[1], t[2], p);
    return l[0] >= -1e-12 && l[1] >= -1e-12 && l[2] >= -1e-12;
}

} // namespace

TEST(UnitSquare, SmallestGrid) {
    const Mesh m = gen_unit_square(1);
    EXPECT_EQ(m.num_vertices(), 4);
    EXPECT_EQ(m.num_cells(), 2);
    EXPECT_EQ(m.num_boundary_edges(), 4);
    for (const auto& e : m.boundary_edges()) EXPECT_EQ(e.tag, BoundaryTag::wall);
}

TEST(UnitSquare, AreaAndCounts) {
    const Mesh m = gen_unit_square(4);
    double area = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto p = m.cell_points(c);
        area += signed_area(p[0], p[1], p[2]);
    }
    EXPECT_NEAR(area, 1.0, 1e-14);
    EXPECT_EQ(m.num_cells(), 32);
    EXPECT_EQ(m.num_vertices(), 25);
    EXPECT_EQ(m.num_boundary_edges(), 16);
}

TEST(UnitSquare, MeshSizeMatchesCellsPerSide) {
    for (int n = 1; n <= 64; n *= 2) EXPECT_NEAR(gen_unit_square(n).h_max() * n, std::sqrt(2.0), 1e-14) << n;
}

TEST(UnitSquare, EdgeCountSatisfiesEuler) {
    const Mesh m = gen_unit_square(32);
    // V - E + F = 1 for a disk (F counts cells only).
    EXPECT_EQ(m.num_vertices() - m.num_edges() + m.num_cells(), 1);
}

TEST(UnitSquare, RejectsNonpositiveSize) { EXPECT_THROW(gen_unit_square(0), Error); }

TEST(BarycentricRefine, TwoCellCounts) {
    const Mesh r = barycentric_refine(gen_unit_square(1));
    EXPECT_EQ(r.num_cells(), 6);
    EXPECT_EQ(r.num_vertices(), 6);
    EXPECT_TRUE(r.is_barycentric_refinement());
    EXPECT_FALSE(gen_unit_square(2).is_barycentric_refinement());
}

TEST(BarycentricRefine, ChildAreasSumToParent) {
    const Mesh m = gen_channel_cylinder(16, 8, 16);
    const Mesh r = barycentric_refine(m);
    ASSERT_EQ(r.num_cells(), 3 * m.num_cells());
    for (int c = 0; c < m.num_cells(); ++c) {
        const double children = r.cell_area(3 * c) + r.cell_area(3 * c + 1) + r.cell_area(3 * c + 2);
        EXPECT_NEAR(children, m.cell_area(c), 1e-14);
    }
    EXPECT_EQ(r.num_boundary_edges(), m.num_boundary_edges());
}

TEST(BarycentricRefine, NewVertexIsBarycenter) {
    const Mesh m = gen_unit_square(3);
    const Mesh r = barycentric_refine(m);
    for (int c = 0; c < m.num_cells(); ++c) {
        const Point b = r.vertices()[static_cast<std::size_t>(m.num_vertices() + c)];
        const Point g = m.centroid(c);
        EXPECT_NEAR(b.x, g.x, 1e-15);
        EXPECT_NEAR(b.y, g.y, 1e-15);
    }
}

TEST(ChannelCylinder, NoVertexInsideDisk) {
    for (auto [nx, ny, nc] : {std::tuple{16, 8, 16}, std::tuple{44, 8, 16}, std::tuple{88, 16, 32}}) {
        const Mesh m = gen_channel_cylinder(nx, ny, nc);
        for (const auto& p : m.vertices()) {
            EXPECT_GE(std::hypot(p.x - ChannelGeometry::cx, p.y - ChannelGeometry::cy), ChannelGeometry::radius - 1e-12);
        }
    }
}

TEST(ChannelCylinder, AreaCloseToAnalytic) {
    const Mesh m = gen_channel_cylinder(88, 16, 32);
    const double exact = ChannelGeometry::length * ChannelGeometry::height -
                         std::numbers::pi * ChannelGeometry::radius * ChannelGeometry::radius;
    EXPECT_NEAR(m.total_area(), exact, 0.02 * exact);
}

TEST(ChannelCylinder, TagsPartitionBoundary) {
    const Mesh m = gen_channel_cylinder(44, 8, 16);
    std::set<BoundaryTag> seen;
    int cyl_vertices = 0;
    for (const auto& e : m.boundary_edges()) {
        seen.insert(e.tag);
        const Point& a = m.vertices()[static_cast<std::size_t>(e.v[0])];
        const Point& b = m.vertices()[static_cast<std::size_t>(e.v[1])];
        switch (e.tag) {
        case BoundaryTag::inflow: EXPECT_TRUE(a.x == 0.0 && b.x == 0.0); break;
        case BoundaryTag::outflow:
            EXPECT_DOUBLE_EQ(a.x, ChannelGeometry::length);
            EXPECT_DOUBLE_EQ(b.x, ChannelGeometry::length);
            break;
        case BoundaryTag::wall:
            EXPECT_TRUE((a.y == 0.0 && b.y == 0.0) || (a.y == ChannelGeometry::height && b.y == ChannelGeometry::height));
            break;
        case BoundaryTag::cylinder:
            ++cyl_vertices;
            EXPECT_NEAR(std::hypot(a.x - ChannelGeometry::cx, a.y - ChannelGeometry::cy), ChannelGeometry::radius, 1e-12);
            break;
        }
    }
    EXPECT_EQ(seen.size(), 4u);
    EXPECT_GE(cyl_vertices, 16);
}

TEST(ChannelCylinder, RejectsTooCoarseInput) { EXPECT_THROW(gen_channel_cylinder(4, 4, 8), Error); }

TEST(MeshIo, RoundTripTwoCellSquare) {
    const Mesh m = gen_unit_square(1);
    const auto path = std::filesystem::temp_directory_path() / "nudged_ns_test_square.mesh";
    write_mesh(m, path);
    EXPECT_EQ(read_mesh(path), m);
    std::filesystem::remove(path);
}

TEST(MeshIo, RoundTripPreservesCylinderTags) {
    const Mesh m = gen_channel_cylinder(44, 8, 16);
    const Mesh back = parse_mesh(format_mesh(m));
    ASSERT_EQ(back.num_boundary_edges(), m.num_boundary_edges());
    for (int b = 0; b < m.num_boundary_edges(); ++b) EXPECT_EQ(back.boundary_edges()[b], m.boundary_edges()[b]);
    EXPECT_EQ(back.vertices(), m.vertices());
    EXPECT_EQ(back.cells(), m.cells());
}

TEST(MeshIo, DuplicateBoundaryEdgeIsConformityError) {
    std::string text = format_mesh(gen_unit_square(1));
    // Repeat the last boundary edge and bump the count.
    const auto last = text.rfind('\n', text.size() - 2);
    const std::string edge = text.substr(last + 1);
    text += edge;
    text.replace(text.find("4 2 4"), 5, "4 2 5");
    EXPECT_THROW(parse_mesh(text), ConformityError);
}

TEST(MeshIo, MalformedInputReportsLine) {
    try {
        parse_mesh("ns-mesh 1\n4 2 4\n0 0\n1 zero\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4);
    }
    EXPECT_THROW(parse_mesh("not a mesh\n"), ParseError);
    EXPECT_THROW(parse_mesh("ns-mesh 1\n4 2 4\n"), ParseError);
}

TEST(MeshInvariants, InvertedCellRejected) {
    std::vector<Point> v = {{0, 0}, {1, 0}, {0, 1}};
    std::vector<Cell> c = {{0, 2, 1}};
    std::vector<BoundaryEdge> b = {{{0, 1}, BoundaryTag::wall}, {{1, 2}, BoundaryTag::wall}, {{2, 0}, BoundaryTag::wall}};
    EXPECT_THROW(Mesh(v, c, b), ConformityError);
}

TEST(MeshInvariants, UntaggedBoundaryRejected) {
    std::vector<Point> v = {{0, 0}, {1, 0}, {0, 1}};
    std::vector<Cell> c = {{0, 1, 2}};
    std::vector<BoundaryEdge> b = {{{0, 1}, BoundaryTag::wall}, {{1, 2}, BoundaryTag::wall}};
    EXPECT_THROW(Mesh(v, c, b), ConformityError);
}

TEST(Locate, CentroidsFindTheirCell) {
    const Mesh m = gen_unit_square(5);
    for (int c = 0; c < m.num_cells(); ++c) EXPECT_EQ(locate(m, m.centroid(c)), c);
}

TEST(Locate, SharedVertexGoesToLowestIndex) {
    const Mesh m = gen_unit_square(2);
    const Point center{0.5, 0.5};
    int lowest = -1;
    for (int c = 0; c < m.num_cells() && lowest < 0; ++c)
        if (contains(m, c, center)) lowest = c;
    EXPECT_EQ(locate(m, center), lowest);
}

TEST(Locate, AgreesWithExhaustiveScan) {
    const Mesh m = gen_channel_cylinder(44, 8, 16);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, ChannelGeometry::length), uy(0.0, ChannelGeometry::height);
    int checked = 0;
    while (checked < 1000) {
        const Point p{ux(rng), uy(rng)};
        int expected = -1;
        for (int c = 0; c < m.num_cells() && expected < 0; ++c)
            if (contains(m, c, p)) expected = c;
        if (expected < 0) {
            EXPECT_THROW(locate(m, p), NotFoundError);
            continue;
        }
        EXPECT_EQ(locate(m, p), expected);
        ++checked;
    }
}
