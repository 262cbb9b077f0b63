#include "nudged_ns/mesh.hpp"

#include "nudged_ns/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

namespace nudged_ns {

const char* to_string(BoundaryTag tag) {
    switch (tag) {
    case BoundaryTag::wall: return "wall";
    case BoundaryTag::inflow: return "inflow";
    case BoundaryTag::outflow: return "outflow";
    case BoundaryTag::cylinder: return "cylinder";
    }
    return "unknown";
}

bool is_valid_tag(int id) { return id >= 1 && id <= 4; }

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::array<double, 3> barycentric(const Point& a, const Point& b, const Point& c, const Point& p) {
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
    const double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    return {1.0 - l1 - l2, l1, l2};
}

namespace {

std::pair<int, int> sorted_pair(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

double dist(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

} // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<Cell> cells,
           std::vector<BoundaryEdge> boundary_edges)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), boundary_(std::move(boundary_edges)) {
    build_topology();
}

void Mesh::build_topology() {
    const int nv = num_vertices();
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& t = cells_[c];
        for (int v : t) {
            if (v < 0 || v >= nv) {
                throw ConformityError("cell " + std::to_string(c) + " references vertex " +
                                      std::to_string(v) + " out of range");
            }
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw ConformityError("cell " + std::to_string(c) + " repeats a vertex");
        }
        const double a = signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
        if (!(a > 0.0)) {
            throw ConformityError("cell " + std::to_string(c) + " has nonpositive area " +
                                  std::to_string(a));
        }
    }

    // Per undirected edge: number of incident cells and orientation balance.
    struct Incidence {
        int count = 0;
        int dir_sum = 0;
    };
    std::map<std::pair<int, int>, Incidence> incidence;
    for (const auto& t : cells_) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[(k + 1) % 3];
            const int b = t[(k + 2) % 3];
            auto& inc = incidence[sorted_pair(a, b)];
            ++inc.count;
            inc.dir_sum += a < b ? 1 : -1;
        }
    }

    edges_.clear();
    edges_.reserve(incidence.size());
    std::map<std::pair<int, int>, int> edge_id;
    for (const auto& [key, inc] : incidence) {
        if (inc.count > 2) {
            throw ConformityError("edge (" + std::to_string(key.first) + "," +
                                  std::to_string(key.second) + ") shared by more than two cells");
        }
        if (inc.count == 2 && inc.dir_sum != 0) {
            throw ConformityError("edge (" + std::to_string(key.first) + "," +
                                  std::to_string(key.second) + ") has inconsistent orientation");
        }
        edge_id.emplace(key, static_cast<int>(edges_.size()));
        edges_.push_back(Edge{{key.first, key.second}});
    }

    cell_edges_.resize(cells_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& t = cells_[c];
        for (int k = 0; k < 3; ++k) {
            cell_edges_[c][static_cast<std::size_t>(k)] =
                edge_id.at(sorted_pair(t[(k + 1) % 3], t[(k + 2) % 3]));
        }
    }

    edge_tags_.assign(edges_.size(), 0);
    boundary_edge_ids_.clear();
    boundary_edge_ids_.reserve(boundary_.size());
    for (std::size_t b = 0; b < boundary_.size(); ++b) {
        const auto& be = boundary_[b];
        if (!is_valid_tag(static_cast<int>(be.tag))) {
            throw ConformityError("boundary edge " + std::to_string(b) + " has invalid tag " +
                                  std::to_string(static_cast<int>(be.tag)));
        }
        const auto it = edge_id.find(sorted_pair(be.v[0], be.v[1]));
        if (it == edge_id.end()) {
            throw ConformityError("boundary edge " + std::to_string(b) + " is not a mesh edge");
        }
        if (incidence.at(it->first).count != 1) {
            throw ConformityError("boundary edge " + std::to_string(b) + " is an interior edge");
        }
        if (edge_tags_[static_cast<std::size_t>(it->second)] != 0) {
            throw ConformityError("duplicate boundary edge (" + std::to_string(be.v[0]) + "," +
                                  std::to_string(be.v[1]) + ")");
        }
        edge_tags_[static_cast<std::size_t>(it->second)] = static_cast<int>(be.tag);
        boundary_edge_ids_.push_back(it->second);
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& inc = incidence.at({edges_[e].v[0], edges_[e].v[1]});
        if (inc.count == 1 && edge_tags_[e] == 0) {
            throw ConformityError("topological boundary edge (" + std::to_string(edges_[e].v[0]) +
                                  "," + std::to_string(edges_[e].v[1]) + ") carries no tag");
        }
    }

    h_max_ = 0.0;
    for (const auto& e : edges_) {
        h_max_ = std::max(h_max_, dist(vertices_[e.v[0]], vertices_[e.v[1]]));
    }
}

void Mesh::validate() const {
    Mesh copy(vertices_, cells_, boundary_);
    (void)copy;
}

double Mesh::cell_area(int c) const {
    const auto& t = cells_[static_cast<std::size_t>(c)];
    return signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
}

double Mesh::total_area() const {
    double s = 0.0;
    for (int c = 0; c < num_cells(); ++c) s += cell_area(c);
    return s;
}

Point Mesh::centroid(int c) const {
    const auto p = cell_points(c);
    return {(p[0].x + p[1].x + p[2].x) / 3.0, (p[0].y + p[1].y + p[2].y) / 3.0};
}

std::array<Point, 3> Mesh::cell_points(int c) const {
    const auto& t = cells_[static_cast<std::size_t>(c)];
    return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
}

bool Mesh::has_tag(BoundaryTag tag) const {
    return std::any_of(boundary_.begin(), boundary_.end(),
                       [tag](const BoundaryEdge& e) { return e.tag == tag; });
}

bool Mesh::is_barycentric_refinement() const {
    if (cells_.empty() || cells_.size() % 3 != 0) return false;
    std::vector<int> degree(vertices_.size(), 0);
    for (const auto& t : cells_) {
        for (int v : t) ++degree[static_cast<std::size_t>(v)];
    }
    for (std::size_t p = 0; p < cells_.size() / 3; ++p) {
        const auto& c0 = cells_[3 * p];
        const auto& c1 = cells_[3 * p + 1];
        const auto& c2 = cells_[3 * p + 2];
        const int g = c0[2];
        if (c1[2] != g || c2[2] != g || degree[static_cast<std::size_t>(g)] != 3) return false;
        if (c0[1] != c1[0] || c1[1] != c2[0] || c2[1] != c0[0]) return false;
        const Point& a = vertices_[c0[0]];
        const Point& b = vertices_[c1[0]];
        const Point& c = vertices_[c2[0]];
        const Point& gp = vertices_[g];
        const double scale = std::max({std::abs(a.x), std::abs(a.y), std::abs(b.x), std::abs(b.y), 1.0});
        if (std::abs((a.x + b.x + c.x) / 3.0 - gp.x) > 1e-12 * scale ||
            std::abs((a.y + b.y + c.y) / 3.0 - gp.y) > 1e-12 * scale) {
            return false;
        }
    }
    return true;
}

Mesh gen_unit_square(int n) {
    if (n < 1) throw Error("gen_unit_square: n must be >= 1");
    const int np = n + 1;
    std::vector<Point> verts;
    verts.reserve(static_cast<std::size_t>(np * np));
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            verts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
        }
    }
    auto id = [np](int i, int j) { return j * np + i; };
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
            cells.push_back({v00, v10, v11});
            cells.push_back({v00, v11, v01});
        }
    }
    std::vector<BoundaryEdge> bnd;
    bnd.reserve(static_cast<std::size_t>(4 * n));
    for (int i = 0; i < n; ++i) bnd.push_back({{id(i, 0), id(i + 1, 0)}, BoundaryTag::wall});
    for (int j = 0; j < n; ++j) bnd.push_back({{id(n, j), id(n, j + 1)}, BoundaryTag::wall});
    for (int i = n; i > 0; --i) bnd.push_back({{id(i, n), id(i - 1, n)}, BoundaryTag::wall});
    for (int j = n; j > 0; --j) bnd.push_back({{id(0, j), id(0, j - 1)}, BoundaryTag::wall});
    return Mesh(std::move(verts), std::move(cells), std::move(bnd));
}

Mesh barycentric_refine(const Mesh& m) {
    std::vector<Point> verts = m.vertices();
    verts.reserve(verts.size() + m.cells().size());
    std::vector<Cell> cells;
    cells.reserve(3 * m.cells().size());
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& t = m.cells()[static_cast<std::size_t>(c)];
        const int g = static_cast<int>(verts.size());
        const auto p = m.cell_points(c);
        verts.push_back({(p[0].x + p[1].x + p[2].x) / 3.0, (p[0].y + p[1].y + p[2].y) / 3.0});
        cells.push_back({t[0], t[1], g});
        cells.push_back({t[1], t[2], g});
        cells.push_back({t[2], t[0], g});
    }
    return Mesh(std::move(verts), std::move(cells), m.boundary_edges());
}

namespace {

// Nodes 0 = s_0 < ... < s_n = length, equidistributed with respect to the
// density 1 + amp * bump(s). The bump is a two-sided Gaussian centred at
// `center` with half-widths `w_lo` / `w_hi`.
struct Grading {
    double length;
    double center;
    double w_lo;
    double w_hi;

    double bump(double s) const {
        const double w = s < center ? w_lo : w_hi;
        const double z = (s - center) / w;
        return std::exp(-z * z);
    }
};

constexpr int kGradingSamples = 20000;

std::vector<double> cumulative_bump(const Grading& g) {
    std::vector<double> cum(kGradingSamples + 1, 0.0);
    const double ds = g.length / kGradingSamples;
    for (int k = 1; k <= kGradingSamples; ++k) {
        cum[static_cast<std::size_t>(k)] = cum[static_cast<std::size_t>(k - 1)] +
                                           0.5 * ds * (g.bump((k - 1) * ds) + g.bump(k * ds));
    }
    return cum;
}

std::vector<double> graded_nodes(const Grading& g, int n, double target_spacing) {
    const auto bump_mass = cumulative_bump(g);
    const double mass = bump_mass.back();
    auto center_spacing = [&](double amp) {
        return (g.length + amp * mass) / (n * (1.0 + amp * g.bump(g.center)));
    };
    double amp = 0.0;
    if (center_spacing(0.0) > target_spacing) {
        const double limit = mass / n;
        const double goal = std::max(target_spacing, 1.1 * limit);
        double lo = 0.0;
        double hi = 1.0;
        while (center_spacing(hi) > goal) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (center_spacing(mid) > goal ? lo : hi) = mid;
        }
        amp = hi;
    }
    const double ds = g.length / kGradingSamples;
    std::vector<double> phi(static_cast<std::size_t>(kGradingSamples) + 1);
    for (int k = 0; k <= kGradingSamples; ++k) {
        phi[static_cast<std::size_t>(k)] = k * ds + amp * bump_mass[static_cast<std::size_t>(k)];
    }
    std::vector<double> nodes(static_cast<std::size_t>(n) + 1);
    nodes.front() = 0.0;
    nodes.back() = g.length;
    std::size_t k = 0;
    for (int i = 1; i < n; ++i) {
        const double target = phi.back() * i / n;
        while (phi[k + 1] < target) ++k;
        const double t = (target - phi[k]) / (phi[k + 1] - phi[k]);
        nodes[static_cast<std::size_t>(i)] = (static_cast<double>(k) + t) * ds;
    }
    return nodes;
}

struct CutMesh {
    std::vector<Point> verts;
    std::vector<Cell> cells;
    std::vector<char> on_circle;
};

// Directed boundary edges (a -> b with the cell on the left).
std::vector<std::array<int, 2>> directed_boundary(const std::vector<Cell>& cells) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : cells) {
        for (int k = 0; k < 3; ++k) ++count[sorted_pair(t[(k + 1) % 3], t[(k + 2) % 3])];
    }
    std::vector<std::array<int, 2>> out;
    for (const auto& t : cells) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[(k + 1) % 3];
            const int b = t[(k + 2) % 3];
            if (count.at(sorted_pair(a, b)) == 1) out.push_back({a, b});
        }
    }
    return out;
}

} // namespace

Mesh gen_channel_cylinder(int nx, int ny, int n_circ) {
    using G = ChannelGeometry;
    if (nx < 8 || ny < 8 || n_circ < 16) {
        throw Error("gen_channel_cylinder: requires nx, ny >= 8 and n_circ >= 16");
    }
    const double target = 2.0 * std::numbers::pi * G::radius / n_circ;
    const auto xs = graded_nodes({G::length, G::cx, 2.0 * G::radius, 8.0 * G::radius}, nx, target);
    const auto ys = graded_nodes({G::height, G::cy, 2.0 * G::radius, 2.0 * G::radius}, ny, target);

    CutMesh cm;
    const int npx = nx + 1;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) cm.verts.push_back({xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)]});
    }
    auto id = [npx](int i, int j) { return j * npx + i; };
    const Point center{G::cx, G::cy};
    std::vector<char> inside(cm.verts.size(), 0);
    for (std::size_t v = 0; v < cm.verts.size(); ++v) inside[v] = dist(cm.verts[v], center) < G::radius;

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
            for (const Cell& t : {Cell{v00, v10, v11}, Cell{v00, v11, v01}}) {
                const bool cut = inside[static_cast<std::size_t>(t[0])] || inside[static_cast<std::size_t>(t[1])] ||
                                 inside[static_cast<std::size_t>(t[2])];
                const Point g{(cm.verts[t[0]].x + cm.verts[t[1]].x + cm.verts[t[2]].x) / 3.0,
                              (cm.verts[t[0]].y + cm.verts[t[1]].y + cm.verts[t[2]].y) / 3.0};
                if (!cut && dist(g, center) >= G::radius) cm.cells.push_back(t);
            }
        }
    }

    auto on_outer = [&](const Point& p) {
        return p.x == 0.0 || p.x == G::length || p.y == 0.0 || p.y == G::height;
    };
    cm.on_circle.assign(cm.verts.size(), 0);

    // Project exposed vertices; drop cells that end up inside the disk; repeat.
    for (;;) {
        for (const auto& e : directed_boundary(cm.cells)) {
            for (int v : e) {
                auto& p = cm.verts[static_cast<std::size_t>(v)];
                if (on_outer(p) || cm.on_circle[static_cast<std::size_t>(v)]) continue;
                const double r = dist(p, center);
                p = {G::cx + G::radius * (p.x - G::cx) / r, G::cy + G::radius * (p.y - G::cy) / r};
                cm.on_circle[static_cast<std::size_t>(v)] = 1;
            }
        }
        const auto before = cm.cells.size();
        std::erase_if(cm.cells, [&](const Cell& t) {
            const Point g{(cm.verts[t[0]].x + cm.verts[t[1]].x + cm.verts[t[2]].x) / 3.0,
                          (cm.verts[t[0]].y + cm.verts[t[1]].y + cm.verts[t[2]].y) / 3.0};
            return dist(g, center) < G::radius;
        });
        if (cm.cells.size() == before) break;
    }

    auto angle = [&](int v) {
        const auto& p = cm.verts[static_cast<std::size_t>(v)];
        return std::atan2(p.y - G::cy, p.x - G::cx);
    };
    auto is_cyl_edge = [&](const std::array<int, 2>& e) {
        return cm.on_circle[static_cast<std::size_t>(e[0])] && cm.on_circle[static_cast<std::size_t>(e[1])];
    };

    // Refine the polygonal hole until it has at least n_circ vertices.
    for (;;) {
        const auto bnd = directed_boundary(cm.cells);
        std::set<int> circle_verts;
        std::array<int, 2> longest{-1, -1};
        double longest_len = -1.0;
        for (const auto& e : bnd) {
            if (!is_cyl_edge(e)) continue;
            circle_verts.insert(e[0]);
            circle_verts.insert(e[1]);
            const double len = dist(cm.verts[e[0]], cm.verts[e[1]]);
            if (len > longest_len) {
                longest_len = len;
                longest = e;
            }
        }
        if (static_cast<int>(circle_verts.size()) >= n_circ) break;
        if (longest[0] < 0) throw DegenerateCellError("gen_channel_cylinder: hole has no boundary");
        const int a = longest[0];
        const int b = longest[1];
        double ta = angle(a);
        double tb = angle(b);
        // The domain lies to the left of a -> b, so the hole is traversed clockwise.
        if (tb > ta) tb -= 2.0 * std::numbers::pi;
        const double tm = 0.5 * (ta + tb);
        const int m = static_cast<int>(cm.verts.size());
        cm.verts.push_back({G::cx + G::radius * std::cos(tm), G::cy + G::radius * std::sin(tm)});
        cm.on_circle.push_back(1);
        const auto split = [&] {
            for (std::size_t c = 0; c < cm.cells.size(); ++c) {
                const Cell t = cm.cells[c];
                for (int k = 0; k < 3; ++k) {
                    if (t[(k + 1) % 3] != a || t[(k + 2) % 3] != b) continue;
                    Cell first = t;
                    Cell second = t;
                    first[(k + 2) % 3] = m;
                    second[(k + 1) % 3] = m;
                    cm.cells[c] = first;
                    cm.cells.push_back(second);
                    return;
                }
            }
        };
        split();
    }

    for (const auto& t : cm.cells) {
        if (signed_area(cm.verts[t[0]], cm.verts[t[1]], cm.verts[t[2]]) < 1e-14) {
            throw DegenerateCellError("gen_channel_cylinder: projection produced a cell of area " +
                                      std::to_string(signed_area(cm.verts[t[0]], cm.verts[t[1]], cm.verts[t[2]])));
        }
    }

    // Compact away unreferenced vertices, preserving order.
    std::vector<int> remap(cm.verts.size(), -1);
    for (const auto& t : cm.cells) {
        for (int v : t) remap[static_cast<std::size_t>(v)] = 0;
    }
    std::vector<Point> verts;
    std::vector<char> circle;
    for (std::size_t v = 0; v < cm.verts.size(); ++v) {
        if (remap[v] < 0) continue;
        remap[v] = static_cast<int>(verts.size());
        verts.push_back(cm.verts[v]);
        circle.push_back(cm.on_circle[v]);
    }
    for (auto& t : cm.cells) {
        for (int& v : t) v = remap[static_cast<std::size_t>(v)];
    }

    std::vector<BoundaryEdge> bnd;
    for (const auto& e : directed_boundary(cm.cells)) {
        const Point& p = verts[e[0]];
        const Point& q = verts[e[1]];
        BoundaryTag tag;
        if (circle[static_cast<std::size_t>(e[0])] && circle[static_cast<std::size_t>(e[1])]) {
            tag = BoundaryTag::cylinder;
        } else if (p.x == 0.0 && q.x == 0.0) {
            tag = BoundaryTag::inflow;
        } else if (p.x == G::length && q.x == G::length) {
            tag = BoundaryTag::outflow;
        } else if ((p.y == 0.0 && q.y == 0.0) || (p.y == G::height && q.y == G::height)) {
            tag = BoundaryTag::wall;
        } else {
            throw DegenerateCellError("gen_channel_cylinder: boundary edge not on any boundary part");
        }
        bnd.push_back({e, tag});
    }
    return Mesh(std::move(verts), std::move(cm.cells), std::move(bnd));
}

std::string format_mesh(const Mesh& m) {
    std::string out = "ns-mesh 1\n";
    out += std::to_string(m.num_vertices()) + " " + std::to_string(m.num_cells()) + " " +
           std::to_string(m.num_boundary_edges()) + "\n";
    char buf[96];
    for (const auto& p : m.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
        out += buf;
    }
    for (const auto& t : m.cells()) {
        std::snprintf(buf, sizeof buf, "%d %d %d\n", t[0], t[1], t[2]);
        out += buf;
    }
    for (const auto& e : m.boundary_edges()) {
        std::snprintf(buf, sizeof buf, "%d %d %d\n", e.v[0], e.v[1], static_cast<int>(e.tag));
        out += buf;
    }
    return out;
}

namespace {

class LineReader {
public:
    explicit LineReader(const std::string& text) : text_(text) {}

    // Next line split into whitespace-separated tokens; throws at end of input.
    std::vector<std::string_view> next() {
        if (pos_ >= text_.size()) throw ParseError("unexpected end of file", line_ + 1);
        const auto end = text_.find('\n', pos_);
        const auto stop = end == std::string::npos ? text_.size() : end;
        std::string_view line(text_.data() + pos_, stop - pos_);
        pos_ = stop + 1;
        ++line_;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        std::vector<std::string_view> tokens;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
            if (j > i) tokens.push_back(line.substr(i, j - i));
            i = j;
        }
        return tokens;
    }

    bool at_end() const {
        for (std::size_t i = pos_; i < text_.size(); ++i) {
            if (text_[i] != '\n' && text_[i] != '\r' && text_[i] != ' ' && text_[i] != '\t') return false;
        }
        return true;
    }

    int line() const { return line_; }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 0;
};

template <typename T>
T parse_number(std::string_view tok, int line) {
    T value{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError("invalid number '" + std::string(tok) + "'", line);
    }
    return value;
}

void expect_tokens(const std::vector<std::string_view>& toks, std::size_t n, int line) {
    if (toks.size() != n) {
        throw ParseError("expected " + std::to_string(n) + " fields, got " + std::to_string(toks.size()), line);
    }
}

} // namespace

Mesh parse_mesh(const std::string& text) {
    LineReader reader(text);
    auto header = reader.next();
    if (header.size() != 2 || header[0] != "ns-mesh" || header[1] != "1") {
        throw ParseError("expected header 'ns-mesh 1'", reader.line());
    }
    auto counts = reader.next();
    expect_tokens(counts, 3, reader.line());
    const int nv = parse_number<int>(counts[0], reader.line());
    const int nc = parse_number<int>(counts[1], reader.line());
    const int nb = parse_number<int>(counts[2], reader.line());
    if (nv < 0 || nc < 0 || nb < 0) throw ParseError("negative count", reader.line());

    std::vector<Point> verts(static_cast<std::size_t>(nv));
    for (auto& p : verts) {
        auto t = reader.next();
        expect_tokens(t, 2, reader.line());
        p = {parse_number<double>(t[0], reader.line()), parse_number<double>(t[1], reader.line())};
    }
    std::vector<Cell> cells(static_cast<std::size_t>(nc));
    for (auto& c : cells) {
        auto t = reader.next();
        expect_tokens(t, 3, reader.line());
        for (int k = 0; k < 3; ++k) {
            c[static_cast<std::size_t>(k)] = parse_number<int>(t[static_cast<std::size_t>(k)], reader.line());
        }
    }
    std::vector<BoundaryEdge> bnd(static_cast<std::size_t>(nb));
    for (auto& e : bnd) {
        auto t = reader.next();
        expect_tokens(t, 3, reader.line());
        e.v = {parse_number<int>(t[0], reader.line()), parse_number<int>(t[1], reader.line())};
        const int tag = parse_number<int>(t[2], reader.line());
        if (!is_valid_tag(tag)) throw ParseError("unknown boundary tag " + std::to_string(tag), reader.line());
        e.tag = static_cast<BoundaryTag>(tag);
    }
    if (!reader.at_end()) throw ParseError("trailing content", reader.line() + 1);
    return Mesh(std::move(verts), std::move(cells), std::move(bnd));
}

void write_mesh(const Mesh& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << format_mesh(m);
    if (!out) throw Error("failed writing " + path.string());
}

Mesh read_mesh(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_mesh(ss.str());
}

namespace {

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

} // namespace

int locate(const Mesh& m, const Point& p) {
    constexpr double kBaryTol = -1e-12;
    constexpr double kOutsideTol = 1e-9;
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto q = m.cell_points(c);
        const auto l = barycentric(q[0], q[1], q[2], p);
        if (l[0] >= kBaryTol && l[1] >= kBaryTol && l[2] >= kBaryTol) return c;
    }
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto q = m.cell_points(c);
        const double d = std::min({point_segment_distance(p, q[0], q[1]),
                                   point_segment_distance(p, q[1], q[2]),
                                   point_segment_distance(p, q[2], q[0])});
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (best >= 0 && best_d <= kOutsideTol) return best;
    throw NotFoundError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                        ") lies outside the mesh");
}

} // namespace nudged_ns
