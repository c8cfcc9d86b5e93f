#include "fealcore/mesh.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace fealcore;

namespace {

MeshTopology two_triangles()
{
    return build_topology(CellKind::triangle, FloatTensor::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}}),
                          IndexTensor::from_rows({{2, 3, 0}, {1, 0, 3}}));
}

double total(const FloatTensor& t)
{
    double s = 0.0;
    for (double v : t.data()) s += v;
    return s;
}

std::vector<Index> sorted_row(std::span<const Index> r)
{
    std::vector<Index> v(r.begin(), r.end());
    std::sort(v.begin(), v.end());
    return v;
}

/// Local faces of all cells versus the expansion of face_to_cell.
void expect_face_multiset(const MeshTopology& m)
{
    const auto& ref = m.reference();
    std::map<std::vector<Index>, int> local, expanded;
    for (Index c = 0; c < m.number_of_cells(); ++c)
        for (const auto& lf : ref.faces) {
            std::vector<Index> f;
            for (int v : lf) f.push_back(m.cell()(c, v));
            std::sort(f.begin(), f.end());
            ++local[f];
        }
    for (Index f = 0; f < m.number_of_faces(); ++f) {
        const auto key = sorted_row(m.face().row(f));
        const Index c0 = m.face_to_cell()(f, 0), c1 = m.face_to_cell()(f, 1);
        const Index l0 = m.face_to_cell()(f, 2), l1 = m.face_to_cell()(f, 3);
        ++expanded[key];
        if (c0 != c1) {
            ++expanded[key];
        } else {
            EXPECT_EQ(l0, l1);
        }
        for (auto [c, l] : {std::pair{c0, l0}, std::pair{c1, l1}}) {
            std::vector<Index> g;
            for (int v : ref.faces[static_cast<std::size_t>(l)]) g.push_back(m.cell()(c, v));
            std::sort(g.begin(), g.end());
            EXPECT_EQ(g, key);
            EXPECT_EQ(m.cell_to_face()(c, l), f);
        }
    }
    EXPECT_EQ(local, expanded);
}

std::vector<double> values(const FloatTensor& t) { return t.storage(); }

Index count_true(const BoolTensor& b)
{
    return std::count(b.data().begin(), b.data().end(), std::uint8_t{1});
}

} // namespace

TEST(FromBox, TwoTriangleMesh)
{
    const MeshTopology m = from_box(CellKind::triangle, {0.0, 1.0, 0.0, 1.0}, {1, 1});
    EXPECT_EQ(m.node(), FloatTensor::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
    EXPECT_EQ(m.cell(), IndexTensor::from_rows({{2, 3, 0}, {1, 0, 3}}));
}

TEST(FromBox, CountsAndMeasures)
{
    const MeshTopology t = from_box(CellKind::tetrahedron, {0, 1, 0, 1, 0, 1}, {4, 4, 4});
    EXPECT_EQ(t.number_of_nodes(), 125);
    EXPECT_EQ(t.number_of_cells(), 384);
    const MeshTopology i = from_box(CellKind::interval, {0.0, 1.0}, {3});
    EXPECT_EQ(i.number_of_nodes(), 4);
    EXPECT_EQ(i.number_of_cells(), 3);
    for (double v : values(cell_measure(i))) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
    const MeshTopology q = from_box(CellKind::quadrangle, {0, 2, 0, 1}, {2, 2});
    EXPECT_EQ(q.number_of_cells(), 4);
    EXPECT_NEAR(total(cell_measure(q)), 2.0, 1e-14);
    EXPECT_THROW(from_box(CellKind::triangle, {0.0, 1.0, 0.0, 1.0}, {0, 1}), InvalidArgument);
    EXPECT_THROW(from_box(CellKind::triangle, {0.0, 0.0, 0.0, 1.0}, {1, 1}), InvalidArgument);
}

TEST(FromBox, OrientationIsPositive)
{
    for (const auto& m : {from_box(CellKind::triangle, {0, 1, 0, 2}, {3, 5}),
                          from_box(CellKind::quadrangle, {0, 1, 0, 1}, {3, 2}),
                          from_box(CellKind::tetrahedron, {0, 1, 0, 1, 0, 1}, {3, 2, 2})}) {
        for (double v : values(signed_cell_measure(m))) EXPECT_GT(v, 0.0);
    }
}

TEST(Topology, TwoTriangleEdges)
{
    const MeshTopology m = two_triangles();
    ASSERT_EQ(m.number_of_edges(), 5);
    bool shared = false, boundary = false;
    for (Index e = 0; e < 5; ++e) {
        const auto key = sorted_row(m.edge().row(e));
        auto row = m.face_to_cell().row(e);
        if (key == std::vector<Index>{0, 3}) {
            EXPECT_EQ(std::vector<Index>(row.begin(), row.end()), (std::vector<Index>{0, 1, 0, 0}));
            shared = true;
        }
        if (key == std::vector<Index>{0, 2}) {
            EXPECT_EQ(std::vector<Index>(row.begin(), row.end()), (std::vector<Index>{0, 0, 1, 1}));
            boundary = true;
        }
    }
    EXPECT_TRUE(shared && boundary);
    EXPECT_EQ(count_true(boundary_face_flag(m)), 4);
    expect_face_multiset(m);
}

TEST(Topology, SingleTriangle)
{
    const MeshTopology m = build_topology(CellKind::triangle, FloatTensor::from_rows({{0, 0}, {1, 0}, {0, 1}}),
                                          IndexTensor::from_rows({{0, 1, 2}}));
    EXPECT_EQ(m.number_of_faces(), 3);
    for (Index f = 0; f < 3; ++f) {
        EXPECT_EQ(m.face_to_cell()(f, 0), 0);
        EXPECT_EQ(m.face_to_cell()(f, 1), 0);
    }
    EXPECT_EQ(count_true(boundary_face_flag(m)), 3);
}

TEST(Topology, FaceVertexOrderFollowsFirstOccurrence)
{
    // the stored face keeps the unsorted vertex order of the first cell that lists it
    const MeshTopology m = two_triangles();
    for (Index f = 0; f < m.number_of_faces(); ++f) {
        const Index c = m.face_to_cell()(f, 0), l = m.face_to_cell()(f, 2);
        const auto& lf = m.reference().faces[static_cast<std::size_t>(l)];
        for (std::size_t k = 0; k < lf.size(); ++k) EXPECT_EQ(m.face()(f, static_cast<Index>(k)), m.cell()(c, lf[k]));
    }
}

TEST(Topology, TetBoxBoundaryAndDedup)
{
    for (Index n : {1, 2, 4, 8}) {
        const MeshTopology m = from_box(CellKind::tetrahedron, {0, 1, 0, 1, 0, 1}, {n, n, n});
        EXPECT_EQ(count_true(boundary_face_flag(m)), 6 * n * n * 2) << n;
        // every face has one or two neighbours; the neighbour count sums to 4 NC
        Index incidences = 0;
        for (Index f = 0; f < m.number_of_faces(); ++f)
            incidences += m.face_to_cell()(f, 0) == m.face_to_cell()(f, 1) ? 1 : 2;
        EXPECT_EQ(incidences, 4 * m.number_of_cells());
        expect_face_multiset(m);
        // Euler characteristic of a ball: V - E + F - C = 1
        EXPECT_EQ(m.number_of_nodes() - m.number_of_edges() + m.number_of_faces() - m.number_of_cells(), 1);
    }
}

TEST(Topology, NonManifoldFaceIsAnError)
{
    const FloatTensor node = FloatTensor::from_rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, -1}, {1, 1, 1}});
    const IndexTensor cell = IndexTensor::from_rows({{0, 1, 2, 3}, {0, 2, 1, 4}, {0, 1, 2, 5}});
    EXPECT_THROW(build_topology(CellKind::tetrahedron, node, cell), GeometryError);
}

TEST(Topology, RejectsOutOfRangeConnectivity)
{
    EXPECT_THROW(build_topology(CellKind::triangle, FloatTensor::from_rows({{0, 0}, {1, 0}, {0, 1}}),
                                IndexTensor::from_rows({{0, 1, 3}})),
                 InvalidArgument);
}

TEST(Geometry, Measures)
{
    const MeshTopology m = two_triangles();
    EXPECT_EQ(cell_measure(m), FloatTensor::vector({0.5, 0.5}));
    const MeshTopology i = from_box(CellKind::interval, {0.0, 1.0}, {4});
    for (double v : values(cell_measure(i))) EXPECT_DOUBLE_EQ(v, 0.25);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 20; ++t) {
        FloatTensor node({3, 2});
        for (auto& v : node.data()) v = u(rng);
        const double cross = (node(1, 0) - node(0, 0)) * (node(2, 1) - node(0, 1)) -
                             (node(1, 1) - node(0, 1)) * (node(2, 0) - node(0, 0));
        IndexTensor cell = cross > 0 ? IndexTensor::from_rows({{0, 1, 2}}) : IndexTensor::from_rows({{0, 2, 1}});
        const MeshTopology tri = build_topology(CellKind::triangle, node, cell);
        EXPECT_NEAR(cell_measure(tri)[0], 0.5 * std::abs(cross), 1e-14);
    }

    const MeshTopology degenerate = build_topology(
        CellKind::triangle, FloatTensor::from_rows({{0, 0}, {1, 1}, {2, 2}}), IndexTensor::from_rows({{0, 1, 2}}));
    EXPECT_THROW((void)cell_measure(degenerate), GeometryError);
}

TEST(Geometry, GradLambda)
{
    const MeshTopology ref = build_topology(CellKind::triangle, FloatTensor::from_rows({{0, 0}, {1, 0}, {0, 1}}),
                                            IndexTensor::from_rows({{0, 1, 2}}));
    const FloatTensor g = grad_lambda(ref);
    const double expect[3][2] = {{-1, -1}, {1, 0}, {0, 1}};
    for (int i = 0; i < 3; ++i)
        for (int d = 0; d < 2; ++d) EXPECT_NEAR(g(0, i, d), expect[i][d], 1e-15);

    const MeshTopology t = from_box(CellKind::tetrahedron, {0, 1, 0, 2, 0, 1}, {2, 1, 2});
    const FloatTensor gt = grad_lambda(t);
    for (Index c = 0; c < t.number_of_cells(); ++c)
        for (int d = 0; d < 3; ++d) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i) s += gt(c, i, d);
            EXPECT_NEAR(s, 0.0, 1e-14);
        }
}

TEST(Geometry, GradLambdaMatchesFiniteDifferences)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    FloatTensor node({4, 3});
    for (auto& v : node.data()) v = u(rng);
    const double vol = detail::simplex_measure(node, std::vector<Index>{0, 1, 2, 3}, true);
    const IndexTensor cell = vol > 0 ? IndexTensor::from_rows({{0, 1, 2, 3}}) : IndexTensor::from_rows({{0, 2, 1, 3}});
    const MeshTopology m = build_topology(CellKind::tetrahedron, node, cell);
    const FloatTensor g = grad_lambda(m);
    // barycentric coordinates by solving the 4x4 affine system with Cramer's rule
    auto lambda = [&](const std::array<double, 3>& x) {
        std::array<double, 4> out{};
        std::array<Index, 4> v{};
        for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i)] = cell(0, i);
        const double total_vol = detail::simplex_measure(node, v, true);
        for (int i = 0; i < 4; ++i) {
            FloatTensor n2 = node;
            for (int d = 0; d < 3; ++d) n2(v[static_cast<std::size_t>(i)], d) = x[static_cast<std::size_t>(d)];
            out[static_cast<std::size_t>(i)] = detail::simplex_measure(n2, v, true) / total_vol;
        }
        return out;
    };
    const std::array<double, 3> x0{0.1, -0.2, 0.05};
    const double h = 1e-6;
    for (int d = 0; d < 3; ++d) {
        auto xp = x0, xm = x0;
        xp[static_cast<std::size_t>(d)] += h;
        xm[static_cast<std::size_t>(d)] -= h;
        const auto lp = lambda(xp), lm = lambda(xm);
        for (int i = 0; i < 4; ++i)
            EXPECT_NEAR(g(0, i, d), (lp[static_cast<std::size_t>(i)] - lm[static_cast<std::size_t>(i)]) / (2 * h), 1e-8);
    }
}

TEST(Geometry, BarycentricToPoint)
{
    const MeshTopology m = two_triangles();
    const FloatTensor e0 = FloatTensor::from_rows({{1, 0, 0}});
    const FloatTensor x = bc_to_point(m, e0);
    EXPECT_EQ(x(0, 0, 0), 1.0);
    EXPECT_EQ(x(0, 0, 1), 0.0);
    const FloatTensor mid = FloatTensor::from_rows({{1.0 / 3, 1.0 / 3, 1.0 / 3}});
    const FloatTensor c = bc_to_point(m, mid);
    EXPECT_NEAR(c(0, 0, 0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(c(0, 0, 1), 1.0 / 3.0, 1e-15);
    EXPECT_THROW(bc_to_point(m, FloatTensor::from_rows({{0.5, 0.5, 0.1}})), InvalidArgument);

    // affine functions commute with the map
    const FloatTensor bc = FloatTensor::from_rows({{0.2, 0.3, 0.5}, {0.6, 0.1, 0.3}});
    const FloatTensor p = bc_to_point(m, bc);
    auto f = [](double a, double b) { return 3.0 * a - 2.0 * b + 0.5; };
    for (Index cc = 0; cc < 2; ++cc)
        for (Index q = 0; q < 2; ++q) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i) {
                const Index v = m.cell()(cc, i);
                s += bc(q, i) * f(m.node()(v, 0), m.node()(v, 1));
            }
            EXPECT_NEAR(f(p(cc, q, 0), p(cc, q, 1)), s, 1e-14);
        }
}

TEST(Refinement, TwoTrianglesOnce)
{
    const MeshTopology r = uniform_refine(two_triangles(), 1);
    EXPECT_EQ(r.number_of_nodes(), 9);
    EXPECT_EQ(r.number_of_cells(), 8);
    EXPECT_NEAR(total(cell_measure(r)), 1.0, 1e-14);
    for (double v : values(signed_cell_measure(r))) EXPECT_GT(v, 0.0);
    const MeshTopology same = uniform_refine(two_triangles(), 0);
    EXPECT_EQ(same.cell(), two_triangles().cell());
}

TEST(Refinement, TetBoxConservesMeasureAndOrientation)
{
    const MeshTopology m = from_box(CellKind::tetrahedron, {0, 1, 0, 1, 0, 1}, {4, 4, 4});
    const MeshTopology r = uniform_refine(m, 1);
    EXPECT_EQ(r.number_of_nodes(), 729);
    EXPECT_EQ(r.number_of_cells(), 8 * 384);
    EXPECT_NEAR(total(cell_measure(r)), 1.0, 1e-12);
    for (double v : values(signed_cell_measure(r))) EXPECT_GT(v, 0.0);
    expect_face_multiset(r);

    const MeshTopology r2 = uniform_refine(from_box(CellKind::tetrahedron, {0, 2, 0, 1, 0, 3}, {1, 2, 1}), 2);
    EXPECT_NEAR(total(cell_measure(r2)), 6.0, 6e-12);
}

namespace {

/// Each cell of the finer box lies inside exactly one coarse cell, and every
/// coarse cell holds 2^TD of them.
void expect_box_nesting(CellKind kind, Index n)
{
    const bool tet = kind == CellKind::tetrahedron;
    const MeshTopology coarse = tet ? from_box(kind, {0, 1, 0, 1, 0, 1}, {n, n, n}) : from_box(kind, {0, 1, 0, 1}, {n, n});
    const MeshTopology fine =
        tet ? from_box(kind, {0, 1, 0, 1, 0, 1}, {2 * n, 2 * n, 2 * n}) : from_box(kind, {0, 1, 0, 1}, {2 * n, 2 * n});
    const FloatTensor g = grad_lambda(coarse);
    const int td = coarse.top_dim();
    auto lambda = [&](Index c, std::span<const double> x, int i) {
        double s = i == 0 ? 1.0 : 0.0;
        for (int d = 0; d < td; ++d) s += g(c, i, d) * (x[static_cast<std::size_t>(d)] - coarse.node()(coarse.cell()(c, 0), d));
        return s;
    };
    std::vector<int> children(static_cast<std::size_t>(coarse.number_of_cells()), 0);
    for (Index f = 0; f < fine.number_of_cells(); ++f) {
        int hits = 0;
        for (Index c = 0; c < coarse.number_of_cells(); ++c) {
            bool inside = true;
            for (Index v = 0; v <= td && inside; ++v) {
                const auto x = fine.node().row(fine.cell()(f, v));
                for (int i = 0; i <= td; ++i) inside = inside && lambda(c, x, i) > -1e-12;
            }
            if (inside) {
                ++hits;
                ++children[static_cast<std::size_t>(c)];
            }
        }
        EXPECT_EQ(hits, 1) << "fine cell " << f;
    }
    for (int k : children) EXPECT_EQ(k, 1 << td);
}

} // namespace

TEST(Refinement, FinerBoxIsNestedUniformRefinement)
{
    expect_box_nesting(CellKind::triangle, 3);
    expect_box_nesting(CellKind::tetrahedron, 2);
}

TEST(Refinement, RefinedTetBoxEqualsFinerBox)
{
    // compare cells as sets of vertex coordinates on the 1/8 lattice
    auto key = [](const MeshTopology& m) {
        std::set<std::set<std::array<long, 3>>> cells;
        for (Index c = 0; c < m.number_of_cells(); ++c) {
            std::set<std::array<long, 3>> t;
            for (int v = 0; v < 4; ++v) {
                const auto x = m.node().row(m.cell()(c, v));
                t.insert({std::lround(8 * x[0]), std::lround(8 * x[1]), std::lround(8 * x[2])});
            }
            cells.insert(t);
        }
        return cells;
    };
    const MeshTopology r = uniform_refine(from_box(CellKind::tetrahedron, {0, 1, 0, 1, 0, 1}, {2, 2, 2}), 1);
    const MeshTopology b = from_box(CellKind::tetrahedron, {0, 1, 0, 1, 0, 1}, {4, 4, 4});
    EXPECT_EQ(key(r), key(b));
    for (double v : values(signed_cell_measure(r))) EXPECT_GT(v, 0.0);
    for (double v : values(signed_cell_measure(uniform_refine(r, 1)))) EXPECT_GT(v, 0.0);
}

TEST(Refinement, MidpointsAreAppendedInEdgeOrder)
{
    const MeshTopology m = two_triangles();
    const MeshTopology r = uniform_refine(m, 1);
    for (Index e = 0; e < m.number_of_edges(); ++e)
        for (int d = 0; d < 2; ++d)
            EXPECT_DOUBLE_EQ(r.node()(4 + e, d), 0.5 * (m.node()(m.edge()(e, 0), d) + m.node()(m.edge()(e, 1), d)));
    EXPECT_THROW(uniform_refine(from_box(CellKind::quadrangle, {0, 1, 0, 1}, {1, 1}), 1), InvalidArgument);
}

TEST(Polygons, PointerStorage)
{
    const PolygonCellArray one = polygon_cells(IndexTensor::vector({0, 1, 2, 3}), IndexTensor::vector({0, 4}));
    EXPECT_EQ(one.number_of_polygons(), 1);
    EXPECT_EQ(one.vertices(0).size(), 4u);
    const FloatTensor square = FloatTensor::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    EXPECT_DOUBLE_EQ(one.measure(square)[0], 1.0);

    const PolygonCellArray two =
        polygon_cells(IndexTensor::vector({0, 1, 2, 0, 1, 2, 3}), IndexTensor::vector({0, 3, 7}));
    EXPECT_EQ(two.sizes(), (std::vector<Index>{3, 4}));

    EXPECT_THROW(polygon_cells(IndexTensor::vector({0, 1, 2, 3}), IndexTensor::vector({0, 4, 2})), InvalidArgument);
    EXPECT_THROW(polygon_cells(IndexTensor::vector({0, 1}), IndexTensor::vector({0, 2})), InvalidArgument);
}
