#pragma once

// Unstructured mesh storage: a node coordinate tensor [NN, GD] plus integer
// connectivity tensors. Lower-dimensional entities are collected from every
// cell, sorted per row and deduplicated through the backend's lexsort; the
// first and last occurrence of each face give face_to_cell by floor division
// and modulo with the number of faces per cell.

#include "backend.hpp"
#include "error.hpp"
#include "tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace fealcore {

enum class CellKind { interval, triangle, quadrangle, tetrahedron };

inline std::string_view to_string(CellKind kind)
{
    switch (kind) {
    case CellKind::interval: return "interval";
    case CellKind::triangle: return "triangle";
    case CellKind::quadrangle: return "quadrangle";
    case CellKind::tetrahedron: return "tetrahedron";
    }
    return "?";
}

inline CellKind parse_cell_kind(std::string_view name)
{
    if (name == "interval") return CellKind::interval;
    if (name == "triangle") return CellKind::triangle;
    if (name == "quadrangle") return CellKind::quadrangle;
    if (name == "tetrahedron") return CellKind::tetrahedron;
    throw InvalidArgument(detail::concat("unknown cell kind '", name, "'"));
}

/// Reference-cell tables. Face i of a simplex is opposite vertex i and is
/// ordered so that its right-hand normal points out of the cell.
struct ReferenceTopology {
    int td;
    int nvc;
    std::vector<std::vector<int>> faces;
    std::vector<std::array<int, 2>> edges;

    [[nodiscard]] bool is_simplex() const noexcept { return nvc == td + 1; }

    static const ReferenceTopology& of(CellKind kind)
    {
        static const ReferenceTopology interval{1, 2, {{1}, {0}}, {{0, 1}}};
        static const ReferenceTopology triangle{2, 3, {{1, 2}, {2, 0}, {0, 1}}, {{1, 2}, {2, 0}, {0, 1}}};
        static const ReferenceTopology quadrangle{
            2, 4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}};
        static const ReferenceTopology tetrahedron{
            3, 4,
            {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}},
            {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
        switch (kind) {
        case CellKind::interval: return interval;
        case CellKind::triangle: return triangle;
        case CellKind::quadrangle: return quadrangle;
        case CellKind::tetrahedron: return tetrahedron;
        }
        return triangle;
    }
};

class MeshTopology;
MeshTopology build_topology(CellKind kind, FloatTensor node, IndexTensor cell);

/// Node/cell tensors and the derived connectivity. Immutable once built.
class MeshTopology {
public:
    [[nodiscard]] CellKind kind() const noexcept { return kind_; }
    [[nodiscard]] const ReferenceTopology& reference() const { return ReferenceTopology::of(kind_); }
    [[nodiscard]] int top_dim() const noexcept { return td_; }
    [[nodiscard]] int geo_dim() const noexcept { return static_cast<int>(node_.shape(1)); }
    [[nodiscard]] bool is_simplex() const { return reference().is_simplex(); }

    [[nodiscard]] Index number_of_nodes() const { return node_.shape(0); }
    [[nodiscard]] Index number_of_cells() const { return cell_.shape(0); }
    [[nodiscard]] Index number_of_edges() const { return edge_.shape(0); }
    [[nodiscard]] Index number_of_faces() const { return face_.shape(0); }
    [[nodiscard]] Index number_of_entities(int dim) const
    {
        if (dim == 0) return number_of_nodes();
        if (dim == td_) return number_of_cells();
        if (dim == td_ - 1) return number_of_faces();
        if (dim == 1) return number_of_edges();
        throw InvalidArgument(detail::concat("no entities of dimension ", dim));
    }

    [[nodiscard]] const FloatTensor& node() const noexcept { return node_; }
    [[nodiscard]] const IndexTensor& cell() const noexcept { return cell_; }
    [[nodiscard]] const IndexTensor& edge() const noexcept { return edge_; }
    [[nodiscard]] const IndexTensor& face() const noexcept { return face_; }
    /// [NF, 4]: left/front cell, right/back cell, local index left, local index right.
    [[nodiscard]] const IndexTensor& face_to_cell() const noexcept { return face_to_cell_; }
    [[nodiscard]] const IndexTensor& cell_to_face() const noexcept { return cell_to_face_; }
    [[nodiscard]] const IndexTensor& cell_to_edge() const noexcept { return cell_to_edge_; }

    /// Connectivity of the entities of dimension dim (nodes as [NN, 1]).
    [[nodiscard]] IndexTensor entity(int dim) const
    {
        if (dim == td_) return cell_;
        if (dim == td_ - 1) return face_;
        if (dim == 1) return edge_;
        if (dim == 0) {
            IndexTensor n({number_of_nodes(), 1});
            std::iota(n.data().begin(), n.data().end(), Index{0});
            return n;
        }
        throw InvalidArgument(detail::concat("no entities of dimension ", dim));
    }

    [[nodiscard]] std::array<double, 3> point(Index n) const
    {
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int d = 0; d < geo_dim(); ++d) x[static_cast<std::size_t>(d)] = node_(n, d);
        return x;
    }

private:
    friend MeshTopology build_topology(CellKind, FloatTensor, IndexTensor);

    CellKind kind_ = CellKind::triangle;
    int td_ = 2;
    FloatTensor node_;
    IndexTensor cell_;
    IndexTensor edge_;
    IndexTensor face_;
    IndexTensor face_to_cell_;
    IndexTensor cell_to_face_;
    IndexTensor cell_to_edge_;
};

namespace detail {

struct Dedup {
    IndexTensor entity;        // first-occurrence vertex order
    IndexTensor first;         // flat index of first occurrence
    IndexTensor last;
    IndexTensor cell_to_entity;
    std::vector<Index> count;
};

inline Dedup dedup_local_entities(const IndexTensor& cell, const std::vector<std::vector<int>>& local)
{
    const Index nc = cell.shape(0);
    const auto nlocal = static_cast<Index>(local.size());
    const auto nv = static_cast<Index>(local.front().size());
    IndexTensor total({nc * nlocal, nv});
    IndexTensor sorted({nc * nlocal, nv});
    for (Index c = 0; c < nc; ++c) {
        for (Index f = 0; f < nlocal; ++f) {
            auto dst = total.row(c * nlocal + f);
            for (Index v = 0; v < nv; ++v)
                dst[static_cast<std::size_t>(v)] = cell(c, local[static_cast<std::size_t>(f)][static_cast<std::size_t>(v)]);
            auto s = sorted.row(c * nlocal + f);
            std::copy(dst.begin(), dst.end(), s.begin());
            std::sort(s.begin(), s.end());
        }
    }
    UniqueRows u = bm().unique_rows(sorted);
    Dedup out;
    const Index ne = u.unique.shape(0);
    out.entity = IndexTensor({ne, nv});
    for (Index e = 0; e < ne; ++e) {
        auto src = total.row(u.first_index[e]);
        std::copy(src.begin(), src.end(), out.entity.row(e).begin());
    }
    out.first = std::move(u.first_index);
    out.last = std::move(u.last_index);
    out.cell_to_entity = std::move(u.inverse).reshaped({nc, nlocal});
    out.count.assign(static_cast<std::size_t>(ne), 0);
    for (Index i : out.cell_to_entity.storage()) ++out.count[static_cast<std::size_t>(i)];
    return out;
}

} // namespace detail

/// Validate node/cell tensors and derive edges, faces, face_to_cell, cell_to_face, cell_to_edge.
inline MeshTopology build_topology(CellKind kind, FloatTensor node, IndexTensor cell)
{
    const ReferenceTopology& ref = ReferenceTopology::of(kind);
    FEALCORE_THROW_IF(node.ndim() != 2 || node.shape(1) < 1 || node.shape(1) > 3, InvalidArgument,
                      "build_topology: node tensor must be [NN, GD] with 1 <= GD <= 3");
    FEALCORE_THROW_IF(cell.ndim() != 2 || cell.shape(1) != ref.nvc, InvalidArgument,
                      "build_topology: ", to_string(kind), " cells need ", ref.nvc, " vertices per row");
    FEALCORE_THROW_IF(ref.td > node.shape(1), InvalidArgument,
                      "build_topology: topological dimension ", ref.td, " exceeds geometric dimension ",
                      node.shape(1));
    const Index nn = node.shape(0);
    for (Index i = 0; i < cell.size(); ++i) {
        FEALCORE_THROW_IF(cell[i] < 0 || cell[i] >= nn, InvalidArgument, "build_topology: cell ",
                          i / ref.nvc, " references node ", cell[i], " outside [0, ", nn, ")");
    }

    MeshTopology mesh;
    mesh.kind_ = kind;
    mesh.td_ = ref.td;
    mesh.node_ = std::move(node);
    mesh.cell_ = std::move(cell);
    const Index nc = mesh.cell_.shape(0);
    const auto nfc = static_cast<Index>(ref.faces.size());

    detail::Dedup faces = detail::dedup_local_entities(mesh.cell_, ref.faces);
    for (std::size_t f = 0; f < faces.count.size(); ++f) {
        if (faces.count[f] > 2) {
            auto verts = faces.entity.row(static_cast<Index>(f));
            std::string names;
            for (Index v : verts) names += detail::concat(names.empty() ? "" : ",", v);
            throw GeometryError(detail::concat("build_topology: face ", f, " {", names, "} is shared by ",
                                               faces.count[f], " cells (non-manifold)"));
        }
    }
    const Index nf = faces.entity.shape(0);
    mesh.face_to_cell_ = IndexTensor({nf, 4});
    for (Index f = 0; f < nf; ++f) {
        mesh.face_to_cell_(f, 0) = faces.first[f] / nfc;
        mesh.face_to_cell_(f, 1) = faces.last[f] / nfc;
        mesh.face_to_cell_(f, 2) = faces.first[f] % nfc;
        mesh.face_to_cell_(f, 3) = faces.last[f] % nfc;
    }
    mesh.face_ = std::move(faces.entity);
    mesh.cell_to_face_ = std::move(faces.cell_to_entity);

    if (ref.td == 1) {
        mesh.edge_ = mesh.cell_;
        mesh.cell_to_edge_ = IndexTensor({nc, 1});
        std::iota(mesh.cell_to_edge_.data().begin(), mesh.cell_to_edge_.data().end(), Index{0});
    } else if (ref.td == 2) {
        mesh.edge_ = mesh.face_;
        mesh.cell_to_edge_ = mesh.cell_to_face_;
    } else {
        std::vector<std::vector<int>> local;
        for (const auto& e : ref.edges) local.push_back({e[0], e[1]});
        detail::Dedup edges = detail::dedup_local_entities(mesh.cell_, local);
        mesh.edge_ = std::move(edges.entity);
        mesh.cell_to_edge_ = std::move(edges.cell_to_entity);
    }
    return mesh;
}

// ---------------------------------------------------------------------------
// Structured constructors

/// Structured grid on box = {x0, x1[, y0, y1[, z0, z1]]} with the given divisions.
/// Nodes are numbered axis-nested with the last axis fastest.
inline MeshTopology from_box(CellKind kind, std::span<const double> box, std::span<const Index> divisions)
{
    const int td = ReferenceTopology::of(kind).td;
    FEALCORE_THROW_IF(static_cast<int>(box.size()) != 2 * td, InvalidArgument,
                      "from_box: ", to_string(kind), " needs ", 2 * td, " box bounds, got ", box.size());
    FEALCORE_THROW_IF(static_cast<int>(divisions.size()) != td, InvalidArgument,
                      "from_box: ", to_string(kind), " needs ", td, " division counts, got ", divisions.size());
    for (int a = 0; a < td; ++a) {
        FEALCORE_THROW_IF(divisions[static_cast<std::size_t>(a)] < 1, InvalidArgument,
                          "from_box: division count along axis ", a, " must be >= 1");
        FEALCORE_THROW_IF(!(box[static_cast<std::size_t>(2 * a + 1)] > box[static_cast<std::size_t>(2 * a)]),
                          InvalidArgument, "from_box: degenerate box along axis ", a);
    }
    std::array<Index, 3> n{1, 1, 1};
    std::array<double, 3> h{0, 0, 0};
    for (int a = 0; a < td; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        n[ua] = divisions[ua];
        h[ua] = (box[2 * ua + 1] - box[2 * ua]) / static_cast<double>(n[ua]);
    }

    std::array<Index, 3> np{n[0] + 1, td > 1 ? n[1] + 1 : 1, td > 2 ? n[2] + 1 : 1};
    const Index nn = np[0] * np[1] * np[2];
    FloatTensor node({nn, td});
    for (Index i = 0; i < np[0]; ++i)
        for (Index j = 0; j < np[1]; ++j)
            for (Index k = 0; k < np[2]; ++k) {
                const Index id = (i * np[1] + j) * np[2] + k;
                const std::array<Index, 3> ijk{i, j, k};
                for (int a = 0; a < td; ++a) {
                    const auto ua = static_cast<std::size_t>(a);
                    node(id, a) = ijk[ua] == n[ua] ? box[2 * ua + 1] : box[2 * ua] + static_cast<double>(ijk[ua]) * h[ua];
                }
            }
    auto idx = [&](Index i, Index j, Index k) { return (i * np[1] + j) * np[2] + k; };

    IndexTensor cell;
    switch (kind) {
    case CellKind::interval: {
        cell = IndexTensor({n[0], 2});
        for (Index i = 0; i < n[0]; ++i) {
            cell(i, 0) = i;
            cell(i, 1) = i + 1;
        }
        break;
    }
    case CellKind::triangle: {
        const Index nq = n[0] * n[1];
        cell = IndexTensor({2 * nq, 3});
        for (Index i = 0; i < n[0]; ++i)
            for (Index j = 0; j < n[1]; ++j) {
                const Index c = i * n[1] + j;
                cell(c, 0) = idx(i + 1, j, 0);
                cell(c, 1) = idx(i + 1, j + 1, 0);
                cell(c, 2) = idx(i, j, 0);
                cell(nq + c, 0) = idx(i, j + 1, 0);
                cell(nq + c, 1) = idx(i, j, 0);
                cell(nq + c, 2) = idx(i + 1, j + 1, 0);
            }
        break;
    }
    case CellKind::quadrangle: {
        cell = IndexTensor({n[0] * n[1], 4});
        for (Index i = 0; i < n[0]; ++i)
            for (Index j = 0; j < n[1]; ++j) {
                const Index c = i * n[1] + j;
                cell(c, 0) = idx(i, j, 0);
                cell(c, 1) = idx(i + 1, j, 0);
                cell(c, 2) = idx(i + 1, j + 1, 0);
                cell(c, 3) = idx(i, j + 1, 0);
            }
        break;
    }
    case CellKind::tetrahedron: {
        // six tetrahedra around the main diagonal (corner 0 to corner 6) of every cube;
        // each lists its vertices along a monotone path from corner 0
        static constexpr std::array<std::array<int, 4>, 6> split{{
            {0, 1, 2, 6}, {0, 5, 1, 6}, {0, 4, 5, 6}, {0, 7, 4, 6}, {0, 3, 7, 6}, {0, 2, 3, 6}}};
        const Index ncube = n[0] * n[1] * n[2];
        cell = IndexTensor({6 * ncube, 4});
        for (Index i = 0; i < n[0]; ++i)
            for (Index j = 0; j < n[1]; ++j)
                for (Index k = 0; k < n[2]; ++k) {
                    const Index cube = (i * n[1] + j) * n[2] + k;
                    const std::array<Index, 8> corner{
                        idx(i, j, k),         idx(i + 1, j, k),         idx(i + 1, j + 1, k),
                        idx(i, j + 1, k),     idx(i, j, k + 1),         idx(i + 1, j, k + 1),
                        idx(i + 1, j + 1, k + 1), idx(i, j + 1, k + 1)};
                    for (Index t = 0; t < 6; ++t)
                        for (int v = 0; v < 4; ++v)
                            cell(cube * 6 + t, v) = corner[static_cast<std::size_t>(split[static_cast<std::size_t>(t)][static_cast<std::size_t>(v)])];
                }
        break;
    }
    }
    return build_topology(kind, std::move(node), std::move(cell));
}

inline MeshTopology from_box(CellKind kind, std::initializer_list<double> box,
                             std::initializer_list<Index> divisions)
{
    return from_box(kind, std::span<const double>(box.begin(), box.size()),
                    std::span<const Index>(divisions.begin(), divisions.size()));
}

// ---------------------------------------------------------------------------
// Geometry

namespace detail {

/// Signed measure of simplex vertices (TD == GD), or unsigned Gram measure otherwise.
inline double simplex_measure(const FloatTensor& node, std::span<const Index> verts, bool signed_measure)
{
    const int gd = static_cast<int>(node.shape(1));
    const int td = static_cast<int>(verts.size()) - 1;
    if (td == 0) return 0.0;
    double jac[3][3] = {};
    for (int i = 0; i < td; ++i)
        for (int d = 0; d < gd; ++d)
            jac[d][i] = node(verts[static_cast<std::size_t>(i + 1)], d) - node(verts[0], d);
    const double fact = td == 1 ? 1.0 : (td == 2 ? 2.0 : 6.0);
    if (td == gd) {
        double det = 0.0;
        if (td == 1) det = jac[0][0];
        else if (td == 2) det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        else
            det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) -
                  jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0]) +
                  jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
        return signed_measure ? det / fact : std::abs(det) / fact;
    }
    // embedded simplex: sqrt(det(J^T J))
    double g[3][3] = {};
    for (int a = 0; a < td; ++a)
        for (int b = 0; b < td; ++b)
            for (int d = 0; d < gd; ++d) g[a][b] += jac[d][a] * jac[d][b];
    double det = td == 1 ? g[0][0] : g[0][0] * g[1][1] - g[0][1] * g[1][0];
    return std::sqrt(std::max(det, 0.0)) / fact;
}

inline double polygon_signed_area(const FloatTensor& node, std::span<const Index> verts)
{
    double a = 0.0;
    const std::size_t n = verts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Index p = verts[i];
        const Index q = verts[(i + 1) % n];
        a += node(p, 0) * node(q, 1) - node(q, 0) * node(p, 1);
    }
    return 0.5 * a;
}

inline double bbox_diameter(const FloatTensor& node)
{
    double diam = 0.0;
    for (Index d = 0; d < node.shape(1); ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Index i = 0; i < node.shape(0); ++i) {
            lo = std::min(lo, node(i, d));
            hi = std::max(hi, node(i, d));
        }
        if (node.shape(0) > 0) diam = std::max(diam, hi - lo);
    }
    return diam;
}

} // namespace detail

/// Signed cell measures (area/volume with orientation); positive for valid meshes.
inline FloatTensor signed_cell_measure(const MeshTopology& mesh)
{
    FEALCORE_THROW_IF(mesh.top_dim() != mesh.geo_dim(), InvalidArgument,
                      "signed_cell_measure: requires TD == GD");
    const Index nc = mesh.number_of_cells();
    FloatTensor m({nc});
    bm().parallel_for(nc, [&](Index b, Index e) {
        for (Index c = b; c < e; ++c) {
            auto verts = mesh.cell().row(c);
            m[c] = mesh.kind() == CellKind::quadrangle ? detail::polygon_signed_area(mesh.node(), verts)
                                                       : detail::simplex_measure(mesh.node(), verts, true);
        }
    });
    return m;
}

/// Unsigned measures of all entities of dimension dim (length/area/volume).
inline FloatTensor entity_measure(const MeshTopology& mesh, int dim)
{
    FEALCORE_THROW_IF(dim < 0 || dim > mesh.top_dim(), InvalidArgument,
                      "entity_measure: dimension ", dim, " outside [0, ", mesh.top_dim(), "]");
    const IndexTensor ent = mesh.entity(dim);
    const Index n = ent.shape(0);
    FloatTensor m({n});
    if (dim == 0) return m;
    const bool quad = mesh.kind() == CellKind::quadrangle && dim == 2;
    const double tol = 1e-14 * std::pow(std::max(detail::bbox_diameter(mesh.node()), 1e-300), dim);
    bm().parallel_for(n, [&](Index b, Index e) {
        for (Index i = b; i < e; ++i) {
            auto verts = ent.row(i);
            const double v = quad ? std::abs(detail::polygon_signed_area(mesh.node(), verts))
                                  : detail::simplex_measure(mesh.node(), verts, false);
            FEALCORE_THROW_IF(!(v > tol), GeometryError, "entity_measure: entity ", i, " of dimension ",
                              dim, " is degenerate (measure ", v, ")");
            m[i] = v;
        }
    });
    return m;
}

inline FloatTensor cell_measure(const MeshTopology& mesh) { return entity_measure(mesh, mesh.top_dim()); }

/// Gradients of the barycentric coordinates, [NC, TD+1, GD]; constant per cell.
inline FloatTensor grad_lambda(const MeshTopology& mesh)
{
    FEALCORE_THROW_IF(!mesh.is_simplex(), InvalidArgument, "grad_lambda: simplex mesh required, got ",
                      to_string(mesh.kind()));
    const int td = mesh.top_dim();
    const int gd = mesh.geo_dim();
    const Index nc = mesh.number_of_cells();
    FloatTensor out({nc, td + 1, gd});
    const double scale = std::max(detail::bbox_diameter(mesh.node()), 1e-300);
    bm().parallel_for(nc, [&](Index b, Index e) {
        for (Index c = b; c < e; ++c) {
            auto v = mesh.cell().row(c);
            double jac[3][3] = {}; // jac[d][i] = x_{i+1,d} - x_{0,d}
            for (int i = 0; i < td; ++i)
                for (int d = 0; d < gd; ++d)
                    jac[d][i] = mesh.node()(v[static_cast<std::size_t>(i + 1)], d) - mesh.node()(v[0], d);
            double g[3][3] = {};
            for (int a = 0; a < td; ++a)
                for (int bb = 0; bb < td; ++bb)
                    for (int d = 0; d < gd; ++d) g[a][bb] += jac[d][a] * jac[d][bb];
            double inv[3][3] = {};
            double det = 0.0;
            if (td == 1) {
                det = g[0][0];
                inv[0][0] = 1.0 / det;
            } else if (td == 2) {
                det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
                inv[0][0] = g[1][1] / det;
                inv[1][1] = g[0][0] / det;
                inv[0][1] = -g[0][1] / det;
                inv[1][0] = -g[1][0] / det;
            } else {
                det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                      g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                      g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
                for (int r = 0; r < 3; ++r)
                    for (int s = 0; s < 3; ++s) {
                        const int r1 = (r + 1) % 3, r2 = (r + 2) % 3, s1 = (s + 1) % 3, s2 = (s + 2) % 3;
                        inv[s][r] = (g[r1][s1] * g[r2][s2] - g[r1][s2] * g[r2][s1]) / det;
                    }
            }
            FEALCORE_THROW_IF(!(std::abs(det) > 1e-28 * std::pow(scale, 4 * td)), GeometryError,
                              "grad_lambda: cell ", c, " is degenerate");
            for (int d = 0; d < gd; ++d) {
                double sum = 0.0;
                for (int i = 0; i < td; ++i) {
                    double gi = 0.0;
                    for (int a = 0; a < td; ++a) gi += inv[i][a] * jac[d][a];
                    out(c, i + 1, d) = gi;
                    sum += gi;
                }
                out(c, 0, d) = -sum;
            }
        }
    });
    return out;
}

/// Map barycentric points [NQ, TD+1] into every cell: [NC, NQ, GD].
inline FloatTensor bc_to_point(const MeshTopology& mesh, const FloatTensor& bc)
{
    FEALCORE_THROW_IF(!mesh.is_simplex(), InvalidArgument, "bc_to_point: simplex mesh required");
    const int nv = mesh.top_dim() + 1;
    FEALCORE_THROW_IF(bc.ndim() != 2 || bc.shape(1) != nv, InvalidArgument,
                      "bc_to_point: barycentric points must be [NQ, ", nv, "]");
    const Index nq = bc.shape(0);
    for (Index q = 0; q < nq; ++q) {
        double s = 0.0;
        for (int i = 0; i < nv; ++i) s += bc(q, i);
        FEALCORE_THROW_IF(std::abs(s - 1.0) > 1e-12, InvalidArgument, "bc_to_point: row ", q,
                          " sums to ", s, ", not 1");
    }
    const Index nc = mesh.number_of_cells();
    const int gd = mesh.geo_dim();
    FloatTensor out({nc, nq, gd});
    bm().parallel_for(nc, [&](Index b, Index e) {
        for (Index c = b; c < e; ++c) {
            auto v = mesh.cell().row(c);
            for (Index q = 0; q < nq; ++q)
                for (int d = 0; d < gd; ++d) {
                    double x = 0.0;
                    for (int i = 0; i < nv; ++i) x += bc(q, i) * mesh.node()(v[static_cast<std::size_t>(i)], d);
                    out(c, q, d) = x;
                }
        }
    });
    return out;
}

/// Map bilinear reference points [NQ, 2] in [0,1]^2 into every quadrangle: [NC, NQ, GD].
inline FloatTensor quad_ref_to_point(const MeshTopology& mesh, const FloatTensor& ref)
{
    FEALCORE_THROW_IF(mesh.kind() != CellKind::quadrangle, InvalidArgument,
                      "quad_ref_to_point: quadrangle mesh required");
    const Index nq = ref.shape(0);
    const Index nc = mesh.number_of_cells();
    const int gd = mesh.geo_dim();
    FloatTensor out({nc, nq, gd});
    for (Index c = 0; c < nc; ++c) {
        auto v = mesh.cell().row(c);
        for (Index q = 0; q < nq; ++q) {
            const double s = ref(q, 0), t = ref(q, 1);
            const double w[4] = {(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
            for (int d = 0; d < gd; ++d) {
                double x = 0.0;
                for (int i = 0; i < 4; ++i) x += w[i] * mesh.node()(v[static_cast<std::size_t>(i)], d);
                out(c, q, d) = x;
            }
        }
    }
    return out;
}

inline BoolTensor boundary_face_flag(const MeshTopology& mesh)
{
    const Index nf = mesh.number_of_faces();
    BoolTensor flag({nf});
    for (Index f = 0; f < nf; ++f) flag[f] = mesh.face_to_cell()(f, 0) == mesh.face_to_cell()(f, 1);
    return flag;
}

// ---------------------------------------------------------------------------
// Uniform refinement

/// Split every simplex at its edge midpoints n times. Old nodes keep their
/// indices; midpoints are appended in edge-index order.
inline MeshTopology uniform_refine(const MeshTopology& mesh, int n = 1)
{
    FEALCORE_THROW_IF(n < 0, InvalidArgument, "uniform_refine: negative repetition count");
    FEALCORE_THROW_IF(!mesh.is_simplex(), InvalidArgument, "uniform_refine: unsupported cell kind ",
                      to_string(mesh.kind()));
    MeshTopology cur = mesh;
    for (int it = 0; it < n; ++it) {
        const Index nn = cur.number_of_nodes();
        const Index ne = cur.number_of_edges();
        const Index nc = cur.number_of_cells();
        const int gd = cur.geo_dim();
        FloatTensor node({nn + ne, gd});
        std::copy(cur.node().data().begin(), cur.node().data().end(), node.data().begin());
        for (Index e = 0; e < ne; ++e)
            for (int d = 0; d < gd; ++d)
                node(nn + e, d) = 0.5 * (cur.node()(cur.edge()(e, 0), d) + cur.node()(cur.edge()(e, 1), d));

        const IndexTensor& cell = cur.cell();
        const IndexTensor& c2e = cur.cell_to_edge();
        IndexTensor out;
        switch (cur.kind()) {
        case CellKind::interval: {
            out = IndexTensor({2 * nc, 2});
            for (Index c = 0; c < nc; ++c) {
                const Index m = nn + c2e(c, 0);
                out(c, 0) = cell(c, 0);
                out(c, 1) = m;
                out(nc + c, 0) = m;
                out(nc + c, 1) = cell(c, 1);
            }
            break;
        }
        case CellKind::triangle: {
            out = IndexTensor({4 * nc, 3});
            for (Index c = 0; c < nc; ++c) {
                // local edge i is opposite vertex i
                const Index p[6] = {cell(c, 0), cell(c, 1), cell(c, 2),
                                    nn + c2e(c, 0), nn + c2e(c, 1), nn + c2e(c, 2)};
                const int tpl[4][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}, {3, 4, 5}};
                for (int t = 0; t < 4; ++t)
                    for (int v = 0; v < 3; ++v) out(t * nc + c, v) = p[tpl[t][v]];
            }
            break;
        }
        case CellKind::tetrahedron: {
            out = IndexTensor({8 * nc, 4});
            for (Index c = 0; c < nc; ++c) {
                // p[4 + e] is the midpoint of local edge e: 01, 02, 03, 12, 13, 23
                Index p[10];
                for (int v = 0; v < 4; ++v) p[v] = cell(c, v);
                for (int e = 0; e < 6; ++e) p[4 + e] = nn + c2e(c, e);
                // four corner tetrahedra, then the inner octahedron cut along its
                // shortest diagonal (01-23, 02-13 or 03-12; ties go to the first)
                const Index diag[3][2] = {{p[4], p[9]}, {p[5], p[8]}, {p[6], p[7]}};
                int k = 0;
                double best = std::numeric_limits<double>::infinity();
                for (int j = 0; j < 3; ++j) {
                    double s = 0.0;
                    for (int d = 0; d < gd; ++d) {
                        const double t = node(diag[j][0], d) - node(diag[j][1], d);
                        s += t * t;
                    }
                    if (s < best) {
                        best = s;
                        k = j;
                    }
                }
                // octahedron ring in cyclic order, then the diagonal
                static constexpr int ring[3][6] = {{5, 7, 8, 6, 9, 4}, {4, 6, 9, 7, 8, 5}, {4, 8, 9, 5, 7, 6}};
                const int* r = ring[k];
                const int tpl[8][4] = {{4, 6, 5, 0}, {4, 7, 8, 1}, {5, 9, 7, 2}, {6, 8, 9, 3},
                                       {r[0], r[1], r[4], r[5]}, {r[1], r[2], r[4], r[5]},
                                       {r[2], r[3], r[4], r[5]}, {r[3], r[0], r[4], r[5]}};
                for (int t = 0; t < 8; ++t)
                    for (int v = 0; v < 4; ++v) out(t * nc + c, v) = p[tpl[t][v]];
            }
            break;
        }
        case CellKind::quadrangle: break;
        }
        cur = build_topology(cur.kind(), std::move(node), std::move(out));
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Polygon storage

/// Variable-size polygon cells stored flat with a CSR-style pointer array.
class PolygonCellArray {
public:
    PolygonCellArray(IndexTensor flat_cell, IndexTensor indptr)
        : flat_(std::move(flat_cell)), indptr_(std::move(indptr))
    {
        FEALCORE_THROW_IF(indptr_.ndim() != 1 || indptr_.size() < 1, InvalidArgument,
                          "polygon_cells: indptr must be a non-empty vector");
        FEALCORE_THROW_IF(indptr_[0] != 0, InvalidArgument, "polygon_cells: indptr[0] must be 0");
        for (Index p = 0; p + 1 < indptr_.size(); ++p) {
            FEALCORE_THROW_IF(indptr_[p + 1] < indptr_[p], InvalidArgument,
                              "polygon_cells: indptr decreases at polygon ", p);
            FEALCORE_THROW_IF(indptr_[p + 1] - indptr_[p] < 3, InvalidArgument, "polygon_cells: polygon ",
                              p, " has ", indptr_[p + 1] - indptr_[p], " vertices (< 3)");
        }
        FEALCORE_THROW_IF(indptr_[indptr_.size() - 1] != flat_.size(), InvalidArgument,
                          "polygon_cells: last indptr entry ", indptr_[indptr_.size() - 1],
                          " != total vertex count ", flat_.size());
    }

    [[nodiscard]] Index number_of_polygons() const { return indptr_.size() - 1; }
    [[nodiscard]] const IndexTensor& flat_cell() const noexcept { return flat_; }
    [[nodiscard]] const IndexTensor& indptr() const noexcept { return indptr_; }

    [[nodiscard]] std::span<const Index> vertices(Index p) const
    {
        return flat_.data().subspan(static_cast<std::size_t>(indptr_[p]),
                                    static_cast<std::size_t>(indptr_[p + 1] - indptr_[p]));
    }

    [[nodiscard]] std::vector<Index> sizes() const
    {
        std::vector<Index> s;
        for (Index p = 0; p < number_of_polygons(); ++p) s.push_back(indptr_[p + 1] - indptr_[p]);
        return s;
    }

    /// Shoelace areas (positive for counter-clockwise polygons).
    [[nodiscard]] FloatTensor measure(const FloatTensor& node) const
    {
        FloatTensor m({number_of_polygons()});
        for (Index p = 0; p < number_of_polygons(); ++p) m[p] = detail::polygon_signed_area(node, vertices(p));
        return m;
    }

private:
    IndexTensor flat_;
    IndexTensor indptr_;
};

inline PolygonCellArray polygon_cells(IndexTensor flat_cell, IndexTensor indptr)
{
    return PolygonCellArray(std::move(flat_cell), std::move(indptr));
}

} // namespace fealcore
