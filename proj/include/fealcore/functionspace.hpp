#pragma once

#include "backend.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace fealcore {

using Point = std::array<double, 3>;
using ScalarFunction = std::function<double(const Point&)>;
using VectorFunction = std::function<Point(const Point&)>;

enum class Continuity { continuous, discontinuous };

inline Index binomial(Index n, Index k)
{
    if (k < 0 || n < k) return 0;
    Index r = 1;
    for (Index i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// All multi-indices alpha in N^{td+1} with |alpha| = p, sorted descending in
/// alpha_0, then alpha_1, and so on. Shape [binomial(p+td, td), td+1].
inline IndexTensor multi_index_matrix(int p, int td)
{
    FEALCORE_THROW_IF(p < 0, InvalidArgument, "multi_index_matrix: negative degree ", p);
    FEALCORE_THROW_IF(td < 1 || td > 3, InvalidArgument, "multi_index_matrix: dimension ", td,
                      " not in {1,2,3}");
    const Index rows = binomial(p + td, td);
    IndexTensor out({rows, td + 1});
    Index r = 0;
    std::array<Index, 4> alpha{};
    std::function<void(int, Index)> fill = [&](int axis, Index rest) {
        if (axis == td) {
            alpha[static_cast<std::size_t>(axis)] = rest;
            for (int i = 0; i <= td; ++i) out(r, i) = alpha[static_cast<std::size_t>(i)];
            ++r;
            return;
        }
        for (Index a = rest; a >= 0; --a) {
            alpha[static_cast<std::size_t>(axis)] = a;
            fill(axis + 1, rest - a);
        }
    };
    fill(0, p);
    return out;
}

namespace detail {

inline void check_barycentric(const FloatTensor& bc, int td, const char* who)
{
    FEALCORE_THROW_IF(bc.ndim() != 2 || bc.shape(1) != td + 1, InvalidArgument, who,
                      ": barycentric points must be [NQ, ", td + 1, "]");
    for (Index q = 0; q < bc.shape(0); ++q) {
        double s = 0.0;
        for (int i = 0; i <= td; ++i) s += bc(q, i);
        FEALCORE_THROW_IF(std::abs(s - 1.0) > 1e-12, InvalidArgument, who, ": row ", q, " sums to ", s);
    }
}

/// Rank of each multi-index row within multi_index_matrix(p, k).
inline std::map<std::vector<Index>, Index> multi_index_rank(int p, int k)
{
    std::map<std::vector<Index>, Index> rank;
    if (p < 0) return rank;
    const IndexTensor m = multi_index_matrix(p, k);
    for (Index r = 0; r < m.shape(0); ++r) {
        auto row = m.row(r);
        rank.emplace(std::vector<Index>(row.begin(), row.end()), r);
    }
    return rank;
}

} // namespace detail

/// Scalar Lagrange space of degree p. Simplex meshes take any p >= 1;
/// quadrangle meshes are restricted to the bilinear p = 1 space.
///
/// The mesh must outlive the space.
class LagrangeSpace {
public:
    LagrangeSpace(const MeshTopology& mesh, int p, Continuity continuity = Continuity::continuous)
        : mesh_(&mesh), p_(p), continuity_(continuity)
    {
        FEALCORE_THROW_IF(p < 1, InvalidArgument, "LagrangeSpace: degree must be >= 1, got ", p);
        FEALCORE_THROW_IF(!mesh.is_simplex() && p != 1, InvalidArgument,
                          "LagrangeSpace: ", to_string(mesh.kind()), " spaces support p = 1 only, got ", p);
        const int td = mesh.top_dim();
        if (mesh.is_simplex()) {
            multi_index_ = multi_index_matrix(p, td);
            grad_lambda_ = grad_lambda(mesh);
        } else {
            multi_index_ = IndexTensor::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
        }
        const Index ldof = multi_index_.shape(0);
        support_.resize(static_cast<std::size_t>(ldof));
        for (Index l = 0; l < ldof; ++l) {
            unsigned mask = 0;
            if (mesh.is_simplex()) {
                for (int i = 0; i <= td; ++i)
                    if (multi_index_(l, i) > 0) mask |= 1u << i;
            } else {
                mask = 1u << l;
            }
            support_[static_cast<std::size_t>(l)] = mask;
        }
        build_cell_to_dof();
    }

    [[nodiscard]] const MeshTopology& mesh() const noexcept { return *mesh_; }
    [[nodiscard]] int degree() const noexcept { return p_; }
    [[nodiscard]] Continuity continuity() const noexcept { return continuity_; }
    [[nodiscard]] bool is_continuous() const noexcept { return continuity_ == Continuity::continuous; }
    [[nodiscard]] int top_dim() const noexcept { return mesh_->top_dim(); }
    [[nodiscard]] int geo_dim() const noexcept { return mesh_->geo_dim(); }
    [[nodiscard]] Index number_of_local_dofs() const noexcept { return multi_index_.shape(0); }
    [[nodiscard]] Index number_of_global_dofs() const noexcept { return gdof_; }

    /// Local DoF labels: multi-indices [ldof, TD+1] on simplices, corner indices on quadrangles.
    [[nodiscard]] const IndexTensor& multi_index() const noexcept { return multi_index_; }
    [[nodiscard]] const IndexTensor& cell_to_dof() const noexcept { return cell_to_dof_; }

    /// Bitmask of the cell vertices on whose closure local DoF l lives.
    [[nodiscard]] unsigned support_mask(Index l) const { return support_[static_cast<std::size_t>(l)]; }

    /// Reference rule of exactness degree q for this mesh's cell kind.
    [[nodiscard]] QuadratureRule quadrature_rule(int q) const
    {
        const auto domain = mesh_->is_simplex() ? ReferenceDomain::simplex : ReferenceDomain::hypercube;
        return reference_rule(domain, top_dim(), q);
    }

    /// Basis values [NQ, ldof] at reference points (barycentric on simplices, [0,1]^2 on quadrangles).
    [[nodiscard]] FloatTensor basis(const FloatTensor& ref) const
    {
        if (!mesh_->is_simplex()) return quad_basis(ref).first;
        const int td = top_dim();
        detail::check_barycentric(ref, td, "basis");
        const Index nq = ref.shape(0);
        const Index ldof = number_of_local_dofs();
        FloatTensor phi({nq, ldof});
        std::vector<double> a(static_cast<std::size_t>((td + 1) * (p_ + 1)));
        for (Index q = 0; q < nq; ++q) {
            factor_table(ref, q, a, nullptr);
            for (Index l = 0; l < ldof; ++l) {
                double v = 1.0;
                for (int i = 0; i <= td; ++i) v *= a[idx(i, multi_index_(l, i))];
                phi(q, l) = v;
            }
        }
        return phi;
    }

    /// Derivatives with respect to the barycentric coordinates, [NQ, ldof, TD+1].
    [[nodiscard]] FloatTensor grad_basis_barycentric(const FloatTensor& bc) const
    {
        FEALCORE_THROW_IF(!mesh_->is_simplex(), InvalidArgument, "grad_basis_barycentric: simplex mesh required");
        const int td = top_dim();
        detail::check_barycentric(bc, td, "grad_basis");
        const Index nq = bc.shape(0);
        const Index ldof = number_of_local_dofs();
        FloatTensor dphi({nq, ldof, td + 1});
        std::vector<double> a(static_cast<std::size_t>((td + 1) * (p_ + 1)));
        std::vector<double> da(a.size());
        for (Index q = 0; q < nq; ++q) {
            factor_table(bc, q, a, &da);
            for (Index l = 0; l < ldof; ++l) {
                for (int k = 0; k <= td; ++k) {
                    double v = da[idx(k, multi_index_(l, k))];
                    for (int i = 0; i <= td; ++i)
                        if (i != k) v *= a[idx(i, multi_index_(l, i))];
                    dphi(q, l, k) = v;
                }
            }
        }
        return dphi;
    }

    /// Physical gradients [NC, NQ, ldof, GD].
    [[nodiscard]] FloatTensor grad_basis(const FloatTensor& ref) const
    {
        if (!mesh_->is_simplex()) return quad_geometry(ref).grad;
        const FloatTensor dphi = grad_basis_barycentric(ref);
        return bm().contract("qli,cid->cqld", {&dphi, &grad_lambda_});
    }

    /// Quadrature weights scaled by the cell measure (or |det J| on quadrangles), [NC, NQ].
    [[nodiscard]] FloatTensor integration_weights(const QuadratureRule& rule) const
    {
        const Index nc = mesh_->number_of_cells();
        const Index nq = rule.size();
        if (!mesh_->is_simplex()) {
            FloatTensor jw = quad_geometry(rule.points).jacobian_det;
            for (Index c = 0; c < nc; ++c)
                for (Index q = 0; q < nq; ++q) jw(c, q) *= rule.weights[q];
            return jw;
        }
        const FloatTensor meas = cell_measure(*mesh_);
        FloatTensor w({nc, nq});
        for (Index c = 0; c < nc; ++c)
            for (Index q = 0; q < nq; ++q) w(c, q) = meas[c] * rule.weights[q];
        return w;
    }

    /// Reference points mapped into every cell, [NC, NQ, GD].
    [[nodiscard]] FloatTensor physical_points(const FloatTensor& ref) const
    {
        return mesh_->is_simplex() ? bc_to_point(*mesh_, ref) : quad_ref_to_point(*mesh_, ref);
    }

    /// Coordinates of the DoF interpolation points, [gdof, GD].
    [[nodiscard]] FloatTensor interpolation_points() const
    {
        const int gd = geo_dim();
        const Index ldof = number_of_local_dofs();
        FloatTensor pts({gdof_, gd});
        std::vector<std::pair<Index, double>> terms;
        for (Index c = 0; c < mesh_->number_of_cells(); ++c) {
            auto v = mesh_->cell().row(c);
            for (Index l = 0; l < ldof; ++l) {
                terms.clear();
                if (mesh_->is_simplex()) {
                    for (std::size_t i = 0; i < v.size(); ++i) {
                        const Index a = multi_index_(l, static_cast<Index>(i));
                        if (a > 0) terms.emplace_back(v[i], static_cast<double>(a) / p_);
                    }
                } else {
                    terms.emplace_back(v[static_cast<std::size_t>(l)], 1.0);
                }
                // sum in global vertex order so that every incident cell gives the same bits
                std::sort(terms.begin(), terms.end());
                const Index k = cell_to_dof_(c, l);
                for (int d = 0; d < gd; ++d) {
                    double x = 0.0;
                    for (const auto& [node, w] : terms) x += w * mesh_->node()(node, d);
                    pts(k, d) = x;
                }
            }
        }
        return pts;
    }

    /// DoFs whose support lies in the closure of a boundary face.
    [[nodiscard]] BoolTensor boundary_dof_flag() const
    {
        BoolTensor flag({gdof_});
        const auto& ref = mesh_->reference();
        const IndexTensor& f2c = mesh_->face_to_cell();
        const Index ldof = number_of_local_dofs();
        for (Index f = 0; f < mesh_->number_of_faces(); ++f) {
            if (f2c(f, 0) != f2c(f, 1)) continue;
            const Index c = f2c(f, 0);
            unsigned face_mask = 0;
            for (int v : ref.faces[static_cast<std::size_t>(f2c(f, 2))]) face_mask |= 1u << v;
            for (Index l = 0; l < ldof; ++l)
                if ((support_mask(l) & ~face_mask) == 0) flag[cell_to_dof_(c, l)] = 1;
        }
        return flag;
    }

private:
    struct QuadGeometry {
        FloatTensor grad;          // [NC, NQ, 4, GD]
        FloatTensor jacobian_det;  // [NC, NQ]
    };

    [[nodiscard]] std::size_t idx(int i, Index m) const
    {
        return static_cast<std::size_t>(i * (p_ + 1) + m);
    }

    /// a[i][m] = prod_{j<m} (p lambda_i - j) / (j + 1), and optionally its lambda_i derivative.
    void factor_table(const FloatTensor& bc, Index q, std::vector<double>& a, std::vector<double>* da) const
    {
        const int td = top_dim();
        for (int i = 0; i <= td; ++i) {
            const double t = p_ * bc(q, i);
            a[idx(i, 0)] = 1.0;
            if (da) (*da)[idx(i, 0)] = 0.0;
            for (int m = 1; m <= p_; ++m) {
                a[idx(i, m)] = a[idx(i, m - 1)] * (t - (m - 1)) / m;
                if (da) (*da)[idx(i, m)] = ((*da)[idx(i, m - 1)] * (t - (m - 1)) + a[idx(i, m - 1)] * p_) / m;
            }
        }
    }

    static std::pair<FloatTensor, FloatTensor> quad_basis(const FloatTensor& ref)
    {
        FEALCORE_THROW_IF(ref.ndim() != 2 || ref.shape(1) != 2, InvalidArgument,
                          "basis: quadrangle reference points must be [NQ, 2]");
        const Index nq = ref.shape(0);
        FloatTensor phi({nq, 4});
        FloatTensor dphi({nq, 4, 2});
        for (Index q = 0; q < nq; ++q) {
            const double s = ref(q, 0), t = ref(q, 1);
            const double v[4] = {(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
            const double ds[4] = {-(1 - t), 1 - t, t, -t};
            const double dt[4] = {-(1 - s), -s, s, 1 - s};
            for (int l = 0; l < 4; ++l) {
                phi(q, l) = v[l];
                dphi(q, l, 0) = ds[l];
                dphi(q, l, 1) = dt[l];
            }
        }
        return {std::move(phi), std::move(dphi)};
    }

    /// Gradients through the pseudo-inverse J (J^T J)^{-1} and the area element sqrt(det J^T J).
    [[nodiscard]] QuadGeometry quad_geometry(const FloatTensor& ref) const
    {
        const FloatTensor dphi = quad_basis(ref).second;
        const Index nq = ref.shape(0);
        const Index nc = mesh_->number_of_cells();
        const int gd = geo_dim();
        QuadGeometry g{FloatTensor({nc, nq, 4, gd}), FloatTensor({nc, nq})};
        for (Index c = 0; c < nc; ++c) {
            auto v = mesh_->cell().row(c);
            for (Index q = 0; q < nq; ++q) {
                double jac[3][2] = {};
                for (int l = 0; l < 4; ++l)
                    for (int d = 0; d < gd; ++d)
                        for (int r = 0; r < 2; ++r)
                            jac[d][r] += mesh_->node()(v[static_cast<std::size_t>(l)], d) * dphi(q, l, r);
                double gram[2][2] = {};
                for (int r = 0; r < 2; ++r)
                    for (int s = 0; s < 2; ++s)
                        for (int d = 0; d < gd; ++d) gram[r][s] += jac[d][r] * jac[d][s];
                const double det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
                FEALCORE_THROW_IF(!(det > 0.0), GeometryError, "quadrangle ", c, " has a degenerate Jacobian");
                const double inv[2][2] = {{gram[1][1] / det, -gram[0][1] / det},
                                          {-gram[1][0] / det, gram[0][0] / det}};
                g.jacobian_det(c, q) = std::sqrt(det);
                for (int l = 0; l < 4; ++l)
                    for (int d = 0; d < gd; ++d) {
                        double x = 0.0;
                        for (int r = 0; r < 2; ++r)
                            for (int s = 0; s < 2; ++s) x += jac[d][r] * inv[r][s] * dphi(q, l, s);
                        g.grad(c, q, l, d) = x;
                    }
            }
        }
        return g;
    }

    void build_cell_to_dof()
    {
        const MeshTopology& mesh = *mesh_;
        const Index nc = mesh.number_of_cells();
        const Index ldof = number_of_local_dofs();
        cell_to_dof_ = IndexTensor({nc, ldof});
        if (continuity_ == Continuity::discontinuous) {
            gdof_ = nc * ldof;
            for (Index i = 0; i < gdof_; ++i) cell_to_dof_[i] = i;
            return;
        }
        if (!mesh.is_simplex()) {
            gdof_ = mesh.number_of_nodes();
            cell_to_dof_ = mesh.cell();
            return;
        }

        const int td = top_dim();
        const auto& ref = mesh.reference();
        // per entity dimension: global entity count, DoFs per entity, offset
        std::array<Index, 4> count{mesh.number_of_nodes(), 0, 0, nc};
        if (td >= 2) count[1] = mesh.number_of_edges();
        if (td == 3) count[2] = mesh.number_of_faces();
        count[static_cast<std::size_t>(td)] = nc;
        std::array<Index, 5> offset{};
        std::array<Index, 4> per{};
        for (int k = 0; k <= td; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            per[uk] = k == 0 ? 1 : binomial(p_ - 1, k);
            offset[uk + 1] = offset[uk] + count[uk] * per[uk];
        }
        gdof_ = offset[static_cast<std::size_t>(td + 1)];

        std::array<std::map<std::vector<Index>, Index>, 4> rank;
        for (int k = 1; k <= td; ++k) rank[static_cast<std::size_t>(k)] = detail::multi_index_rank(p_ - k - 1, k);

        // local entity lookup by vertex mask
        std::map<unsigned, int> local_edge, local_face;
        for (std::size_t e = 0; e < ref.edges.size(); ++e)
            local_edge[(1u << ref.edges[e][0]) | (1u << ref.edges[e][1])] = static_cast<int>(e);
        if (td == 3)
            for (std::size_t f = 0; f < ref.faces.size(); ++f) {
                unsigned m = 0;
                for (int v : ref.faces[f]) m |= 1u << v;
                local_face[m] = static_cast<int>(f);
            }

        bm().parallel_for(nc, [&](Index b, Index e) {
            std::vector<Index> beta;
            for (Index c = b; c < e; ++c) {
                auto cv = mesh.cell().row(c);
                for (Index l = 0; l < ldof; ++l) {
                    const unsigned mask = support_mask(l);
                    const int k = std::popcount(mask) - 1;
                    const auto uk = static_cast<std::size_t>(k);
                    Index g = 0;
                    if (k == 0) {
                        g = cv[static_cast<std::size_t>(std::countr_zero(mask))];
                    } else if (k == td) {
                        beta.assign(static_cast<std::size_t>(td + 1), 0);
                        for (int i = 0; i <= td; ++i) beta[static_cast<std::size_t>(i)] = multi_index_(l, i) - 1;
                        g = offset[uk] + c * per[uk] + rank[uk].at(beta);
                    } else {
                        Index ent = 0;
                        std::span<const Index> ev;
                        if (k == 1) {
                            ent = mesh.cell_to_edge()(c, local_edge.at(mask));
                            ev = mesh.edge().row(ent);
                        } else {
                            ent = mesh.cell_to_face()(c, local_face.at(mask));
                            ev = mesh.face().row(ent);
                        }
                        // alpha restricted to the entity, read in its stored vertex order
                        beta.assign(ev.size(), 0);
                        for (std::size_t m = 0; m < ev.size(); ++m) {
                            std::size_t j = 0;
                            while (cv[j] != ev[m]) ++j;
                            beta[m] = multi_index_(l, static_cast<Index>(j)) - 1;
                        }
                        g = offset[uk] + ent * per[uk] + rank[uk].at(beta);
                    }
                    cell_to_dof_(c, l) = g;
                }
            }
        });
    }

    const MeshTopology* mesh_;
    int p_;
    Continuity continuity_;
    IndexTensor multi_index_;
    std::vector<unsigned> support_;
    FloatTensor grad_lambda_;
    IndexTensor cell_to_dof_;
    Index gdof_ = 0;
};

/// Vector-valued space: `components` copies of a scalar space, DoFs interleaved
/// as global = k * components + a.
class TensorSpace {
public:
    TensorSpace(const LagrangeSpace& scalar, Index components) : scalar_(&scalar), components_(components)
    {
        FEALCORE_THROW_IF(components < 1, InvalidArgument, "TensorSpace: components must be >= 1, got ",
                          components);
    }

    [[nodiscard]] const LagrangeSpace& scalar_space() const noexcept { return *scalar_; }
    [[nodiscard]] const MeshTopology& mesh() const noexcept { return scalar_->mesh(); }
    [[nodiscard]] Index components() const noexcept { return components_; }
    [[nodiscard]] Index number_of_local_dofs() const noexcept
    {
        return scalar_->number_of_local_dofs() * components_;
    }
    [[nodiscard]] Index number_of_global_dofs() const noexcept
    {
        return scalar_->number_of_global_dofs() * components_;
    }

    /// [NC, ldof * components]; local slot i * components + a.
    [[nodiscard]] IndexTensor cell_to_dof() const
    {
        const IndexTensor& s = scalar_->cell_to_dof();
        const Index nc = s.shape(0), ldof = s.shape(1);
        IndexTensor out({nc, ldof * components_});
        for (Index c = 0; c < nc; ++c)
            for (Index i = 0; i < ldof; ++i)
                for (Index a = 0; a < components_; ++a) out(c, i * components_ + a) = s(c, i) * components_ + a;
        return out;
    }

    [[nodiscard]] BoolTensor boundary_dof_flag() const
    {
        const BoolTensor s = scalar_->boundary_dof_flag();
        BoolTensor out({number_of_global_dofs()});
        for (Index k = 0; k < s.size(); ++k)
            for (Index a = 0; a < components_; ++a) out[k * components_ + a] = s[k];
        return out;
    }

private:
    const LagrangeSpace* scalar_;
    Index components_;
};

/// Index map of a component-interleaved vector space.
struct VectorDofLayout {
    Index scalar_gdof;
    Index components;

    [[nodiscard]] Index operator()(Index k, Index a) const { return k * components + a; }
    [[nodiscard]] std::pair<Index, Index> split(Index global) const
    {
        return {global / components, global % components};
    }
    [[nodiscard]] Index size() const { return scalar_gdof * components; }
};

inline VectorDofLayout vector_dof_layout(const TensorSpace& space)
{
    return {space.scalar_space().number_of_global_dofs(), space.components()};
}

/// Coefficient vector over a scalar space, or over a tensor space with
/// interleaved components.
class FEFunction {
public:
    FEFunction(const LagrangeSpace& space, Index components = 1)
        : space_(&space), components_(components), coef_({space.number_of_global_dofs() * components})
    {
        FEALCORE_THROW_IF(components < 1, InvalidArgument, "FEFunction: components must be >= 1");
    }

    FEFunction(const LagrangeSpace& space, Index components, FloatTensor coefficients)
        : space_(&space), components_(components), coef_(std::move(coefficients))
    {
        FEALCORE_THROW_IF(coef_.size() != space.number_of_global_dofs() * components, InvalidArgument,
                          "FEFunction: expected ", space.number_of_global_dofs() * components,
                          " coefficients, got ", coef_.size());
        coef_ = std::move(coef_).reshaped({coef_.size()});
    }

    explicit FEFunction(const TensorSpace& space) : FEFunction(space.scalar_space(), space.components()) {}
    FEFunction(const TensorSpace& space, FloatTensor coefficients)
        : FEFunction(space.scalar_space(), space.components(), std::move(coefficients))
    {
    }

    [[nodiscard]] const LagrangeSpace& space() const noexcept { return *space_; }
    [[nodiscard]] Index components() const noexcept { return components_; }
    [[nodiscard]] const FloatTensor& coefficients() const noexcept { return coef_; }
    [[nodiscard]] FloatTensor& coefficients() noexcept { return coef_; }

    /// Values at reference points in every cell, [NC, NQ, components].
    [[nodiscard]] FloatTensor value(const FloatTensor& ref) const
    {
        const FloatTensor phi = space_->basis(ref);
        const IndexTensor& c2d = space_->cell_to_dof();
        const Index nc = c2d.shape(0), ldof = c2d.shape(1), nq = phi.shape(0);
        FloatTensor out({nc, nq, components_});
        bm().parallel_for(nc, [&](Index b, Index e) {
            for (Index c = b; c < e; ++c)
                for (Index q = 0; q < nq; ++q)
                    for (Index a = 0; a < components_; ++a) {
                        double s = 0.0;
                        for (Index l = 0; l < ldof; ++l) s += phi(q, l) * coef_[c2d(c, l) * components_ + a];
                        out(c, q, a) = s;
                    }
        });
        return out;
    }

    /// Values at reference points of a single cell, [NQ, components].
    [[nodiscard]] FloatTensor value_in_cell(Index c, const FloatTensor& ref) const
    {
        FEALCORE_THROW_IF(c < 0 || c >= space_->mesh().number_of_cells(), InvalidArgument,
                          "value_in_cell: cell ", c, " out of range");
        const FloatTensor phi = space_->basis(ref);
        const IndexTensor& c2d = space_->cell_to_dof();
        const Index ldof = c2d.shape(1), nq = phi.shape(0);
        FloatTensor out({nq, components_});
        for (Index q = 0; q < nq; ++q)
            for (Index a = 0; a < components_; ++a) {
                double s = 0.0;
                for (Index l = 0; l < ldof; ++l) s += phi(q, l) * coef_[c2d(c, l) * components_ + a];
                out(q, a) = s;
            }
        return out;
    }

    /// Gradients at reference points, [NC, NQ, components, GD].
    [[nodiscard]] FloatTensor grad(const FloatTensor& ref) const
    {
        const FloatTensor gphi = space_->grad_basis(ref);
        const IndexTensor& c2d = space_->cell_to_dof();
        const Index nc = gphi.shape(0), nq = gphi.shape(1), ldof = gphi.shape(2), gd = gphi.shape(3);
        FloatTensor out({nc, nq, components_, gd});
        for (Index c = 0; c < nc; ++c)
            for (Index q = 0; q < nq; ++q)
                for (Index a = 0; a < components_; ++a)
                    for (Index d = 0; d < gd; ++d) {
                        double s = 0.0;
                        for (Index l = 0; l < ldof; ++l) s += gphi(c, q, l, d) * coef_[c2d(c, l) * components_ + a];
                        out(c, q, a, d) = s;
                    }
        return out;
    }

private:
    const LagrangeSpace* space_;
    Index components_;
    FloatTensor coef_;
};

namespace detail {

inline Point point_of(const FloatTensor& pts, Index k)
{
    Point x{0.0, 0.0, 0.0};
    for (Index d = 0; d < pts.shape(1); ++d) x[static_cast<std::size_t>(d)] = pts(k, d);
    return x;
}

} // namespace detail

inline IndexTensor cell_to_dof(const LagrangeSpace& space) { return space.cell_to_dof(); }
inline FloatTensor interpolation_points(const LagrangeSpace& space) { return space.interpolation_points(); }
inline BoolTensor boundary_dof_flag(const LagrangeSpace& space) { return space.boundary_dof_flag(); }
inline FloatTensor basis(const LagrangeSpace& space, const FloatTensor& bc) { return space.basis(bc); }
inline FloatTensor grad_basis(const LagrangeSpace& space, const FloatTensor& bc) { return space.grad_basis(bc); }

/// Nodal interpolant: coefficient k is f at interpolation point k.
inline FEFunction interpolate(const LagrangeSpace& space, const ScalarFunction& f)
{
    const FloatTensor pts = space.interpolation_points();
    FEFunction u(space);
    for (Index k = 0; k < pts.shape(0); ++k) {
        const double v = f(detail::point_of(pts, k));
        FEALCORE_THROW_IF(!std::isfinite(v), NumericalError, "interpolate: non-finite value at DoF ", k);
        u.coefficients()[k] = v;
    }
    return u;
}

inline FEFunction interpolate(const TensorSpace& space, const VectorFunction& f)
{
    const FloatTensor pts = space.scalar_space().interpolation_points();
    const Index nc = space.components();
    FEALCORE_THROW_IF(nc > 3, InvalidArgument, "interpolate: at most 3 components for a pointwise function");
    FEFunction u(space);
    for (Index k = 0; k < pts.shape(0); ++k) {
        const Point v = f(detail::point_of(pts, k));
        for (Index a = 0; a < nc; ++a) {
            FEALCORE_THROW_IF(!std::isfinite(v[static_cast<std::size_t>(a)]), NumericalError,
                              "interpolate: non-finite value at DoF ", k, " component ", a);
            u.coefficients()[k * nc + a] = v[static_cast<std::size_t>(a)];
        }
    }
    return u;
}

} // namespace fealcore
