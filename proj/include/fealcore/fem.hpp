#pragma once

#include "backend.hpp"
#include "functionspace.hpp"
#include "sparse.hpp"

#include <cmath>
#include <concepts>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace fealcore {

enum class Hypothesis { three_dimensional, plane_strain, plane_stress };

/// Isotropic linear elastic material given by its Lame parameters.
struct IsotropicMaterial {
    double lame_lambda = 1.0;
    double shear_modulus = 1.0;
    Hypothesis hypothesis = Hypothesis::three_dimensional;

    IsotropicMaterial(double lambda, double mu, Hypothesis h = Hypothesis::three_dimensional)
        : lame_lambda(lambda), shear_modulus(mu), hypothesis(h)
    {
        FEALCORE_THROW_IF(!(mu > 0.0), InvalidArgument, "IsotropicMaterial: shear modulus must be positive, got ", mu);
        FEALCORE_THROW_IF(!(lambda + 2.0 * mu / dim() > 0.0), InvalidArgument,
                          "IsotropicMaterial: lambda + 2 mu / d must be positive");
    }

    [[nodiscard]] int dim() const noexcept { return hypothesis == Hypothesis::three_dimensional ? 3 : 2; }

    /// Stiffness in Voigt form with engineering shear strains:
    /// strain order (xx, yy, zz, yz, xz, xy) in 3D and (xx, yy, xy) in 2D.
    [[nodiscard]] FloatTensor voigt_matrix() const
    {
        const double mu = shear_modulus;
        double lam = lame_lambda;
        if (hypothesis == Hypothesis::plane_stress) lam = 2.0 * lame_lambda * mu / (lame_lambda + 2.0 * mu);
        const int d = dim();
        const int n = d == 3 ? 6 : 3;
        FloatTensor m({n, n});
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = lam + (i == j ? 2.0 * mu : 0.0);
        for (int i = d; i < n; ++i) m(i, i) = mu;
        return m;
    }
};

/// Scalar coefficient of a bilinear form: a constant, a pointwise function, or
/// a batch of constants producing a batched element block.
class Coefficient {
public:
    Coefficient(double c = 1.0) : value_(c) {}
    Coefficient(ScalarFunction f) : value_(std::move(f)) {}
    template <class F>
        requires(std::is_invocable_r_v<double, F, const Point&> && !std::is_arithmetic_v<F> &&
                 !std::is_same_v<std::decay_t<F>, ScalarFunction>)
    Coefficient(F f) : value_(ScalarFunction(std::move(f)))
    {
    }

    static Coefficient batched(std::vector<double> values)
    {
        FEALCORE_THROW_IF(values.empty(), InvalidArgument, "Coefficient::batched: empty batch");
        Coefficient c;
        c.value_ = std::move(values);
        return c;
    }

    /// Batch count, or 0 for an unbatched coefficient.
    [[nodiscard]] Index batch() const
    {
        const auto* v = std::get_if<std::vector<double>>(&value_);
        return v ? static_cast<Index>(v->size()) : 0;
    }

    /// Values at physical points [NC, NQ, GD]: [NC, NQ], or [B, NC, NQ] when batched.
    [[nodiscard]] FloatTensor evaluate(const FloatTensor& points) const
    {
        const Index nc = points.shape(0), nq = points.shape(1), gd = points.shape(2);
        if (const auto* c = std::get_if<double>(&value_)) return FloatTensor({nc, nq}, *c);
        if (const auto* v = std::get_if<std::vector<double>>(&value_)) {
            const auto nb = static_cast<Index>(v->size());
            FloatTensor out({nb, nc, nq});
            for (Index b = 0; b < nb; ++b)
                for (Index k = 0; k < nc * nq; ++k) out[b * nc * nq + k] = (*v)[static_cast<std::size_t>(b)];
            return out;
        }
        const auto& f = std::get<ScalarFunction>(value_);
        FloatTensor out({nc, nq});
        for (Index c = 0; c < nc; ++c)
            for (Index q = 0; q < nq; ++q) {
                Point x{0.0, 0.0, 0.0};
                for (Index d = 0; d < gd; ++d) x[static_cast<std::size_t>(d)] = points(c, q, d);
                const double v = f(x);
                FEALCORE_THROW_IF(!std::isfinite(v), NumericalError, "Coefficient: non-finite value in cell ", c);
                out(c, q) = v;
            }
        return out;
    }

private:
    std::variant<double, ScalarFunction, std::vector<double>> value_;
};

/// Per-cell element matrices with their row/column DoF maps.
struct ElementMatrixBlock {
    FloatTensor values;  ///< [NC, R, C] or [B, NC, R, C]
    IndexTensor row_dof; ///< [NC, R]
    IndexTensor col_dof; ///< [NC, C]
    Index row_gdof = 0;
    Index col_gdof = 0;

    [[nodiscard]] Index batch() const { return values.ndim() == 4 ? values.shape(0) : 0; }
};

/// Per-cell element vectors with their DoF map.
struct ElementVectorBlock {
    FloatTensor values; ///< [NC, R]
    IndexTensor dof;    ///< [NC, R]
    Index gdof = 0;
};

namespace detail {

inline void check_order(const QuadratureRule& rule, int needed, const char* who)
{
    if (rule.order < needed)
        warn(concat(who, ": quadrature of degree ", rule.order, " under-integrates (needs ", needed, ")"));
}

inline Point point_at(const FloatTensor& pts, Index c, Index q)
{
    Point x{0.0, 0.0, 0.0};
    for (Index d = 0; d < pts.shape(2); ++d) x[static_cast<std::size_t>(d)] = pts(c, q, d);
    return x;
}

/// coef * weights with the coefficient's batch axis kept leading.
inline FloatTensor weighted_coefficient(const LagrangeSpace& space, const QuadratureRule& rule,
                                        const Coefficient& coef)
{
    FloatTensor cw = coef.evaluate(space.physical_points(rule.points));
    const FloatTensor w = space.integration_weights(rule);
    const Index n = w.size();
    for (Index k = 0; k < cw.size(); ++k) cw[k] *= w[k % n];
    return cw;
}

/// Copy the upper triangle of every trailing [n, n] slice onto the lower one.
inline void mirror_upper(FloatTensor& k)
{
    const Index n = k.shape(k.ndim() - 1);
    const Index slices = k.size() / (n * n);
    for (Index s = 0; s < slices; ++s) {
        double* m = k.data().data() + s * n * n;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < i; ++j) m[i * n + j] = m[j * n + i];
    }
}

} // namespace detail

/// K_c[i,j] = sum_q w_q coef(x_q) grad phi_i . grad phi_j.
inline ElementMatrixBlock diffusion_integrator(const LagrangeSpace& space, const QuadratureRule& rule,
                                               const Coefficient& coef = 1.0)
{
    detail::check_order(rule, 2 * (space.degree() - 1), "diffusion_integrator");
    const FloatTensor cw = detail::weighted_coefficient(space, rule, coef);
    const FloatTensor g = space.grad_basis(rule.points);
    FloatTensor k = coef.batch() > 0 ? bm().contract("bcq,cqid,cqjd->bcij", {&cw, &g, &g})
                                     : bm().contract("cq,cqid,cqjd->cij", {&cw, &g, &g});
    detail::mirror_upper(k);
    const Index n = space.number_of_global_dofs();
    return {std::move(k), space.cell_to_dof(), space.cell_to_dof(), n, n};
}

/// M_c[i,j] = sum_q w_q coef(x_q) phi_i phi_j.
inline ElementMatrixBlock mass_integrator(const LagrangeSpace& space, const QuadratureRule& rule,
                                          const Coefficient& coef = 1.0)
{
    detail::check_order(rule, 2 * space.degree(), "mass_integrator");
    const FloatTensor cw = detail::weighted_coefficient(space, rule, coef);
    const FloatTensor phi = space.basis(rule.points);
    FloatTensor m = coef.batch() > 0 ? bm().contract("bcq,qi,qj->bcij", {&cw, &phi, &phi})
                                     : bm().contract("cq,qi,qj->cij", {&cw, &phi, &phi});
    detail::mirror_upper(m);
    const Index n = space.number_of_global_dofs();
    return {std::move(m), space.cell_to_dof(), space.cell_to_dof(), n, n};
}

/// K_c = sum_q w_q B^T D B on interleaved local DoFs (slot i * GD + a).
inline ElementMatrixBlock linear_elastic_integrator(const TensorSpace& space, const IsotropicMaterial& material,
                                                    const QuadratureRule& rule)
{
    const LagrangeSpace& s = space.scalar_space();
    const int gd = s.geo_dim();
    FEALCORE_THROW_IF(material.dim() != gd, InvalidArgument, "linear_elastic_integrator: ",
                      material.hypothesis == Hypothesis::three_dimensional ? "3D" : "plane", " hypothesis on a ",
                      gd, "D mesh");
    FEALCORE_THROW_IF(space.components() != gd, InvalidArgument, "linear_elastic_integrator: space has ",
                      space.components(), " components, mesh dimension is ", gd);
    detail::check_order(rule, 2 * (s.degree() - 1), "linear_elastic_integrator");

    const FloatTensor d = material.voigt_matrix();
    const int ns = static_cast<int>(d.shape(0));
    // shear strain (b, c) pairs in Voigt order
    const std::vector<std::array<int, 2>> shear =
        gd == 3 ? std::vector<std::array<int, 2>>{{1, 2}, {0, 2}, {0, 1}} : std::vector<std::array<int, 2>>{{0, 1}};

    const FloatTensor g = s.grad_basis(rule.points);
    const FloatTensor w = s.integration_weights(rule);
    const Index nc = g.shape(0), nq = g.shape(1), ldof = g.shape(2);
    const Index n = ldof * gd;
    FloatTensor k({nc, n, n});
    bm().parallel_for(nc, [&](Index c0, Index c1) {
        std::vector<double> b(static_cast<std::size_t>(ns * n));
        std::vector<double> db(b.size());
        for (Index c = c0; c < c1; ++c) {
            double* kc = &k(c, 0, 0);
            for (Index q = 0; q < nq; ++q) {
                std::fill(b.begin(), b.end(), 0.0);
                for (Index i = 0; i < ldof; ++i)
                    for (int a = 0; a < gd; ++a) {
                        const Index col = i * gd + a;
                        b[static_cast<std::size_t>(a * n + col)] = g(c, q, i, a);
                        for (std::size_t t = 0; t < shear.size(); ++t) {
                            const auto [p0, p1] = shear[t];
                            const auto row = static_cast<Index>(gd + static_cast<int>(t));
                            if (a == p0) b[static_cast<std::size_t>(row * n + col)] = g(c, q, i, p1);
                            if (a == p1) b[static_cast<std::size_t>(row * n + col)] = g(c, q, i, p0);
                        }
                    }
                for (int r = 0; r < ns; ++r)
                    for (Index col = 0; col < n; ++col) {
                        double x = 0.0;
                        for (int t = 0; t < ns; ++t) x += d(r, t) * b[static_cast<std::size_t>(t * n + col)];
                        db[static_cast<std::size_t>(r * n + col)] = x;
                    }
                const double wq = w(c, q);
                for (Index i = 0; i < n; ++i)
                    for (Index j = i; j < n; ++j) {
                        double x = 0.0;
                        for (int r = 0; r < ns; ++r)
                            x += b[static_cast<std::size_t>(r * n + i)] * db[static_cast<std::size_t>(r * n + j)];
                        kc[i * n + j] += wq * x;
                    }
            }
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < i; ++j) kc[i * n + j] = kc[j * n + i];
        }
    });
    const Index gdof = space.number_of_global_dofs();
    return {std::move(k), space.cell_to_dof(), space.cell_to_dof(), gdof, gdof};
}

/// b_c[i] = sum_q w_q f(x_q) phi_i(x_q).
inline ElementVectorBlock source_integrator(const LagrangeSpace& space, const QuadratureRule& rule,
                                            const ScalarFunction& f)
{
    const FloatTensor pts = space.physical_points(rule.points);
    const FloatTensor w = space.integration_weights(rule);
    const FloatTensor phi = space.basis(rule.points);
    const Index nc = pts.shape(0), nq = pts.shape(1);
    FloatTensor fw({nc, nq});
    for (Index c = 0; c < nc; ++c)
        for (Index q = 0; q < nq; ++q) {
            const double v = f(detail::point_at(pts, c, q));
            FEALCORE_THROW_IF(!std::isfinite(v), NumericalError, "source_integrator: non-finite source in cell ", c);
            fw(c, q) = v * w(c, q);
        }
    FloatTensor b = bm().contract("cq,qi->ci", {&fw, &phi});
    return {std::move(b), space.cell_to_dof(), space.number_of_global_dofs()};
}

/// Vector source paired componentwise with a tensor space (slot i * components + a).
inline ElementVectorBlock source_integrator(const TensorSpace& space, const QuadratureRule& rule,
                                            const VectorFunction& f)
{
    const LagrangeSpace& s = space.scalar_space();
    const Index ncomp = space.components();
    FEALCORE_THROW_IF(ncomp > 3, InvalidArgument, "source_integrator: at most 3 components");
    const FloatTensor pts = s.physical_points(rule.points);
    const FloatTensor w = s.integration_weights(rule);
    const FloatTensor phi = s.basis(rule.points);
    const Index nc = pts.shape(0), nq = pts.shape(1);
    FloatTensor fw({nc, nq, ncomp});
    for (Index c = 0; c < nc; ++c)
        for (Index q = 0; q < nq; ++q) {
            const Point v = f(detail::point_at(pts, c, q));
            for (Index a = 0; a < ncomp; ++a) {
                FEALCORE_THROW_IF(!std::isfinite(v[static_cast<std::size_t>(a)]), NumericalError,
                                  "source_integrator: non-finite source in cell ", c);
                fw(c, q, a) = v[static_cast<std::size_t>(a)] * w(c, q);
            }
        }
    FloatTensor b = bm().contract("cqa,qi->cia", {&fw, &phi});
    const Index nrow = b.shape(1) * ncomp;
    return {std::move(b).reshaped({nc, nrow}), space.cell_to_dof(), space.number_of_global_dofs()};
}

namespace detail {

inline void check_dof_map(const IndexTensor& map, Index gdof, const char* who, const char* which)
{
    const Index nc = map.shape(0), nl = map.shape(1);
    for (Index c = 0; c < nc; ++c)
        for (Index i = 0; i < nl; ++i) {
            const Index v = map(c, i);
            FEALCORE_THROW_IF(v < 0 || v >= gdof, InvalidArgument, who, ": ", which, " DoF ", v, " of cell ", c,
                              " slot ", i, " outside [0, ", gdof, ")");
        }
}

/// COO entries of one block: I broadcasts the row map over columns, J the column map over rows.
inline COOMatrix block_to_coo(const ElementMatrixBlock& blk)
{
    const Index nc = blk.row_dof.shape(0), nr = blk.row_dof.shape(1), ncl = blk.col_dof.shape(1);
    FEALCORE_THROW_IF(blk.col_dof.shape(0) != nc, InvalidArgument, "assemble_bilinear: row/column maps differ in cells");
    const Index nb = blk.batch();
    const Index per = nc * nr * ncl;
    const FloatTensor::Shape expect = nb > 0 ? FloatTensor::Shape{nb, nc, nr, ncl} : FloatTensor::Shape{nc, nr, ncl};
    FEALCORE_THROW_IF(blk.values.shape() != expect, InvalidArgument, "assemble_bilinear: element values do not match the DoF maps");
    check_dof_map(blk.row_dof, blk.row_gdof, "assemble_bilinear", "row");
    check_dof_map(blk.col_dof, blk.col_gdof, "assemble_bilinear", "column");
    IndexTensor idx({2, per});
    bm().parallel_for(nc, [&](Index c0, Index c1) {
        for (Index c = c0; c < c1; ++c)
            for (Index i = 0; i < nr; ++i)
                for (Index j = 0; j < ncl; ++j) {
                    const Index k = (c * nr + i) * ncl + j;
                    idx(0, k) = blk.row_dof(c, i);
                    idx(1, k) = blk.col_dof(c, j);
                }
    });
    FloatTensor v = nb > 0 ? blk.values.reshaped({nb, per}) : blk.values.reshaped({per});
    return COOMatrix(std::move(idx), std::move(v), blk.row_gdof, blk.col_gdof, false);
}

} // namespace detail

/// Global matrix: every block's entries are added with coo_add, then coalesced.
inline COOMatrix assemble_bilinear(std::span<const ElementMatrixBlock> blocks)
{
    FEALCORE_THROW_IF(blocks.empty(), InvalidArgument, "assemble_bilinear: no element blocks");
    COOMatrix m = detail::block_to_coo(blocks[0]);
    for (std::size_t b = 1; b < blocks.size(); ++b) m = coo_add(m, detail::block_to_coo(blocks[b]));
    return coalesce(m);
}

inline COOMatrix assemble_bilinear(const ElementMatrixBlock& block)
{
    return assemble_bilinear(std::span<const ElementMatrixBlock>(&block, 1));
}

/// Scatter-add of element vectors by their DoF maps.
inline FloatTensor assemble_linear(std::span<const ElementVectorBlock> blocks)
{
    FEALCORE_THROW_IF(blocks.empty(), InvalidArgument, "assemble_linear: no element blocks");
    FloatTensor out({blocks[0].gdof});
    for (const auto& blk : blocks) {
        FEALCORE_THROW_IF(blk.gdof != blocks[0].gdof, InvalidArgument, "assemble_linear: blocks disagree on gdof");
        FEALCORE_THROW_IF(blk.values.shape() != blk.dof.shape(), InvalidArgument,
                          "assemble_linear: element values do not match the DoF map");
        detail::check_dof_map(blk.dof, blk.gdof, "assemble_linear", "row");
        out = bm().scatter_add(out, blk.dof.data(), blk.values.data());
    }
    return out;
}

inline FloatTensor assemble_linear(const ElementVectorBlock& block)
{
    return assemble_linear(std::span<const ElementVectorBlock>(&block, 1));
}

/// Strong Dirichlet data: prescribed values at the flagged DoFs.
struct DirichletData {
    FloatTensor values; ///< [gdof]; only flagged entries are read
    BoolTensor flag;    ///< [gdof]
};

inline DirichletData dirichlet_data(const LagrangeSpace& space, const ScalarFunction& g)
{
    return {interpolate(space, g).coefficients(), space.boundary_dof_flag()};
}

inline DirichletData dirichlet_data(const TensorSpace& space, const VectorFunction& g)
{
    return {interpolate(space, g).coefficients(), space.boundary_dof_flag()};
}

struct DirichletSystem {
    CSRMatrix matrix;
    FloatTensor rhs;
    FloatTensor lift; ///< u0: prescribed values on flagged DoFs, zero elsewhere
};

/// Symmetric elimination: b' = b - A u0 off the boundary and u0 on it;
/// boundary rows and columns of A become identity.
inline DirichletSystem apply_dirichlet(const CSRMatrix& a, const FloatTensor& b, const DirichletData& data)
{
    FEALCORE_THROW_IF(a.nrows() != a.ncols(), InvalidArgument, "apply_dirichlet: matrix is ", a.nrows(), "x",
                      a.ncols(), ", not square");
    const Index n = a.nrows();
    FEALCORE_THROW_IF(b.size() != n || data.flag.size() != n || data.values.size() != n, InvalidArgument,
                      "apply_dirichlet: vectors must have ", n, " entries");
    FloatTensor u0({n});
    for (Index i = 0; i < n; ++i) u0[i] = data.flag[i] ? data.values[i] : 0.0;
    const FloatTensor au0 = spmv(a, u0);
    FloatTensor rhs({n});
    for (Index i = 0; i < n; ++i) rhs[i] = data.flag[i] ? u0[i] : b[i] - au0[i];
    return {set_rows_cols_identity(a, data.flag), std::move(rhs), std::move(u0)};
}

inline DirichletSystem apply_dirichlet(const COOMatrix& a, const FloatTensor& b, const DirichletData& data)
{
    return apply_dirichlet(to_csr(a), b, data);
}

namespace detail {

inline double l2_error_impl(const FEFunction& uh, const std::function<Point(const Point&)>& exact,
                            const QuadratureRule& rule)
{
    const LagrangeSpace& s = uh.space();
    const FloatTensor pts = s.physical_points(rule.points);
    const FloatTensor w = s.integration_weights(rule);
    const FloatTensor val = uh.value(rule.points);
    const Index nc = pts.shape(0), nq = pts.shape(1), ncomp = uh.components();
    FloatTensor per_cell({nc});
    bm().parallel_for(nc, [&](Index c0, Index c1) {
        for (Index c = c0; c < c1; ++c) {
            double acc = 0.0;
            for (Index q = 0; q < nq; ++q) {
                const Point u = exact(point_at(pts, c, q));
                double e2 = 0.0;
                for (Index a = 0; a < ncomp; ++a) {
                    const double e = u[static_cast<std::size_t>(a)] - val(c, q, a);
                    e2 += e * e;
                }
                acc += w(c, q) * e2;
            }
            per_cell[c] = acc;
        }
    });
    double total = 0.0;
    for (Index c = 0; c < nc; ++c) total += per_cell[c];
    return std::sqrt(total);
}

} // namespace detail

/// sqrt(sum_c sum_q w_q |u(x_q) - u_h(x_q)|^2).
inline double l2_error(const FEFunction& uh, const ScalarFunction& exact, const QuadratureRule& rule)
{
    FEALCORE_THROW_IF(uh.components() != 1, InvalidArgument, "l2_error: scalar exact solution for a ",
                      uh.components(), "-component function");
    return detail::l2_error_impl(uh, [&](const Point& x) { return Point{exact(x), 0.0, 0.0}; }, rule);
}

inline double l2_error(const FEFunction& uh, const VectorFunction& exact, const QuadratureRule& rule)
{
    FEALCORE_THROW_IF(uh.components() > 3, InvalidArgument, "l2_error: at most 3 components");
    return detail::l2_error_impl(uh, exact, rule);
}

} // namespace fealcore
