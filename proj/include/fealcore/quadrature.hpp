#pragma once

#include "detail/simplex_rule_tables.hpp"
#include "error.hpp"
#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace fealcore {

enum class ReferenceDomain { simplex, hypercube };

/// Quadrature points and weights on a reference entity. Weights sum to 1
/// (unit reference measure); integrators multiply by the physical measure.
struct QuadratureRule {
    ReferenceDomain domain = ReferenceDomain::simplex;
    int dim = 1;
    int order = 1;       ///< exactness degree
    FloatTensor points;  ///< simplex: barycentric [NQ, dim+1]; hypercube: coordinates in [0,1]^dim, [NQ, dim]
    FloatTensor weights; ///< [NQ]

    [[nodiscard]] Index size() const { return weights.size(); }

    /// Reference coordinates [NQ, dim]: barycentric columns 1..dim on a simplex.
    [[nodiscard]] FloatTensor coordinates() const
    {
        if (domain == ReferenceDomain::hypercube) return points;
        FloatTensor x({size(), dim});
        for (Index q = 0; q < size(); ++q)
            for (int d = 0; d < dim; ++d) x(q, d) = points(q, d + 1);
        return x;
    }
};

/// n-point Gauss-Legendre rule on [0, 1], exact to degree 2n-1.
inline QuadratureRule gauss_legendre_1d(int n)
{
    FEALCORE_THROW_IF(n < 1, InvalidArgument, "gauss_legendre_1d: need at least one point, got ", n);
    QuadratureRule rule;
    rule.domain = ReferenceDomain::simplex;
    rule.dim = 1;
    rule.order = 2 * n - 1;
    rule.points = FloatTensor({n, 2});
    rule.weights = FloatTensor({n});
    // roots of P_n on [-1, 1] by Newton iteration, mirrored for symmetry
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-17) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 1.0 / ((1.0 - x * x) * dp * dp); // half of the [-1,1] weight
        const int lo = i, hi = n - 1 - i;
        // x = cos(...) > 0 for small i; hi gets the larger coordinate on [0, 1]
        const double t = 0.5 * (1.0 - x);
        rule.points(lo, 1) = t;
        rule.points(lo, 0) = 1.0 - t;
        rule.points(hi, 1) = 1.0 - t;
        rule.points(hi, 0) = t;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1) {
        rule.points(n / 2, 0) = 0.5;
        rule.points(n / 2, 1) = 0.5;
    }
    return rule;
}

/// Tensor product of 1D rules on [0,1]^k. Weights are the flattened outer product.
inline QuadratureRule tensor_product_rule(std::span<const QuadratureRule> factors)
{
    FEALCORE_THROW_IF(factors.size() < 2 || factors.size() > 3, InvalidArgument,
                      "tensor_product_rule: need 2 or 3 factors, got ", factors.size());
    for (std::size_t f = 0; f < factors.size(); ++f) {
        FEALCORE_THROW_IF(factors[f].dim != 1, InvalidArgument, "tensor_product_rule: factor ", f,
                          " is a ", factors[f].dim, "D rule");
    }
    const int k = static_cast<int>(factors.size());
    Index total = 1;
    int order = factors[0].order;
    for (const auto& f : factors) {
        total *= f.size();
        order = std::min(order, f.order);
    }
    QuadratureRule rule;
    rule.domain = ReferenceDomain::hypercube;
    rule.dim = k;
    rule.order = order;
    rule.points = FloatTensor({total, k});
    rule.weights = FloatTensor({total});
    std::vector<FloatTensor> coords;
    for (const auto& f : factors) coords.push_back(f.coordinates());
    std::vector<Index> ids(static_cast<std::size_t>(k));
    for (Index flat = 0; flat < total; ++flat) {
        Index rem = flat;
        for (int a = k - 1; a >= 0; --a) {
            const auto ua = static_cast<std::size_t>(a);
            ids[ua] = rem % factors[ua].size();
            rem /= factors[ua].size();
            rule.points(flat, a) = coords[ua](ids[ua], 0);
        }
        // first axis slowest, as einsum('i,j->ij').reshape(-1)
        double w = factors[0].weights[ids[0]];
        for (int a = 1; a < k; ++a) w *= factors[static_cast<std::size_t>(a)].weights[ids[static_cast<std::size_t>(a)]];
        rule.weights[flat] = w;
    }
    return rule;
}

inline QuadratureRule tensor_product_rule(const QuadratureRule& a, const QuadratureRule& b)
{
    const QuadratureRule f[] = {a, b};
    return tensor_product_rule(std::span<const QuadratureRule>(f));
}

inline QuadratureRule tensor_product_rule(const QuadratureRule& a, const QuadratureRule& b,
                                          const QuadratureRule& c)
{
    const QuadratureRule f[] = {a, b, c};
    return tensor_product_rule(std::span<const QuadratureRule>(f));
}

/// Highest exactness degree available for simplex_rule(dim, q).
inline int simplex_rule_max_order(int dim)
{
    switch (dim) {
    case 1: return 63;
    case 2: return detail::k_max_triangle_degree;
    case 3: return detail::k_max_tetrahedron_degree;
    default: return 0;
    }
}

/// Fully symmetric rule on the reference simplex exact for polynomials of degree <= q.
inline QuadratureRule simplex_rule(int dim, int q)
{
    FEALCORE_THROW_IF(dim < 1 || dim > 3, InvalidArgument, "simplex_rule: dimension ", dim, " not in {1,2,3}");
    const int qmax = simplex_rule_max_order(dim);
    FEALCORE_THROW_IF(q < 1 || q > qmax, InvalidArgument, "simplex_rule: degree ", q,
                      " unavailable for dimension ", dim, " (supported 1..", qmax, ")");
    if (dim == 1) return gauss_legendre_1d(q / 2 + 1);

    const auto& table = dim == 2 ? detail::triangle_rule_table(q) : detail::tetrahedron_rule_table(q);
    std::vector<double> pts;
    std::vector<double> wts;
    for (const auto& orbit : table) {
        for (const auto& bc : detail::expand_orbit(orbit)) {
            pts.insert(pts.end(), bc.begin(), bc.begin() + dim + 1);
            wts.push_back(orbit.weight);
        }
    }
    QuadratureRule rule;
    rule.domain = ReferenceDomain::simplex;
    rule.dim = dim;
    rule.order = q;
    const auto nq = static_cast<Index>(wts.size());
    rule.points = FloatTensor({nq, dim + 1}, std::move(pts));
    rule.weights = FloatTensor({nq}, std::move(wts));
    return rule;
}

/// Default rule for a reference cell: symmetric simplex rule, or Gauss-Legendre product on hypercubes.
inline QuadratureRule reference_rule(ReferenceDomain domain, int dim, int q)
{
    if (domain == ReferenceDomain::simplex) return simplex_rule(dim, std::clamp(q, 1, simplex_rule_max_order(dim)));
    const QuadratureRule g = gauss_legendre_1d(std::max(1, q / 2 + 1));
    return dim == 2 ? tensor_product_rule(g, g) : tensor_product_rule(g, g, g);
}

} // namespace fealcore
