// A stack of matrices sharing one sparsity pattern: assemble once with a
// batched coefficient, then apply every slice to the same vector.
#include "fealcore/fealcore.hpp"

#include <cmath>
#include <cstdio>

using namespace fealcore;

int main()
{
    const MeshTopology mesh = from_box(CellKind::triangle, {0, 1, 0, 1}, {16, 16});
    const LagrangeSpace space(mesh, 2);
    const QuadratureRule rule = space.quadrature_rule(4);
    const std::vector<double> kappa{0.1, 1.0, 10.0, 100.0};

    const COOMatrix stack = coalesce(assemble_bilinear(diffusion_integrator(space, rule, Coefficient::batched(kappa))));
    const CSRMatrix csr = to_csr(stack);
    std::printf("%lld slices of %lld x %lld, %lld shared nonzeros\n", static_cast<long long>(stack.batch()),
                static_cast<long long>(stack.nrows()), static_cast<long long>(stack.ncols()),
                static_cast<long long>(stack.nnz()));

    // y_b = A_b x for x = interpolated x^2 + y^2
    const FEFunction x = interpolate(space, [](const Point& p) { return p[0] * p[0] + p[1] * p[1]; });
    const FloatTensor y = spmv(csr, x.coefficients());

    const COOMatrix single = assemble_bilinear(diffusion_integrator(space, rule));
    const FloatTensor y1 = spmv(single, x.coefficients());
    const Index n = stack.nrows();
    for (std::size_t b = 0; b < kappa.size(); ++b) {
        double diff = 0.0, norm = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double ref = kappa[b] * y1[i];
            diff = std::max(diff, std::abs(y(static_cast<Index>(b), i) - ref));
            norm = std::max(norm, std::abs(ref));
        }
        std::printf("slice %zu: kappa %6.1f, max |A_b x - kappa A x| / max |kappa A x| = %.2e\n", b, kappa[b],
                    diff / norm);
    }
}
