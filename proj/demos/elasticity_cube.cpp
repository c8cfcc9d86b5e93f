// Linear elasticity on the unit cube with a manufactured displacement and
// full Dirichlet boundary, assembled and solved step by step.
#include "fealcore/fealcore.hpp"

#include <cstdio>

using namespace fealcore;

int main()
{
    const benchmark::ElasticityCube problem{};
    const MeshTopology mesh = from_box(CellKind::tetrahedron, {0, 1, 0, 1, 0, 1}, {8, 8, 8});
    const LagrangeSpace scalar(mesh, 1);
    const TensorSpace space(scalar, 3);
    const QuadratureRule rule = scalar.quadrature_rule(4);

    const IsotropicMaterial material(problem.lambda, problem.mu);
    const COOMatrix k = assemble_bilinear(linear_elastic_integrator(space, material, rule));
    const FloatTensor f =
        assemble_linear(source_integrator(space, rule, [&](const Point& x) { return problem.body_force(x); }));
    const DirichletData bc = dirichlet_data(space, [&](const Point& x) { return problem.displacement(x); });
    const DirichletSystem sys = apply_dirichlet(k, f, bc);

    const auto [u, report] = cg(sys.matrix, sys.rhs, {1e-10});
    std::printf("dofs %lld, cg iterations %lld, relative residual %.3e\n", static_cast<long long>(u.size()),
                static_cast<long long>(report.iterations), report.final_relative_residual);

    const FEFunction uh(space, u);
    const double err = l2_error(uh, VectorFunction([&](const Point& x) { return problem.displacement(x); }), rule);
    std::printf("L2 error %.5e\n", err);

    write_vtk("elasticity_cube.vtk", mesh, {{"displacement", FieldLocation::point, 3, u}});
    std::printf("wrote elasticity_cube.vtk\n");
    return report.converged ? 0 : 2;
}
