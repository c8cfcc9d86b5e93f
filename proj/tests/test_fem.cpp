#include "fealcore/fem.hpp"
#include "fealcore/solver.hpp"
#include "fealcore/study.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fealcore;

namespace {

MeshTopology reference_triangle()
{
    return build_topology(CellKind::triangle, FloatTensor::from_rows({{0, 0}, {1, 0}, {0, 1}}),
                          IndexTensor::from_rows({{0, 1, 2}}));
}

MeshTopology perturbed_box(int td, Index n, std::uint64_t seed)
{
    MeshTopology m = td == 2 ? from_box(CellKind::triangle, {0, 1, 0, 1}, {n, n})
                             : from_box(CellKind::tetrahedron, {0, 1, 0, 1, 0, 1}, {n, n, n});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.15, 0.15);
    FloatTensor node = m.node();
    for (Index i = 0; i < node.shape(0); ++i) {
        bool interior = true;
        for (int d = 0; d < td; ++d) interior = interior && node(i, d) > 1e-12 && node(i, d) < 1 - 1e-12;
        if (!interior) continue;
        for (int d = 0; d < td; ++d) node(i, d) += u(rng) / static_cast<double>(n);
    }
    return build_topology(m.kind(), node, m.cell());
}

FloatTensor dense_of(const COOMatrix& a) { return to_dense(a); }

/// Dense solve of the system restricted to unflagged DoFs, with the flagged ones fixed at g.
FloatTensor reduced_solve(const FloatTensor& k, const FloatTensor& b, const BoolTensor& flag, const FloatTensor& g)
{
    const Index n = b.size();
    std::vector<Index> free;
    for (Index i = 0; i < n; ++i)
        if (!flag[i]) free.push_back(i);
    const auto m = static_cast<Index>(free.size());
    FloatTensor kr({m, m}), br({m});
    for (Index r = 0; r < m; ++r) {
        const Index i = free[static_cast<std::size_t>(r)];
        double s = b[i];
        for (Index j = 0; j < n; ++j)
            if (flag[j]) s -= k(i, j) * g[j];
        br[r] = s;
        for (Index c = 0; c < m; ++c) kr(r, c) = k(i, free[static_cast<std::size_t>(c)]);
    }
    const FloatTensor xr = dense_lu(kr, br);
    FloatTensor x({n});
    for (Index i = 0; i < n; ++i) x[i] = flag[i] ? g[i] : 0.0;
    for (Index r = 0; r < m; ++r) x[free[static_cast<std::size_t>(r)]] = xr[r];
    return x;
}

struct WarningCapture {
    std::vector<std::string> messages;
    DiagnosticHandler saved;
    WarningCapture() : saved(diagnostic_handler())
    {
        diagnostic_handler() = [this](const std::string& m) { messages.push_back(m); };
    }
    ~WarningCapture() { diagnostic_handler() = saved; }
};

} // namespace

TEST(Material, VoigtMatrix)
{
    const IsotropicMaterial m(2.0, 3.0);
    const FloatTensor d = m.voigt_matrix();
    ASSERT_EQ(d.shape(), (FloatTensor::Shape{6, 6}));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            double e = 0.0;
            if (i < 3 && j < 3) e = 2.0 + (i == j ? 6.0 : 0.0);
            if (i >= 3 && i == j) e = 3.0;
            EXPECT_EQ(d(i, j), e);
        }
    const FloatTensor ps = IsotropicMaterial(2.0, 3.0, Hypothesis::plane_stress).voigt_matrix();
    EXPECT_NEAR(ps(0, 1), 2 * 2.0 * 3.0 / (2.0 + 6.0), 1e-15);
    EXPECT_NEAR(ps(2, 2), 3.0, 1e-15);
    const FloatTensor pe = IsotropicMaterial(2.0, 3.0, Hypothesis::plane_strain).voigt_matrix();
    EXPECT_EQ(pe(0, 0), 8.0);
    EXPECT_THROW(IsotropicMaterial(1.0, 0.0), InvalidArgument);
    EXPECT_THROW(IsotropicMaterial(-1.0, 1.0), InvalidArgument);
}

TEST(Integrators, ReferenceTriangleByHand)
{
    const MeshTopology mesh = reference_triangle();
    const LagrangeSpace s(mesh, 1);
    const QuadratureRule r = s.quadrature_rule(2);
    const FloatTensor k = diffusion_integrator(s, r).values;
    const double kh[3][3] = {{1, -0.5, -0.5}, {-0.5, 0.5, 0}, {-0.5, 0, 0.5}};
    const FloatTensor m = mass_integrator(s, r).values;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            EXPECT_NEAR(k(0, i, j), kh[i][j], 1e-15);
            EXPECT_NEAR(m(0, i, j), (i == j ? 2.0 : 1.0) / 24.0, 1e-15);
        }
    const FloatTensor b = source_integrator(s, r, [](const Point&) { return 6.0; }).values;
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(b(0, i), 1.0, 1e-15);
}

TEST(Integrators, DiffusionEnergyOfPolynomials)
{
    // v^T K v = integral |grad v|^2 for the interpolant of a polynomial of degree p
    for (int td : {2, 3})
        for (int p : {1, 2, 3}) {
            const MeshTopology mesh = perturbed_box(td, 2, 5);
            const LagrangeSpace s(mesh, p);
            const QuadratureRule r = s.quadrature_rule(2 * p);
            const COOMatrix k = assemble_bilinear(diffusion_integrator(s, r, [](const Point& x) { return 1 + x[0]; }));
            auto f = [&](const Point& x) { return std::pow(0.3 + x[0] - 2 * x[1] + 0.5 * x[2], p); };
            auto gf = [&](const Point& x) {
                const double t = p * std::pow(0.3 + x[0] - 2 * x[1] + 0.5 * x[2], p - 1);
                return Point{t, -2 * t, 0.5 * t};
            };
            const FloatTensor v = interpolate(s, f).coefficients();
            const FloatTensor kv = spmv(k, v);
            double energy = 0.0;
            for (Index i = 0; i < v.size(); ++i) energy += v[i] * kv[i];
            const QuadratureRule hi = s.quadrature_rule(2 * p + 1);
            const FloatTensor pts = s.physical_points(hi.points);
            const FloatTensor w = s.integration_weights(hi);
            double exact = 0.0;
            for (Index c = 0; c < pts.shape(0); ++c)
                for (Index q = 0; q < pts.shape(1); ++q) {
                    Point x{0, 0, 0};
                    for (int d = 0; d < td; ++d) x[static_cast<std::size_t>(d)] = pts(c, q, d);
                    const Point g = gf(x);
                    double g2 = 0.0;
                    for (int d = 0; d < td; ++d) g2 += g[static_cast<std::size_t>(d)] * g[static_cast<std::size_t>(d)];
                    exact += w(c, q) * (1 + x[0]) * g2;
                }
            EXPECT_NEAR(energy, exact, 1e-11 * std::max(1.0, exact)) << td << ' ' << p;
            // constants are in the kernel
            const FloatTensor k1 = spmv(k, FloatTensor({v.size()}, 1.0));
            for (Index i = 0; i < v.size(); ++i) EXPECT_NEAR(k1[i], 0.0, 1e-12);
        }
}

TEST(Integrators, MassReproducesL2InnerProduct)
{
    const MeshTopology mesh = perturbed_box(3, 2, 6);
    const LagrangeSpace s(mesh, 2);
    const COOMatrix m = assemble_bilinear(mass_integrator(s, s.quadrature_rule(4)));
    const FloatTensor one({s.number_of_global_dofs()}, 1.0);
    const FloatTensor m1 = spmv(m, one);
    double vol = 0.0;
    for (double v : m1.storage()) vol += v;
    EXPECT_NEAR(vol, 1.0, 1e-13);
}

class ElasticOracle : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(ElasticOracle, MatchesIndexNotation)
{
    const auto [td, p] = GetParam();
    const MeshTopology mesh = perturbed_box(td, 1, 7);
    const LagrangeSpace s(mesh, p);
    const TensorSpace v(s, td);
    const double lam = 1.7, mu = 0.6;
    const IsotropicMaterial mat(lam, mu, td == 3 ? Hypothesis::three_dimensional : Hypothesis::plane_strain);
    const QuadratureRule r = s.quadrature_rule(2 * p);
    const FloatTensor k = linear_elastic_integrator(v, mat, r).values;
    const FloatTensor g = s.grad_basis(r.points);
    const FloatTensor w = s.integration_weights(r);
    const Index ldof = s.number_of_local_dofs();
    // K[(i,a),(j,b)] = sum_q w (lam d_a phi_i d_b phi_j + mu d_b phi_i d_a phi_j + mu delta_ab grad phi_i . grad phi_j)
    for (Index c = 0; c < mesh.number_of_cells(); ++c)
        for (Index i = 0; i < ldof; ++i)
            for (Index j = 0; j < ldof; ++j)
                for (int a = 0; a < td; ++a)
                    for (int b = 0; b < td; ++b) {
                        double e = 0.0;
                        for (Index q = 0; q < r.size(); ++q) {
                            double dot = 0.0;
                            for (int d = 0; d < td; ++d) dot += g(c, q, i, d) * g(c, q, j, d);
                            e += w(c, q) * (lam * g(c, q, i, a) * g(c, q, j, b) + mu * g(c, q, i, b) * g(c, q, j, a) +
                                            (a == b ? mu * dot : 0.0));
                        }
                        EXPECT_NEAR(k(c, i * td + a, j * td + b), e, 1e-12 * std::max(1.0, std::abs(e)));
                    }
}

TEST_P(ElasticOracle, RigidBodyModesAreInTheKernel)
{
    const auto [td, p] = GetParam();
    const MeshTopology mesh = perturbed_box(td, 2, 8);
    const LagrangeSpace s(mesh, p);
    const TensorSpace v(s, td);
    const IsotropicMaterial mat(1.0, 1.0, td == 3 ? Hypothesis::three_dimensional : Hypothesis::plane_strain);
    const COOMatrix k = assemble_bilinear(linear_elastic_integrator(v, mat, s.quadrature_rule(2 * p)));
    std::vector<VectorFunction> modes;
    for (int a = 0; a < td; ++a)
        modes.push_back([a](const Point&) {
            Point u{0, 0, 0};
            u[static_cast<std::size_t>(a)] = 1.0;
            return u;
        });
    modes.push_back([](const Point& x) { return Point{-x[1], x[0], 0}; });
    if (td == 3) {
        modes.push_back([](const Point& x) { return Point{0, -x[2], x[1]}; });
        modes.push_back([](const Point& x) { return Point{x[2], 0, -x[0]}; });
    }
    for (const auto& m : modes) {
        const FloatTensor ku = spmv(k, interpolate(v, m).coefficients());
        for (Index i = 0; i < ku.size(); ++i) EXPECT_NEAR(ku[i], 0.0, 1e-12);
    }
    // a genuine strain is not
    const FloatTensor ks = spmv(k, interpolate(v, [](const Point& x) { return Point{x[0], 0, 0}; }).coefficients());
    double n2 = 0.0;
    for (double x : ks.storage()) n2 += x * x;
    EXPECT_GT(n2, 1e-3);
}

INSTANTIATE_TEST_SUITE_P(Dims, ElasticOracle, ::testing::Combine(::testing::Values(2, 3), ::testing::Values(1, 2)));

TEST(Elasticity, RejectsMismatchedSpaces)
{
    const MeshTopology mesh = perturbed_box(3, 1, 1);
    const LagrangeSpace s(mesh, 1);
    const QuadratureRule r = s.quadrature_rule(2);
    EXPECT_THROW(linear_elastic_integrator(TensorSpace(s, 2), IsotropicMaterial(1, 1), r), InvalidArgument);
    EXPECT_THROW(linear_elastic_integrator(TensorSpace(s, 3), IsotropicMaterial(1, 1, Hypothesis::plane_stress), r),
                 InvalidArgument);
}

TEST(Assembly, MatchesNaiveDenseAccumulation)
{
    const MeshTopology mesh = perturbed_box(2, 3, 9);
    const LagrangeSpace s(mesh, 2);
    const ElementMatrixBlock blk = diffusion_integrator(s, s.quadrature_rule(4));
    const Index n = s.number_of_global_dofs();
    FloatTensor expect({n, n});
    for (Index c = 0; c < blk.values.shape(0); ++c)
        for (Index i = 0; i < 6; ++i)
            for (Index j = 0; j < 6; ++j) expect(blk.row_dof(c, i), blk.col_dof(c, j)) += blk.values(c, i, j);
    const COOMatrix a = assemble_bilinear(blk);
    EXPECT_TRUE(a.coalesced());
    const FloatTensor d = dense_of(a);
    for (Index k = 0; k < d.size(); ++k) EXPECT_NEAR(d[k], expect[k], 1e-14);
    // symmetric to the last bit
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) EXPECT_EQ(d(i, j), d(j, i));

    // two blocks add up
    const ElementMatrixBlock both[] = {blk, mass_integrator(s, s.quadrature_rule(4))};
    const FloatTensor sum = dense_of(assemble_bilinear(std::span<const ElementMatrixBlock>(both)));
    const FloatTensor mass = dense_of(assemble_bilinear(both[1]));
    for (Index k = 0; k < d.size(); ++k) EXPECT_NEAR(sum[k], d[k] + mass[k], 1e-14);
}

TEST(Assembly, BatchedCoefficientsMatchIndependentAssemblies)
{
    const MeshTopology mesh = perturbed_box(2, 2, 10);
    const LagrangeSpace s(mesh, 2);
    const QuadratureRule r = s.quadrature_rule(4);
    const std::vector<double> cs{0.5, 1.0, 3.0};
    const COOMatrix batched = assemble_bilinear(diffusion_integrator(s, r, Coefficient::batched(cs)));
    EXPECT_EQ(batched.batch(), 3);
    const FloatTensor d = to_dense(batched);
    const Index n = s.number_of_global_dofs();
    for (std::size_t b = 0; b < cs.size(); ++b) {
        const FloatTensor single = to_dense(assemble_bilinear(diffusion_integrator(s, r, cs[b])));
        for (Index k = 0; k < n * n; ++k)
            EXPECT_NEAR(d[static_cast<Index>(b) * n * n + k], single[k], 1e-14);
    }
    const COOMatrix mb = assemble_bilinear(mass_integrator(s, r, Coefficient::batched({2.0, 4.0})));
    const FloatTensor m1 = to_dense(assemble_bilinear(mass_integrator(s, r)));
    const FloatTensor md = to_dense(mb);
    for (Index k = 0; k < n * n; ++k) {
        EXPECT_NEAR(md[k], 2 * m1[k], 1e-15);
        EXPECT_NEAR(md[n * n + k], 4 * m1[k], 1e-15);
    }
}

TEST(Assembly, BadDofMapNamesCellAndSlot)
{
    const MeshTopology mesh = perturbed_box(2, 1, 11);
    const LagrangeSpace s(mesh, 1);
    ElementMatrixBlock blk = diffusion_integrator(s, s.quadrature_rule(2));
    blk.row_dof(1, 2) = 99;
    try {
        (void)assemble_bilinear(blk);
        FAIL() << "expected InvalidArgument";
    } catch (const InvalidArgument& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("cell 1"), std::string::npos) << msg;
        EXPECT_NE(msg.find("slot 2"), std::string::npos) << msg;
    }
    ElementVectorBlock vb = source_integrator(s, s.quadrature_rule(2), [](const Point&) { return 1.0; });
    vb.dof(0, 0) = -1;
    EXPECT_THROW(assemble_linear(vb), InvalidArgument);
}

TEST(Assembly, SourceVectors)
{
    const MeshTopology mesh = perturbed_box(3, 2, 12);
    const LagrangeSpace s(mesh, 2);
    const QuadratureRule r = s.quadrature_rule(4);
    const FloatTensor b = assemble_linear(source_integrator(s, r, [](const Point& x) { return 1 + x[0]; }));
    double total = 0.0;
    for (double v : b.storage()) total += v;
    EXPECT_NEAR(total, 1.5, 1e-13);

    const TensorSpace v(s, 3);
    const FloatTensor bv =
        assemble_linear(source_integrator(v, r, [](const Point& x) { return Point{1.0, 2.0, 1 + x[0]}; }));
    const FloatTensor b1 = assemble_linear(source_integrator(s, r, [](const Point&) { return 1.0; }));
    for (Index k = 0; k < s.number_of_global_dofs(); ++k) {
        EXPECT_NEAR(bv[3 * k], b1[k], 1e-15);
        EXPECT_NEAR(bv[3 * k + 1], 2 * b1[k], 1e-15);
        EXPECT_NEAR(bv[3 * k + 2], b[k], 1e-15);
    }
    EXPECT_THROW(source_integrator(s, r, [](const Point&) { return std::nan(""); }), NumericalError);
}

TEST(Assembly, UnderIntegrationWarns)
{
    const MeshTopology mesh = perturbed_box(2, 1, 13);
    const LagrangeSpace s(mesh, 3);
    WarningCapture cap;
    (void)mass_integrator(s, s.quadrature_rule(2));
    (void)diffusion_integrator(s, s.quadrature_rule(4));
    ASSERT_EQ(cap.messages.size(), 1u);
    EXPECT_NE(cap.messages[0].find("mass_integrator"), std::string::npos);
}

TEST(Dirichlet, SymmetricEliminationMatchesReducedSystem)
{
    const MeshTopology mesh = perturbed_box(2, 3, 14);
    const LagrangeSpace s(mesh, 2);
    const QuadratureRule r = s.quadrature_rule(4);
    const COOMatrix k = assemble_bilinear(diffusion_integrator(s, r));
    const FloatTensor b = assemble_linear(source_integrator(s, r, [](const Point& x) { return std::sin(3 * x[0]) + x[1]; }));
    const DirichletData bc = dirichlet_data(s, [](const Point& x) { return std::cos(x[0] + 2 * x[1]); });
    const DirichletSystem sys = apply_dirichlet(k, b, bc);

    const FloatTensor kd = to_dense(sys.matrix);
    const Index n = b.size();
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            EXPECT_EQ(kd(i, j), kd(j, i));
            if (bc.flag[i] || bc.flag[j]) {
                EXPECT_EQ(kd(i, j), i == j ? 1.0 : 0.0);
            }
        }
    const FloatTensor x = dense_lu(kd, sys.rhs);
    const FloatTensor oracle = reduced_solve(to_dense(k), b, bc.flag, bc.values);
    for (Index i = 0; i < n; ++i) EXPECT_NEAR(x[i], oracle[i], 1e-12);
    for (Index i = 0; i < n; ++i) {
        if (bc.flag[i]) {
            EXPECT_EQ(sys.lift[i], bc.values[i]);
        }
    }
}

TEST(ManufacturedSolution, BodyForceBalancesStressDivergence)
{
    // -div sigma(u) from nested central differences of the displacement
    for (const auto& [lam, mu] : {std::pair{1.0, 1.0}, std::pair{3.0, 0.5}}) {
        benchmark::ElasticityCube pb;
        pb.lambda = lam;
        pb.mu = mu;
        const double h = 1e-5;
        auto grad_u = [&](const Point& x) {
            std::array<std::array<double, 3>, 3> g{};
            for (int d = 0; d < 3; ++d) {
                Point xp = x, xm = x;
                xp[static_cast<std::size_t>(d)] += h;
                xm[static_cast<std::size_t>(d)] -= h;
                const Point up = pb.displacement(xp), um = pb.displacement(xm);
                for (int a = 0; a < 3; ++a)
                    g[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)] =
                        (up[static_cast<std::size_t>(a)] - um[static_cast<std::size_t>(a)]) / (2 * h);
            }
            return g;
        };
        auto sigma = [&](const Point& x) {
            const auto g = grad_u(x);
            const double tr = g[0][0] + g[1][1] + g[2][2];
            std::array<std::array<double, 3>, 3> s{};
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = 0; b < 3; ++b) s[a][b] = mu * (g[a][b] + g[b][a]) + (a == b ? lam * tr : 0.0);
            return s;
        };
        std::mt19937_64 rng(15);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 1000; ++k) {
            const Point x{u(rng), u(rng), u(rng)};
            Point div{0, 0, 0};
            for (std::size_t d = 0; d < 3; ++d) {
                Point xp = x, xm = x;
                xp[d] += h;
                xm[d] -= h;
                const auto sp = sigma(xp), sm = sigma(xm);
                for (std::size_t a = 0; a < 3; ++a) div[a] += (sp[a][d] - sm[a][d]) / (2 * h);
            }
            const Point f = pb.body_force(x);
            for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(-div[a], f[a], 1e-4 * std::max(1.0, std::abs(f[a])));
        }
    }
}

TEST(ManufacturedSolution, VanishesOnTheBoundary)
{
    const benchmark::ElasticityCube pb;
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        Point x{u(rng), u(rng), u(rng)};
        x[static_cast<std::size_t>(k % 3)] = (k / 3) % 2;
        const Point d = pb.displacement(x);
        for (double v : d) EXPECT_NEAR(v, 0.0, 1e-15);
    }
}

TEST(PatchTests, PoissonReproducesDegreePSolutions)
{
    for (int p : {1, 2, 3}) {
        const MeshTopology mesh = perturbed_box(2, 3, 17);
        const LagrangeSpace s(mesh, p);
        const QuadratureRule r = s.quadrature_rule(p + 3);
        const benchmark::PoissonSquare pb{p};
        const COOMatrix k = assemble_bilinear(diffusion_integrator(s, r));
        const FloatTensor b = assemble_linear(source_integrator(s, r, [&](const Point& x) { return pb.source(x); }));
        const DirichletSystem sys = apply_dirichlet(k, b, dirichlet_data(s, [&](const Point& x) { return pb.solution(x); }));
        const auto [x, rep] = dense_lu(sys.matrix, sys.rhs);
        EXPECT_TRUE(rep.converged);
        const FEFunction uh(s, 1, x);
        EXPECT_LT(l2_error(uh, ScalarFunction([&](const Point& y) { return pb.solution(y); }), r), 1e-11) << p;
    }
}

TEST(PatchTests, ElasticityReproducesLinearDisplacement)
{
    const MeshTopology mesh = perturbed_box(3, 2, 18);
    const LagrangeSpace s(mesh, 1);
    const TensorSpace v(s, 3);
    const QuadratureRule r = s.quadrature_rule(2);
    auto exact = [](const Point& x) {
        return Point{0.1 + x[0] - 0.3 * x[1], 0.2 * x[2] - x[0], 0.5 * x[0] + x[1] + 0.7 * x[2]};
    };
    const COOMatrix k = assemble_bilinear(linear_elastic_integrator(v, IsotropicMaterial(2.0, 0.7), r));
    const FloatTensor b({v.number_of_global_dofs()});
    const DirichletSystem sys = apply_dirichlet(k, b, dirichlet_data(v, exact));
    CGOptions opt;
    opt.rtol = 1e-13;
    const auto [x, rep] = cg(sys.matrix, sys.rhs, opt);
    ASSERT_TRUE(rep.converged);
    const FloatTensor ex = interpolate(v, exact).coefficients();
    for (Index i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], ex[i], 1e-11);
}

TEST(L2Error, KnownValues)
{
    const MeshTopology mesh = perturbed_box(2, 2, 19);
    const LagrangeSpace s(mesh, 2);
    const QuadratureRule r = s.quadrature_rule(5);
    auto f = [](const Point& x) { return x[0] * x[1] + 0.5; };
    FEFunction uh = interpolate(s, f);
    EXPECT_LT(l2_error(uh, ScalarFunction(f), r), 1e-15);
    for (auto& c : uh.coefficients().data()) c += 0.25;
    EXPECT_NEAR(l2_error(uh, ScalarFunction(f), r), 0.25, 1e-14);
    const TensorSpace v(s, 2);
    const FEFunction z(v);
    // || (x, 1) ||^2 = 1/3 + 1
    EXPECT_NEAR(l2_error(z, VectorFunction([](const Point& x) { return Point{x[0], 1.0, 0.0}; }), r),
                std::sqrt(4.0 / 3.0), 1e-14);
    EXPECT_THROW(l2_error(z, ScalarFunction(f), r), InvalidArgument);
}
