#pragma once

#include "fem.hpp"
#include "functionspace.hpp"
#include "mesh.hpp"
#include "solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace fealcore {

namespace benchmark {

/// Manufactured displacement on the unit cube built from
/// a(t) = (t - t^2)^2 and b(t) = 2t^3 - 3t^2 + t, with its body force for
/// Lame parameters (lambda, mu). The field is divergence free, so the body
/// force -div sigma(u) = -mu laplace(u) does not depend on lambda. The
/// displacement carries one factor of mu, so the force carries two.
struct ElasticityCube {
    double lambda = 1.0;
    double mu = 1.0;

    static double a(double t) { return (t - t * t) * (t - t * t); }
    static double b(double t) { return 2 * t * t * t - 3 * t * t + t; }

    [[nodiscard]] Point displacement(const Point& p) const
    {
        const double x = p[0], y = p[1], z = p[2];
        return {200 * mu * a(x) * b(y) * b(z), -100 * mu * a(y) * b(x) * b(z), -100 * mu * a(z) * b(x) * b(y)};
    }

    [[nodiscard]] Point body_force(const Point& p) const
    {
        const double x = p[0], y = p[1], z = p[2];
        const double qx = x * x - x, qy = y * y - y, qz = z * z - z;
        const double m2 = mu * mu;
        return {-400 * m2 * (2 * y - 1) * (2 * z - 1) * (3 * qx * qx * (qy + qz) + (1 - 6 * x + 6 * x * x) * qy * qz),
                200 * m2 * (2 * x - 1) * (2 * z - 1) * (3 * qy * qy * (qx + qz) + (1 - 6 * y + 6 * y * y) * qx * qz),
                200 * m2 * (2 * x - 1) * (2 * y - 1) * (3 * qz * qz * (qx + qy) + (1 - 6 * z + 6 * z * z) * qx * qy)};
    }
};

/// u = (1 + x + 2y)^p on the unit square with f = -laplace(u).
struct PoissonSquare {
    int p = 1;

    [[nodiscard]] double solution(const Point& x) const { return std::pow(1.0 + x[0] + 2.0 * x[1], p); }
    [[nodiscard]] double source(const Point& x) const
    {
        if (p < 2) return 0.0;
        return -5.0 * p * (p - 1) * std::pow(1.0 + x[0] + 2.0 * x[1], p - 2);
    }
};

} // namespace benchmark

enum class Problem { elasticity3d, poisson2d };
enum class SolverKind { cg, lu };

inline std::string_view to_string(Problem p) { return p == Problem::elasticity3d ? "elasticity3d" : "poisson2d"; }

inline Problem parse_problem(std::string_view name)
{
    if (name == "elasticity3d") return Problem::elasticity3d;
    if (name == "poisson2d") return Problem::poisson2d;
    throw InvalidArgument(detail::concat("unknown problem '", name, "' (expected elasticity3d or poisson2d)"));
}

struct StudyConfig {
    Problem problem = Problem::elasticity3d;
    int degree = 1;
    int levels = 0;       ///< 0 selects the default for the degree
    bool deep = false;    ///< one extra refinement level
    SolverKind solver = SolverKind::cg;
    std::optional<double> rtol; ///< absent selects 1e-10, or 1e-13 for poisson2d
    Index max_iter = -1;  ///< negative selects 10 * gdof
    int quadrature = 0;   ///< 0 selects p + 3
    Index base_divisions = 4;
};

struct ConvergenceRecord {
    double h = 0.0;
    Index dof = 0;
    double l2_error = 0.0;
    std::optional<double> order;
    bool converged = true;
    Index iterations = 0;
    double residual = 0.0;
};

/// Poisson patch-test errors must sit far below the elasticity tolerance.
inline double default_rtol(Problem problem) { return problem == Problem::poisson2d ? 1e-13 : 1e-10; }

/// Number of refinement levels a config runs.
inline int study_levels(const StudyConfig& cfg)
{
    int n = cfg.levels > 0 ? cfg.levels : (cfg.degree == 1 ? 4 : 3);
    if (cfg.deep) ++n;
    return n;
}

/// Orders log(e_{k-1}/e_k) / log(h_{k-1}/h_k); absent for the first row and
/// wherever an error is zero or missing.
inline std::vector<std::optional<double>> report_orders(const std::vector<ConvergenceRecord>& rec)
{
    std::vector<std::optional<double>> out(rec.size());
    for (std::size_t k = 1; k < rec.size(); ++k) {
        const auto& a = rec[k - 1];
        const auto& b = rec[k];
        if (!a.converged || !b.converged || !(a.l2_error > 0.0) || !(b.l2_error > 0.0)) continue;
        out[k] = std::log(a.l2_error / b.l2_error) / std::log(a.h / b.h);
    }
    return out;
}

/// Mesh of the given refinement level for a problem: the structured box with
/// base_divisions per axis, uniformly refined level times.
inline MeshTopology study_mesh(Problem problem, Index base_divisions, int level)
{
    FEALCORE_THROW_IF(base_divisions < 1 || level < 0, InvalidArgument, "study_mesh: base ", base_divisions,
                      ", level ", level);
    const Index n = base_divisions;
    const MeshTopology m = problem == Problem::elasticity3d
                               ? from_box(CellKind::tetrahedron, {0.0, 1.0, 0.0, 1.0, 0.0, 1.0}, {n, n, n})
                               : from_box(CellKind::triangle, {0.0, 1.0, 0.0, 1.0}, {n, n});
    return uniform_refine(m, level);
}

struct LevelResult {
    ConvergenceRecord record;
    FloatTensor solution; ///< interleaved coefficients over the level's space
};

/// Assemble, constrain, solve and measure one level on the given mesh.
inline LevelResult solve_level(const StudyConfig& cfg, const MeshTopology& mesh)
{
    const int p = cfg.degree;
    const int q = cfg.quadrature > 0 ? cfg.quadrature : p + 3;
    LagrangeSpace space(mesh, p);
    const QuadratureRule rule = space.quadrature_rule(q);

    CSRMatrix a;
    FloatTensor rhs;
    DirichletData bc;
    std::optional<TensorSpace> vspace;
    const benchmark::ElasticityCube elastic{};
    const benchmark::PoissonSquare poisson{p};
    if (cfg.problem == Problem::elasticity3d) {
        vspace.emplace(space, mesh.geo_dim());
        const IsotropicMaterial material(elastic.lambda, elastic.mu);
        a = to_csr(assemble_bilinear(linear_elastic_integrator(*vspace, material, rule)));
        rhs = assemble_linear(source_integrator(*vspace, rule, [&](const Point& x) { return elastic.body_force(x); }));
        bc = dirichlet_data(*vspace, [&](const Point& x) { return elastic.displacement(x); });
    } else {
        a = to_csr(assemble_bilinear(diffusion_integrator(space, rule)));
        rhs = assemble_linear(source_integrator(space, rule, [&](const Point& x) { return poisson.source(x); }));
        bc = dirichlet_data(space, [&](const Point& x) { return poisson.solution(x); });
    }
    DirichletSystem sys = apply_dirichlet(a, rhs, bc);
    a = CSRMatrix();

    LevelResult res;
    SolveReport rep;
    if (cfg.solver == SolverKind::lu) {
        std::tie(res.solution, rep) = dense_lu(sys.matrix, sys.rhs);
    } else {
        CGOptions opt;
        opt.rtol = cfg.rtol ? *cfg.rtol : default_rtol(cfg.problem);
        opt.max_iter = cfg.max_iter;
        std::tie(res.solution, rep) = cg(sys.matrix, sys.rhs, opt);
    }
    ConvergenceRecord& r = res.record;
    r.dof = sys.rhs.size();
    r.converged = rep.converged;
    r.iterations = rep.iterations;
    r.residual = rep.final_relative_residual;
    if (!r.converged) {
        r.l2_error = std::nan("");
        return res;
    }
    if (vspace) {
        const FEFunction uh(*vspace, res.solution);
        r.l2_error = l2_error(uh, VectorFunction([&](const Point& x) { return elastic.displacement(x); }), rule);
    } else {
        const FEFunction uh(space, 1, res.solution);
        r.l2_error = l2_error(uh, ScalarFunction([&](const Point& x) { return poisson.solution(x); }), rule);
    }
    return res;
}

/// Run every level of a study. Non-converged levels are kept with
/// converged = false and no error value.
inline std::vector<ConvergenceRecord> run_study(const StudyConfig& cfg)
{
    FEALCORE_THROW_IF(cfg.degree < 1 || cfg.degree > 3, InvalidArgument, "run_study: degree ", cfg.degree,
                      " not in {1,2,3}");
    FEALCORE_THROW_IF(cfg.levels < 0, InvalidArgument, "run_study: negative level count");
    const int n = study_levels(cfg);
    std::vector<ConvergenceRecord> rec;
    MeshTopology mesh = study_mesh(cfg.problem, cfg.base_divisions, 0);
    for (int level = 0; level < n; ++level) {
        if (level > 0) mesh = uniform_refine(mesh, 1);
        ConvergenceRecord r = solve_level(cfg, mesh).record;
        r.h = 1.0 / static_cast<double>(cfg.base_divisions << level);
        rec.push_back(r);
    }
    const auto orders = report_orders(rec);
    for (std::size_t k = 0; k < rec.size(); ++k) rec[k].order = orders[k];
    return rec;
}

/// Lower-case scientific notation with 6 significant digits.
inline std::string format_sci(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

inline void write_csv(std::ostream& os, const std::vector<ConvergenceRecord>& rec)
{
    os << "h,dof,l2_error,order\n";
    for (const auto& r : rec) {
        os << format_sci(r.h) << ',' << r.dof << ',' << format_sci(r.l2_error) << ','
           << (r.order ? format_sci(*r.order) : std::string()) << '\n';
    }
}

inline std::string csv_string(const std::vector<ConvergenceRecord>& rec)
{
    std::ostringstream os;
    write_csv(os, rec);
    return os.str();
}

inline void write_csv(const std::string& path, const std::vector<ConvergenceRecord>& rec)
{
    std::ofstream os(path);
    FEALCORE_THROW_IF(!os, InvalidArgument, "write_csv: cannot open ", path);
    write_csv(os, rec);
}

} // namespace fealcore
