#include "fealcore/fealcore.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

using namespace fealcore;

namespace {

struct Common {
    std::string problem = "elasticity3d";
    std::optional<std::string> backend;
    int degree = 1;
    Index base = 4;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--problem", c.problem, "elasticity3d or poisson2d")
        ->check(CLI::IsMember({"elasticity3d", "poisson2d"}));
    app->add_option("--backend", c.backend, "serial or parallel (overrides FEALCORE_BACKEND)")
        ->check(CLI::IsMember({"serial", "parallel"}));
    app->add_option("--degree", c.degree, "Lagrange degree")->check(CLI::Range(1, 3));
    app->add_option("--base", c.base, "divisions per axis of the coarsest mesh")->check(CLI::PositiveNumber);
}

void print_table(const std::vector<ConvergenceRecord>& rec)
{
    std::printf("%12s %10s %14s %10s %6s %12s\n", "h", "dof", "l2_error", "order", "iters", "residual");
    for (const auto& r : rec) {
        std::printf("%12s %10lld %14s %10s %6lld %12s%s\n", format_sci(r.h).c_str(), static_cast<long long>(r.dof),
                    format_sci(r.l2_error).c_str(), r.order ? format_sci(*r.order).c_str() : "-",
                    static_cast<long long>(r.iterations), format_sci(r.residual).c_str(),
                    r.converged ? "" : "  NOT CONVERGED");
    }
}

int run_study_cmd(const Common& c, const StudyConfig& base_cfg, const std::string& out)
{
    StudyConfig cfg = base_cfg;
    cfg.problem = parse_problem(c.problem);
    cfg.degree = c.degree;
    cfg.base_divisions = c.base;
    const auto rec = run_study(cfg);
    print_table(rec);
    if (!out.empty()) write_csv(out, rec);
    for (const auto& r : rec)
        if (!r.converged) return 2;
    return 0;
}

int export_vtk_cmd(const Common& c, int level, bool with_solution, const std::string& out)
{
    const Problem problem = parse_problem(c.problem);
    const MeshTopology mesh = study_mesh(problem, c.base, level);
    std::vector<VtkField> fields;
    fields.push_back({"measure", FieldLocation::cell, 1, cell_measure(mesh)});
    int code = 0;
    if (with_solution) {
        StudyConfig cfg;
        cfg.problem = problem;
        cfg.degree = 1;
        const LevelResult res = solve_level(cfg, mesh);
        const Index comps = problem == Problem::elasticity3d ? mesh.geo_dim() : 1;
        fields.push_back({"u", FieldLocation::point, comps, res.solution});
        std::printf("dof %lld  l2_error %s\n", static_cast<long long>(res.record.dof),
                    format_sci(res.record.l2_error).c_str());
        if (!res.record.converged) code = 2;
    }
    write_vtk(out, mesh, fields);
    std::printf("wrote %s: %lld nodes, %lld cells\n", out.c_str(), static_cast<long long>(mesh.number_of_nodes()),
                static_cast<long long>(mesh.number_of_cells()));
    return code;
}

int export_mtx_cmd(const Common& c, int level, const std::string& out)
{
    const Problem problem = parse_problem(c.problem);
    const MeshTopology mesh = study_mesh(problem, c.base, level);
    const LagrangeSpace space(mesh, c.degree);
    const QuadratureRule rule = space.quadrature_rule(2 * c.degree);
    COOMatrix a;
    if (problem == Problem::elasticity3d) {
        const TensorSpace vspace(space, mesh.geo_dim());
        a = assemble_bilinear(linear_elastic_integrator(vspace, IsotropicMaterial(1.0, 1.0), rule));
    } else {
        a = assemble_bilinear(diffusion_integrator(space, rule));
    }
    write_matrix_market(out, a);
    const COOMatrix ca = coalesce(a);
    std::printf("wrote %s: %lld x %lld, %lld nonzeros\n", out.c_str(), static_cast<long long>(ca.nrows()),
                static_cast<long long>(ca.ncols()), static_cast<long long>(ca.nnz()));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fealcore finite element tools"};
    app.require_subcommand(1);

    Common common;
    StudyConfig cfg;
    std::string solver = "cg";
    std::string out;
    int level = 0;
    bool with_solution = false;
    double rtol = 0.0;

    auto* study = app.add_subcommand("study", "run a convergence study and print the error table");
    add_common(study, common);
    study->add_option("--levels", cfg.levels, "number of meshes (default 4 for p=1, 3 otherwise)")
        ->check(CLI::PositiveNumber);
    study->add_flag("--deep", cfg.deep, "add one more refinement level");
    study->add_option("--solver", solver, "cg or lu")->check(CLI::IsMember({"cg", "lu"}));
    auto* rtol_opt = study->add_option("--rtol", rtol, "relative residual tolerance for CG")
                         ->check(CLI::PositiveNumber);
    study->add_option("--max-iter", cfg.max_iter, "CG iteration cap (default 10 * gdof)");
    study->add_option("--quadrature", cfg.quadrature, "quadrature degree (default p + 3)");
    study->add_option("--out", out, "CSV output path");

    auto* vtk = app.add_subcommand("export-vtk", "write a study mesh as legacy VTK");
    add_common(vtk, common);
    vtk->add_option("--level", level, "refinement level")->check(CLI::NonNegativeNumber);
    vtk->add_flag("--solution", with_solution, "solve with p=1 and attach the discrete solution");
    vtk->add_option("--out", out, "VTK output path")->required();

    auto* mtx = app.add_subcommand("export-mtx", "write a stiffness matrix in MatrixMarket format");
    add_common(mtx, common);
    mtx->add_option("--level", level, "refinement level")->check(CLI::NonNegativeNumber);
    mtx->add_option("--out", out, "MatrixMarket output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const BackendId backend = resolve_backend(common.backend);
        BackendManager::instance().set_backend(backend);
        std::printf("backend %s\n", std::string(to_string(backend)).c_str());
        if (*study) {
            cfg.solver = solver == "lu" ? SolverKind::lu : SolverKind::cg;
            if (rtol_opt->count() > 0) cfg.rtol = rtol;
            return run_study_cmd(common, cfg, out);
        }
        if (*vtk) return export_vtk_cmd(common, level, with_solution, out);
        return export_mtx_cmd(common, level, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
