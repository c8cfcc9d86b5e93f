// Poisson problem on the unit square with a polynomial exact solution:
// every degree reproduces it up to solver tolerance on every level.
#include "fealcore/fealcore.hpp"

#include <cstdio>

using namespace fealcore;

int main()
{
    for (int p = 1; p <= 3; ++p) {
        StudyConfig cfg;
        cfg.problem = Problem::poisson2d;
        cfg.degree = p;
        cfg.levels = 3;
        std::printf("degree %d\n%s\n", p, csv_string(run_study(cfg)).c_str());
    }

    // one level by hand, written out for visualization
    const MeshTopology mesh = study_mesh(Problem::poisson2d, 8, 0);
    StudyConfig cfg;
    cfg.problem = Problem::poisson2d;
    const LevelResult res = solve_level(cfg, mesh);
    write_vtk("poisson_square.vtk", mesh, {{"u", FieldLocation::point, 1, res.solution}});
    std::printf("wrote poisson_square.vtk (%lld nodes)\n", static_cast<long long>(mesh.number_of_nodes()));
}
