#pragma once

#include "mesh.hpp"
#include "sparse.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace fealcore {

/// VTK cell type codes for the supported cell kinds.
inline int vtk_cell_type(CellKind kind)
{
    switch (kind) {
    case CellKind::interval: return 3;
    case CellKind::triangle: return 5;
    case CellKind::quadrangle: return 9;
    case CellKind::tetrahedron: return 10;
    }
    return 0;
}

inline CellKind cell_kind_from_vtk(int code)
{
    switch (code) {
    case 3: return CellKind::interval;
    case 5: return CellKind::triangle;
    case 9: return CellKind::quadrangle;
    case 10: return CellKind::tetrahedron;
    default: throw InvalidArgument(detail::concat("unsupported VTK cell type ", code));
    }
}

enum class FieldLocation { point, cell };

/// Named field with 1, 2 or 3 components per point or cell, stored row-major.
struct VtkField {
    std::string name;
    FieldLocation location = FieldLocation::point;
    Index components = 1;
    FloatTensor values;
};

/// Legacy ASCII unstructured grid. Two-component fields are padded to 3-vectors.
inline void write_vtk(std::ostream& os, const MeshTopology& mesh, const std::vector<VtkField>& fields = {})
{
    const Index nn = mesh.number_of_nodes(), nc = mesh.number_of_cells();
    const int gd = mesh.geo_dim();
    for (const auto& f : fields) {
        const Index n = f.location == FieldLocation::point ? nn : nc;
        FEALCORE_THROW_IF(f.components < 1 || f.components > 3, InvalidArgument, "write_vtk: field '", f.name,
                          "' has ", f.components, " components");
        FEALCORE_THROW_IF(f.values.size() != n * f.components, InvalidArgument, "write_vtk: field '", f.name,
                          "' has ", f.values.size(), " values, expected ", n * f.components);
    }
    os << std::setprecision(17);
    os << "# vtk DataFile Version 3.0\nfealcore\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << nn << " double\n";
    for (Index i = 0; i < nn; ++i) {
        for (int d = 0; d < 3; ++d) os << (d ? " " : "") << (d < gd ? mesh.node()(i, d) : 0.0);
        os << '\n';
    }
    const Index nvc = mesh.cell().shape(1);
    os << "CELLS " << nc << ' ' << nc * (nvc + 1) << '\n';
    for (Index c = 0; c < nc; ++c) {
        os << nvc;
        for (Index v : mesh.cell().row(c)) os << ' ' << v;
        os << '\n';
    }
    os << "CELL_TYPES " << nc << '\n';
    const int code = vtk_cell_type(mesh.kind());
    for (Index c = 0; c < nc; ++c) os << code << '\n';

    for (FieldLocation loc : {FieldLocation::point, FieldLocation::cell}) {
        bool header = false;
        for (const auto& f : fields) {
            if (f.location != loc) continue;
            const Index n = loc == FieldLocation::point ? nn : nc;
            if (!header) {
                os << (loc == FieldLocation::point ? "POINT_DATA " : "CELL_DATA ") << n << '\n';
                header = true;
            }
            if (f.components == 1) {
                os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
                for (Index i = 0; i < n; ++i) os << f.values[i] << '\n';
            } else {
                os << "VECTORS " << f.name << " double\n";
                for (Index i = 0; i < n; ++i) {
                    for (Index a = 0; a < 3; ++a)
                        os << (a ? " " : "") << (a < f.components ? f.values[i * f.components + a] : 0.0);
                    os << '\n';
                }
            }
        }
    }
}

inline void write_vtk(const std::string& path, const MeshTopology& mesh, const std::vector<VtkField>& fields = {})
{
    std::ofstream os(path);
    FEALCORE_THROW_IF(!os, InvalidArgument, "write_vtk: cannot open ", path);
    write_vtk(os, mesh, fields);
}

struct VtkData {
    CellKind kind = CellKind::triangle;
    FloatTensor node; ///< [NN, 3]
    IndexTensor cell; ///< [NC, NVC]
    std::vector<VtkField> fields;
};

/// Reader for the subset of legacy VTK written by write_vtk.
inline VtkData read_vtk(std::istream& is)
{
    VtkData out;
    std::string tok;
    Index nn = -1, nc = -1;
    std::vector<Index> conn;
    FieldLocation loc = FieldLocation::point;
    while (is >> tok) {
        if (tok == "POINTS") {
            std::string type;
            is >> nn >> type;
            out.node = FloatTensor({nn, 3});
            for (Index i = 0; i < nn * 3; ++i) is >> out.node[i];
        } else if (tok == "CELLS") {
            Index total = 0;
            is >> nc >> total;
            conn.resize(static_cast<std::size_t>(total));
            for (auto& v : conn) is >> v;
        } else if (tok == "CELL_TYPES") {
            Index n = 0;
            is >> n;
            std::vector<int> types(static_cast<std::size_t>(n));
            for (auto& t : types) is >> t;
            FEALCORE_THROW_IF(n != nc || n == 0, InvalidArgument, "read_vtk: CELL_TYPES count mismatch");
            for (int t : types)
                FEALCORE_THROW_IF(t != types[0], InvalidArgument, "read_vtk: mixed cell types are not supported");
            out.kind = cell_kind_from_vtk(types[0]);
            const Index nvc = conn.empty() ? 0 : conn[0];
            out.cell = IndexTensor({nc, nvc});
            std::size_t k = 0;
            for (Index c = 0; c < nc; ++c) {
                FEALCORE_THROW_IF(conn[k] != nvc, InvalidArgument, "read_vtk: cell ", c, " has ", conn[k], " vertices");
                ++k;
                for (Index v = 0; v < nvc; ++v) out.cell(c, v) = conn[k++];
            }
        } else if (tok == "POINT_DATA" || tok == "CELL_DATA") {
            Index n = 0;
            is >> n;
            loc = tok == "POINT_DATA" ? FieldLocation::point : FieldLocation::cell;
        } else if (tok == "SCALARS" || tok == "VECTORS") {
            VtkField f;
            std::string type;
            is >> f.name >> type;
            f.location = loc;
            f.components = tok == "VECTORS" ? 3 : 1;
            if (tok == "SCALARS") {
                std::string rest;
                std::getline(is, rest);
                std::istringstream rs(rest);
                Index nco = 1;
                if (rs >> nco) f.components = nco;
                std::string lt, name;
                is >> lt >> name;
            }
            const Index n = loc == FieldLocation::point ? nn : nc;
            f.values = FloatTensor({n * f.components});
            for (Index i = 0; i < f.values.size(); ++i) is >> f.values[i];
            out.fields.push_back(std::move(f));
        }
    }
    FEALCORE_THROW_IF(nn < 0 || nc < 0 || !is.eof(), InvalidArgument, "read_vtk: malformed input");
    return out;
}

inline VtkData read_vtk(const std::string& path)
{
    std::ifstream is(path);
    FEALCORE_THROW_IF(!is, InvalidArgument, "read_vtk: cannot open ", path);
    return read_vtk(is);
}

/// MatrixMarket coordinate export: real, general, 1-based indices.
inline void write_matrix_market(std::ostream& os, const COOMatrix& a)
{
    FEALCORE_THROW_IF(a.is_batched(), InvalidArgument, "write_matrix_market: batched matrices are not supported");
    const COOMatrix c = coalesce(a);
    const FloatTensor& v = c.values();
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << c.nrows() << ' ' << c.ncols() << ' ' << c.nnz() << '\n';
    os << std::setprecision(17);
    for (Index k = 0; k < c.nnz(); ++k)
        os << c.indices()(0, k) + 1 << ' ' << c.indices()(1, k) + 1 << ' ' << v[k] << '\n';
}

inline void write_matrix_market(const std::string& path, const COOMatrix& a)
{
    std::ofstream os(path);
    FEALCORE_THROW_IF(!os, InvalidArgument, "write_matrix_market: cannot open ", path);
    write_matrix_market(os, a);
}

} // namespace fealcore
