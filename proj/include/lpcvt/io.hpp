#ifndef LPCVT_IO_HPP
#define LPCVT_IO_HPP

#include <string>

#include "lpcvt/optimizer.hpp"

namespace lpcvt {

/// Loads a domain: volume mode reads a half-space file (one `nx ny nz d`
/// per line, meaning n.x <= d); surface mode reads an OBJ or OFF triangle
/// mesh. Throws ParseError (with line number), UnboundedPolytope or
/// NonTriangleFace.
Domain load_domain(const std::string& path, Domain::Kind mode);

SurfaceMesh load_obj(const std::string& path);
SurfaceMesh load_off(const std::string& path);

/// Tensor field file: one `x y z g11 g12 g13 g22 g23 g33` line per
/// sample (row-major upper triangle). A single line yields a constant
/// field (position ignored).
TensorField load_tensor_field(const std::string& path);

/// Seeds file: `x y z` per line.
SeedSet load_seeds(const std::string& path);

/// Writes seeds with 17 significant digits so a reload reproduces the
/// coordinates exactly.
void write_seeds(const std::string& path, const SeedSet& seeds);

/// Trace CSV: header `iter,F,grad_inf_norm,step_size`, one row per
/// iteration.
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace);

/// Restricted-cell boundary polygons as an OBJ for external viewing.
void write_rvd_obj(const std::string& path, const std::vector<CellPolygons>& cells);

}  // namespace lpcvt

#endif
