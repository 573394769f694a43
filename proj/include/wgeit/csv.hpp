#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wgeit/mesh.hpp"
#include "wgeit/wg_space.hpp"

namespace wgeit::csv {

/// Header `c0,c1,...` followed by one row per matrix row.
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
/// Reads a numeric CSV; a first line that does not parse as numbers is
/// treated as a header. Rows must have equal length.
Eigen::MatrixXd read_matrix(std::istream& is);

/// `tri_index,value`
void write_triangle_field(std::ostream& os, const Eigen::VectorXd& values);
/// `tri_index,local_vertex,x,y,value` for the interior part of a weak function.
void write_interior_field(std::ostream& os, const Mesh& mesh, const WgField& field);

} // namespace wgeit::csv
