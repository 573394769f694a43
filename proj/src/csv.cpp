#include "wgeit/csv.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "wgeit/error.hpp"

namespace wgeit::csv {

namespace {

bool parse_row(const std::string& line, std::vector<double>& out)
{
    out.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::istringstream cs(cell);
        double v;
        cs >> v;
        if (!cs || !(cs >> std::ws).eof())
            return false;
        out.push_back(v);
    }
    return !out.empty();
}

} // namespace

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        os << (j ? "," : "") << 'c' << j;
    os << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            os << (j ? "," : "") << m(i, j);
        os << '\n';
    }
}

Eigen::MatrixXd read_matrix(std::istream& is)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::vector<double> row;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (!parse_row(line, row)) {
            if (first) {
                first = false;
                continue;
            }
            throw InvalidArgument("csv: cannot parse row " + std::to_string(rows.size() + 1) + ": '" + line + "'");
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw InvalidArgument("csv: ragged rows");
        rows.push_back(row);
    }
    if (rows.empty())
        throw InvalidArgument("csv: no data rows");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(i, j) = rows[i][j];
    return m;
}

void write_triangle_field(std::ostream& os, const Eigen::VectorXd& values)
{
    os << "tri_index,value\n" << std::setprecision(17);
    for (Eigen::Index t = 0; t < values.size(); ++t)
        os << t << ',' << values[t] << '\n';
}

void write_interior_field(std::ostream& os, const Mesh& mesh, const WgField& field)
{
    os << "tri_index,local_vertex,x,y,value\n" << std::setprecision(17);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        for (int k = 0; k < 3; ++k) {
            const Vec2& p = mesh.vertices[mesh.triangles[t][k]];
            os << t << ',' << k << ',' << p.x() << ',' << p.y() << ',' << field.interior[3 * t + k] << '\n';
        }
    }
}

} // namespace wgeit::csv
