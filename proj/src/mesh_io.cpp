#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sc_obstacle/error.hpp"
#include "sc_obstacle/io.hpp"
#include "sc_obstacle/surface.hpp"

namespace sc_obstacle {

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    if (first == std::string::npos) return false;
    const char* b = cell.data() + first;
    const char* e = cell.data() + last + 1;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) return false;
    out.push_back(v);
  }
  return !out.empty();
}

}  // namespace

std::vector<std::vector<double>> read_csv_columns(const std::string& path, std::size_t min_cols) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  std::vector<std::vector<double>> cols;
  std::vector<double> row;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!parse_row(line, row)) {
      if (line_no == 1) continue;
      throw Error(ErrorCode::InvalidInput, path + ":" + std::to_string(line_no) + ": not numeric");
    }
    if (cols.empty()) cols.resize(row.size());
    if (row.size() != cols.size()) {
      throw Error(ErrorCode::InvalidInput, path + ":" + std::to_string(line_no) + ": ragged row");
    }
    for (std::size_t c = 0; c < row.size(); ++c) cols[c].push_back(row[c]);
  }
  if (cols.size() < min_cols) {
    throw Error(ErrorCode::InvalidInput,
                path + ": expected at least " + std::to_string(min_cols) + " columns");
  }
  return cols;
}

void write_csv_columns(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw Error(ErrorCode::DimensionMismatch, "header/column count");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw Error(ErrorCode::DimensionMismatch, "columns differ in length");
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n' << std::setprecision(17);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c][r];
    out << '\n';
  }
}

TriMesh read_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  // Strip comments, then read whitespace-separated tokens.
  std::stringstream body;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    body << line << '\n';
  }
  std::string magic;
  body >> magic;
  if (magic != "OFF") throw Error(ErrorCode::InvalidMesh, path + ": missing OFF header");
  long nv = 0;
  long nf = 0;
  long ne = 0;
  if (!(body >> nv >> nf >> ne) || nv < 4 || nf < 4) {
    throw Error(ErrorCode::InvalidMesh, path + ": bad counts");
  }
  std::vector<Vec3> verts(static_cast<std::size_t>(nv));
  for (auto& v : verts) {
    if (!(body >> v[0] >> v[1] >> v[2])) throw Error(ErrorCode::InvalidMesh, path + ": truncated vertices");
  }
  std::vector<std::array<int, 3>> faces(static_cast<std::size_t>(nf));
  for (auto& f : faces) {
    int k = 0;
    if (!(body >> k) || k != 3) throw Error(ErrorCode::InvalidMesh, path + ": only triangles supported");
    if (!(body >> f[0] >> f[1] >> f[2])) throw Error(ErrorCode::InvalidMesh, path + ": truncated faces");
  }
  return build_mesh(std::move(verts), std::move(faces));
}

void write_off(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.faces().size() << ' ' << mesh.edge_count() << '\n';
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const auto& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

}  // namespace sc_obstacle
