#include "mvsdde/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

#include "mvsdde/error.hpp"

namespace mvsdde {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_paths_csv(std::ostream& out, const std::vector<ParticlePath>& paths) {
  if (paths.empty()) return;
  const int d = paths.front().dim();
  out << "particle,t";
  for (int j = 1; j <= d; ++j) out << ",x_" << j;
  out << '\n';
  for (const auto& path : paths) {
    const auto& grid = path.grid();
    for (int k = -grid.steps_per_delay(); k <= grid.steps(); ++k) {
      out << path.particle_index() << ',' << format_double(grid.time(k));
      for (int j = 0; j < d; ++j) out << ',' << format_double(path.at(k)(j));
      out << '\n';
    }
  }
}

void write_measure_csv(std::ostream& out, const EmpiricalMeasure& measure) {
  const int n = measure.n_delays();
  const int d = measure.dim();
  out << "particle";
  for (int lag = n; lag >= 0; --lag)
    for (int j = 1; j <= d; ++j) out << ',' << (lag > 0 ? "xm" + std::to_string(lag) : std::string("x0")) << '_' << j;
  out << '\n';
  for (std::size_t a = 0; a < measure.size(); ++a) {
    out << a;
    for (Eigen::Index r = 0; r < measure.atoms().rows(); ++r)
      out << ',' << format_double(measure.atoms()(r, static_cast<Eigen::Index>(a)));
    out << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace

EmpiricalMeasure read_measure_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("measure csv: empty input");
  const auto header = split(line);
  if (header.size() < 2 || header.front() != "particle")
    throw InvalidArgument("measure csv: header must start with 'particle'");
  static const std::regex column(R"(x(m(\d+)|0)_(\d+))");
  int n = -1, d = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    std::smatch m;
    if (!std::regex_match(header[c], m, column))
      throw InvalidArgument("measure csv: unexpected column '" + header[c] + "'");
    const int lag = m[2].matched ? std::stoi(m[2].str()) : 0;
    if (n < 0) n = lag;
    d = std::max(d, std::stoi(m[3].str()));
  }
  const std::size_t width = header.size() - 1;
  if (static_cast<std::size_t>((n + 1) * d) != width) throw InvalidArgument("measure csv: inconsistent columns");

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw InvalidArgument("measure csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(header.size()));
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& s = cells[c + 1];
      const auto res = std::from_chars(s.data(), s.data() + s.size(), row[c]);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw InvalidArgument("measure csv: line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("measure csv: no atoms");
  Eigen::MatrixXd atoms(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t c = 0; c < width; ++c)
      atoms(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a)) = rows[a][c];
  return EmpiricalMeasure(n, d, std::move(atoms));
}

EmpiricalMeasure read_measure_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open measure file '" + path + "'");
  return read_measure_csv(in);
}

}  // namespace mvsdde
