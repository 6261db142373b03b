#include "iwl/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "iwl/errors.hpp"

namespace iwl::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_field(const std::string& field, const std::filesystem::path& path, std::size_t row,
                   std::size_t col) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw IoError(path.string() + ": cannot parse number at row " + std::to_string(row) +
                  ", column " + std::to_string(col) + " ('" + field + "')");
  return v;
}

// Rows of equal width; first line is the header (returned separately).
std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_table(
    const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv(line);

  std::vector<std::vector<double>> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != header.size())
      throw IoError(path.string() + ": row " + std::to_string(row_no) + " has " +
                    std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(header.size()));
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      values[c] = parse_field(fields[c], path, row_no, c + 1);
    rows.push_back(std::move(values));
  }
  return {header, rows};
}

void check_uniform_times(const std::vector<std::vector<double>>& rows,
                         const std::filesystem::path& path, double dt) {
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (std::abs((rows[r][0] - rows[r - 1][0]) - dt) > 1e-9)
      throw IoError(path.string() + ": non-uniform time step at row " + std::to_string(r + 2));
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          int state_dim) {
  std::ofstream out = open_out(path);
  const int n_agents = static_cast<int>(traj.states.front().size()) / state_dim;
  out << "t";
  for (int a = 1; a <= n_agents; ++a)
    for (int c = 1; c <= state_dim; ++c) out << ",x" << a << "_" << c;
  out << "\n";
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    out << format_double(traj.time(static_cast<int>(s)));
    for (int c = 0; c < traj.states[s].size(); ++c)
      out << "," << format_double(traj.states[s](c));
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

LoadedTrajectory read_trajectory_csv(const std::filesystem::path& path) {
  const auto [header, rows] = read_table(path);
  if (header.empty() || header[0] != "t")
    throw IoError(path.string() + ": expected trajectory header starting with 't'");
  if (rows.empty()) throw IoError(path.string() + ": no states");

  // Per-agent dimension = number of x1_* columns.
  int state_dim = 0;
  for (std::size_t c = 1; c < header.size(); ++c)
    if (header[c].rfind("x1_", 0) == 0) ++state_dim;
  if (state_dim == 0) throw IoError(path.string() + ": no x1_* columns in header");

  LoadedTrajectory loaded;
  loaded.state_dim = state_dim;
  Trajectory& traj = loaded.traj;
  traj.t0 = rows.front()[0];
  traj.tf = rows.back()[0];
  traj.dt = rows.size() > 1 ? rows[1][0] - rows[0][0] : 1.0;
  if (rows.size() > 1 && !(traj.dt > 0))
    throw IoError(path.string() + ": non-increasing time column");
  check_uniform_times(rows, path, traj.dt);
  for (const auto& row : rows) {
    Eigen::VectorXd x(header.size() - 1);
    for (std::size_t c = 1; c < row.size(); ++c) x(c - 1) = row[c];
    traj.states.push_back(std::move(x));
  }
  return loaded;
}

void write_policy_csv(const std::filesystem::path& path, const PolicyGrid& p) {
  std::ofstream out = open_out(path);
  out << "s,u\n";
  for (int q = 0; q < p.grid.num_points; ++q)
    out << format_double(p.grid.node(q)) << "," << format_double(p.values(q)) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

PolicyGrid read_policy_csv(const std::filesystem::path& path) {
  const auto [header, rows] = read_table(path);
  if (header.size() != 2 || header[0] != "s" || header[1] != "u")
    throw IoError(path.string() + ": expected policy header 's,u'");
  if (rows.size() < 2) throw IoError(path.string() + ": need at least two policy nodes");
  PolicyGrid p;
  p.grid = make_sgrid(rows.front()[0], rows.back()[0], static_cast<int>(rows.size()));
  p.values.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (std::abs(rows[r][0] - p.grid.node(static_cast<int>(r))) > 1e-9 * std::max(1.0, p.grid.Delta))
      throw IoError(path.string() + ": non-uniform s grid at row " + std::to_string(r + 2));
    p.values(r) = rows[r][1];
  }
  return p;
}

void write_timeseries_csv(const std::filesystem::path& path, const std::string& prefix,
                          const Eigen::VectorXd& times, const Eigen::MatrixXd& columns) {
  std::ofstream out = open_out(path);
  out << "t";
  for (int k = 1; k <= columns.cols(); ++k) out << "," << prefix << k;
  out << "\n";
  if (columns.cols() == 0) {
    if (!out) throw IoError("write failed: " + path.string());
    return;  // header only
  }
  for (int r = 0; r < times.size(); ++r) {
    out << format_double(times(r));
    for (int k = 0; k < columns.cols(); ++k) out << "," << format_double(columns(r, k));
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

LoadedTimeseries read_timeseries_csv(const std::filesystem::path& path) {
  const auto [header, rows] = read_table(path);
  if (header.empty() || header[0] != "t")
    throw IoError(path.string() + ": expected header starting with 't'");
  LoadedTimeseries ts;
  ts.times.resize(rows.size());
  ts.columns.resize(rows.size(), header.size() - 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ts.times(r) = rows[r][0];
    for (std::size_t c = 1; c < rows[r].size(); ++c) ts.columns(r, c - 1) = rows[r][c];
  }
  return ts;
}

void write_costate_csv(const std::filesystem::path& path, const Trajectory& grid,
                       const std::vector<Eigen::VectorXd>& lambdas, int state_dim) {
  std::ofstream out = open_out(path);
  const int n_agents =
      lambdas.empty() ? 0 : static_cast<int>(lambdas.front().size()) / state_dim;
  out << "t";
  for (int a = 1; a <= n_agents; ++a)
    for (int c = 1; c <= state_dim; ++c) out << ",l" << a << "_" << c;
  out << "\n";
  for (std::size_t s = 0; s < lambdas.size(); ++s) {
    out << format_double(grid.time(static_cast<int>(s)));
    for (int c = 0; c < lambdas[s].size(); ++c) out << "," << format_double(lambdas[s](c));
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_history_csv(const std::filesystem::path& path, const std::vector<double>& cost,
                       const std::vector<double>& grad_norm) {
  std::ofstream out = open_out(path);
  out << "iter,cost,grad_norm\n";
  for (std::size_t i = 0; i < cost.size(); ++i)
    out << i << "," << format_double(cost[i]) << "," << format_double(grad_norm[i]) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace iwl::io
