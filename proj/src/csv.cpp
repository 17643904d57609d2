#include "pma/csv.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace pma {

namespace fs = std::filesystem;

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  const bool ref = traj.has_reference();
  std::string out;
  out.reserve(static_cast<size_t>(traj.rows()) * 120);
  out += ref ? "t,p_cmd,p_eff,x,v,z,x_d,v_d,e\n" : "t,p_cmd,p_eff,x,v,z\n";
  for (Eigen::Index k = 0; k < traj.rows(); ++k) {
    out += format_full(traj.t[k]);
    out += ',';
    out += format_full(traj.p_cmd[k]);
    out += ',';
    out += format_full(traj.p_eff[k]);
    out += ',';
    out += format_full(traj.x[k]);
    out += ',';
    out += format_full(traj.v[k]);
    out += ',';
    out += format_full(traj.z[k]);
    if (ref) {
      out += ',';
      out += format_full(traj.x_d[k]);
      out += ',';
      out += format_full(traj.v_d[k]);
      out += ',';
      out += format_full(traj.e[k]);
    }
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const Trajectory& traj, const fs::path& path) {
  write_file_atomic(path, trajectory_csv(traj));
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const fs::path& path, size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) +
                             ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

Trajectory read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error(path.string() + ": empty file");
  }
  if (!header.empty() && header.back() == '\r') {
    header.pop_back();
  }
  const std::vector<std::string> cols = split(header, ',');
  auto col_index = [&](const std::string& name) -> int {
    for (size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == name) {
        return static_cast<int>(i);
      }
    }
    return -1;
  };
  const int it = col_index("t");
  const int ip_cmd = col_index("p_cmd");
  const int ip_eff = col_index("p_eff");
  const int ix = col_index("x");
  const int iv = col_index("v");
  const int iz = col_index("z");
  const int ix_d = col_index("x_d");
  const int iv_d = col_index("v_d");
  const int ie = col_index("e");
  if (it < 0 || ip_cmd < 0 || ix < 0) {
    throw std::runtime_error(path.string() + ": missing t, p_cmd or x column");
  }
  const bool ref = ix_d >= 0;

  std::vector<std::array<double, 9>> rows;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != cols.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(cols.size()) +
                               " fields, got " + std::to_string(fields.size()));
    }
    std::array<double, 9> row{};
    auto grab = [&](int idx) {
      return idx >= 0 ? parse_double(fields[static_cast<size_t>(idx)], path,
                                     line_no)
                      : 0.0;
    };
    row[0] = grab(it);
    row[1] = grab(ip_cmd);
    row[2] = grab(ip_eff);
    row[3] = grab(ix);
    row[4] = grab(iv);
    row[5] = grab(iz);
    row[6] = grab(ix_d);
    row[7] = grab(iv_d);
    row[8] = grab(ie);
    rows.push_back(row);
  }
  if (rows.size() < 2) {
    throw std::runtime_error(path.string() + ": need at least two data rows");
  }

  Trajectory traj;
  traj.resize(static_cast<Eigen::Index>(rows.size()), ref);
  for (size_t k = 0; k < rows.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    traj.t[i] = rows[k][0];
    traj.p_cmd[i] = rows[k][1];
    traj.p_eff[i] = rows[k][2];
    traj.x[i] = rows[k][3];
    traj.v[i] = rows[k][4];
    traj.z[i] = rows[k][5];
    if (ref) {
      traj.x_d[i] = rows[k][6];
      traj.v_d[i] = rows[k][7];
      traj.e[i] = rows[k][8];
    }
  }
  return traj;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path dir = path.parent_path();
  if (dir.empty()) {
    dir = ".";
  }
  fs::create_directories(dir);
  const fs::path tmp = dir / (".tmp." + path.filename().string());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    out << content;
    if (!out.flush()) {
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

}  // namespace pma
