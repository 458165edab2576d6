#include "dgpr/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dgpr {

namespace {

constexpr char kMagic[4] = {'D', 'G', 'P', 'R'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double x) {
  std::uint64_t v;
  std::memcpy(&v, &x, 8);
  put_u64(os, v);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("truncated trajectory dump");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated trajectory dump");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  const std::uint64_t v = get_u64(is);
  double x;
  std::memcpy(&x, &v, 8);
  return x;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
  std::ofstream os(path, mode);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

void append_g17(std::string& line, double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  line += buf;
}

}  // namespace

void write_trajectory(const std::string& path, const Trajectory& traj) {
  if (traj.times.size() != traj.frames.size())
    throw std::invalid_argument("trajectory has " + std::to_string(traj.times.size()) +
                                " times but " + std::to_string(traj.frames.size()) + " frames");
  const Eigen::Index n = traj.grid.total_cells();
  for (const auto& frame : traj.frames)
    if (frame.size() != n)
      throw std::invalid_argument("trajectory frame size does not match its grid");

  auto os = open_out(path, std::ios::binary);
  os.write(kMagic, 4);
  put_u32(os, kFormatVersion);
  put_u32(os, static_cast<std::uint32_t>(traj.grid.d_x));
  put_u32(os, static_cast<std::uint32_t>(traj.grid.cells[0]));
  put_u32(os, static_cast<std::uint32_t>(traj.grid.cells[1]));
  for (int ax = 0; ax < 2; ++ax) put_f64(os, traj.grid.lo[ax]);
  for (int ax = 0; ax < 2; ++ax) put_f64(os, traj.grid.hi[ax]);
  put_f64(os, traj.grid.safety);
  put_f64(os, traj.epsilon);
  put_f64(os, traj.m);
  put_f64(os, traj.M);
  put_u32(os, static_cast<std::uint32_t>(traj.problem_name.size()));
  os.write(traj.problem_name.data(), static_cast<std::streamsize>(traj.problem_name.size()));
  put_u32(os, static_cast<std::uint32_t>(traj.times.size()));
  for (double t : traj.times) put_f64(os, t);
  put_u64(os, static_cast<std::uint64_t>(traj.steps_taken));
  put_f64(os, traj.dt);
  for (const auto& frame : traj.frames)
    for (Eigen::Index i = 0; i < n; ++i) put_f64(os, frame[i]);
  if (!os) throw std::runtime_error("failed while writing " + path);
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path + " for reading");

  char magic[4];
  if (!is.read(magic, 4)) throw std::runtime_error("truncated trajectory dump");
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(path + " is not a trajectory dump (bad magic)");
  const std::uint32_t version = get_u32(is);
  if (version != kFormatVersion)
    throw std::runtime_error("unsupported trajectory format version " + std::to_string(version));

  Trajectory traj;
  const std::uint32_t d_x = get_u32(is);
  if (d_x != 1 && d_x != 2)
    throw std::runtime_error("trajectory dump has invalid dimension " + std::to_string(d_x));
  traj.grid.d_x = static_cast<int>(d_x);
  for (int ax = 0; ax < 2; ++ax) {
    const std::uint32_t c = get_u32(is);
    if (c < 1 || c > (1u << 24))
      throw std::runtime_error("trajectory dump has invalid cell count " + std::to_string(c));
    traj.grid.cells[ax] = static_cast<int>(c);
  }
  for (int ax = 0; ax < 2; ++ax) traj.grid.lo[ax] = get_f64(is);
  for (int ax = 0; ax < 2; ++ax) traj.grid.hi[ax] = get_f64(is);
  traj.grid.safety = get_f64(is);
  for (int ax = 0; ax < traj.grid.d_x; ++ax)
    if (!(traj.grid.hi[ax] > traj.grid.lo[ax]))
      throw std::runtime_error("trajectory dump has an empty box");
  traj.epsilon = get_f64(is);
  traj.m = get_f64(is);
  traj.M = get_f64(is);

  const std::uint32_t name_len = get_u32(is);
  if (name_len > 4096) throw std::runtime_error("trajectory dump has an oversized problem name");
  traj.problem_name.resize(name_len);
  if (name_len > 0 && !is.read(traj.problem_name.data(), name_len))
    throw std::runtime_error("truncated trajectory dump");

  const std::uint32_t n_times = get_u32(is);
  if (n_times < 1 || n_times > 100000)
    throw std::runtime_error("trajectory dump has invalid frame count " + std::to_string(n_times));
  traj.times.resize(n_times);
  for (auto& t : traj.times) t = get_f64(is);
  traj.steps_taken = static_cast<long>(get_u64(is));
  traj.dt = get_f64(is);

  const Eigen::Index n = traj.grid.total_cells();
  traj.frames.assign(n_times, Eigen::ArrayXd(n));
  for (auto& frame : traj.frames)
    for (Eigen::Index i = 0; i < n; ++i) frame[i] = get_f64(is);
  if (is.peek() != std::char_traits<char>::eof())
    throw std::runtime_error(path + " has trailing bytes after the last frame");
  return traj;
}

void write_field_csv(const std::string& path, const Field& f) {
  auto os = open_out(path, std::ios::out);
  const Grid& g = f.grid;
  std::string line;
  os << (g.d_x == 2 ? "x,y,u\n" : "x,u\n");
  for (int j = 0; j < g.cells[1]; ++j)
    for (int i = 0; i < g.cells[0]; ++i) {
      line.clear();
      append_g17(line, g.coord(0, i));
      if (g.d_x == 2) {
        line += ',';
        append_g17(line, g.coord(1, j));
      }
      line += ',';
      append_g17(line, f(i, j));
      line += '\n';
      os << line;
    }
  if (!os) throw std::runtime_error("failed while writing " + path);
}

void write_spectrum_csv(const std::string& path, const DyadicSpectrum& spectrum) {
  auto os = open_out(path, std::ios::out);
  os << "K,norm,log2_norm,informative\n";
  std::string line;
  for (Eigen::Index K = 0; K < spectrum.norms.size(); ++K) {
    const double norm = spectrum.norms[K];
    line.clear();
    line += std::to_string(K);
    line += ',';
    append_g17(line, norm);
    line += ',';
    append_g17(line, std::log2(norm));
    line += ',';
    line += (K >= 1 && norm > spectrum.floor) ? '1' : '0';
    line += '\n';
    os << line;
  }
  if (!os) throw std::runtime_error("failed while writing " + path);
}

void write_table_csv(const std::string& path, const std::string& header,
                     const std::vector<std::vector<double>>& rows) {
  auto os = open_out(path, std::ios::out);
  os << header << '\n';
  std::string line;
  for (const auto& row : rows) {
    line.clear();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += ',';
      append_g17(line, row[c]);
    }
    line += '\n';
    os << line;
  }
  if (!os) throw std::runtime_error("failed while writing " + path);
}

}  // namespace dgpr
