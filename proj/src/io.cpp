#include "contmeas/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "contmeas/core.hpp"

namespace contmeas::io {

static_assert(std::endian::native == std::endian::little, "grid dumps assume a little-endian host");

namespace {

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void write_grid_dump(const std::filesystem::path& path, const Eigen::MatrixXd& values, double dq,
                     double q_min) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write(kGridMagic, 8);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(values.cols()));
  put<double>(os, dq);
  put<double>(os, q_min);
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j) put<double>(os, values(i, j));
  if (!os) throw Error("write failed for " + path.string());
}

GridDump read_grid_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kGridMagic, 8) != 0) throw Error(path.string() + ": bad grid magic");
  GridDump d;
  d.n_q = get<std::uint64_t>(is);
  d.dq = get<double>(is);
  d.q_min = get<double>(is);
  if (d.n_q == 0) throw Error(path.string() + ": empty grid");
  const auto bytes = std::filesystem::file_size(path) - 32;
  const auto count = bytes / sizeof(double);
  if (bytes % (sizeof(double) * d.n_q) != 0) throw Error(path.string() + ": truncated grid body");
  const auto rows = static_cast<Eigen::Index>(count / d.n_q);
  d.values.resize(rows, static_cast<Eigen::Index>(d.n_q));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < d.values.cols(); ++j) d.values(i, j) = get<double>(is);
  return d;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream os;
  std::size_t columns;
};

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : impl_(new Impl{std::ofstream(path), columns.size()}) {
  if (!impl_->os) {
    delete impl_;
    throw Error("cannot open " + path.string() + " for writing");
  }
  for (std::size_t i = 0; i < columns.size(); ++i) impl_->os << (i ? "," : "") << columns[i];
  impl_->os << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != impl_->columns) throw Error("CSV row has the wrong number of columns");
  for (std::size_t i = 0; i < values.size(); ++i) impl_->os << (i ? "," : "") << format_double(values[i]);
  impl_->os << '\n';
}

CsvWriter::~CsvWriter() { delete impl_; }

void ensure_writable_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".contmeas_write_probe";
  {
    std::ofstream os(probe);
    if (!os) throw Error("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace contmeas::io
