#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace contmeas::io {

/// Binary grid dump: 32-byte little-endian header
///   char[8] "CMGRID01" | uint64 n_q | float64 dq | float64 q_min
/// followed by rows of n_q float64 values (row-major).
inline constexpr char kGridMagic[9] = "CMGRID01";

struct GridDump {
  std::uint64_t n_q = 0;
  double dq = 0.0;
  double q_min = 0.0;
  Eigen::MatrixXd values;  ///< rows x n_q
};

void write_grid_dump(const std::filesystem::path& path, const Eigen::MatrixXd& values, double dq,
                     double q_min);
GridDump read_grid_dump(const std::filesystem::path& path);

/// Fixed-precision CSV writer; identical inputs give identical bytes.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

 private:
  struct Impl;
  Impl* impl_;
};

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

/// Creates `dir` (and parents) and checks it is writable. Throws contmeas::Error.
void ensure_writable_dir(const std::filesystem::path& dir);

/// 64-bit FNV-1a hash of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace contmeas::io
