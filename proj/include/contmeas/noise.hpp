#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace contmeas {

/// Counter-based normal variate source (Philox4x32-10). A source is fully
/// described by (seed, stream, counter): two sources with the same pair emit
/// the same sequence bit for bit, whatever thread or order they run in.
/// A single instance must not be used concurrently.
class NoiseSource {
 public:
  NoiseSource(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  /// Number of Philox blocks consumed so far.
  std::uint64_t counter() const { return counter_; }

  /// Uniform in (0, 1), never exactly 0 or 1.
  double uniform();
  /// Standard normal.
  double normal();
  void fill_normal(double* out, std::size_t n);

  /// Raw Philox4x32-10 block for (key, counter); exposed for tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 2> key,
                                             std::array<std::uint32_t, 4> ctr);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// n Ito increments with mean 0 and variance dt. Throws DomainError if dt <= 0.
std::vector<double> wiener_increments(NoiseSource& src, std::size_t n, double dt);

}  // namespace contmeas
