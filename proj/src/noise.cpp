#include "contmeas/noise.hpp"

#include <cmath>

#include "contmeas/core.hpp"

namespace contmeas {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> NoiseSource::philox(std::array<std::uint32_t, 2> key,
                                                 std::array<std::uint32_t, 4> ctr) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

NoiseSource::NoiseSource(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

void NoiseSource::refill() {
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  block_ = philox(key, ctr);
  ++counter_;
  used_ = 0;
}

double NoiseSource::uniform() {
  if (used_ >= 4) refill();
  // 32 random bits mapped to the open interval (0, 1).
  return (static_cast<double>(block_[used_++]) + 0.5) * (1.0 / 4294967296.0);
}

double NoiseSource::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * kPi * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

void NoiseSource::fill_normal(double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = normal();
}

std::vector<double> wiener_increments(NoiseSource& src, std::size_t n, double dt) {
  if (!(dt > 0.0)) throw DomainError("wiener_increments needs dt > 0");
  std::vector<double> dw(n);
  src.fill_normal(dw.data(), n);
  const double s = std::sqrt(dt);
  for (double& x : dw) x *= s;
  return dw;
}

}  // namespace contmeas
