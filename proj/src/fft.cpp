#include "contmeas/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

namespace contmeas::fft {

namespace {

// (n, howmany, stride, dist, sign)
using PlanKey = std::tuple<int, int, int, int, int>;

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

  fftw_plan get(const PlanKey& key) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const auto [n, howmany, stride, dist, sign] = key;
    // Planning with ESTIMATE never touches the buffer contents.
    const std::size_t extent = static_cast<std::size_t>(n - 1) * stride +
                               static_cast<std::size_t>(howmany - 1) * dist + 1;
    auto* buf = fftw_alloc_complex(extent);
    int dims[] = {n};
    fftw_plan p = fftw_plan_many_dft(1, dims, howmany, buf, nullptr, stride, dist, buf, nullptr,
                                     stride, dist, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(std::complex<double>* data, int n, int howmany, int stride, int dist, Direction dir) {
  const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan p = cache().get({n, howmany, stride, dist, sign});
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

}  // namespace

void transform(Eigen::VectorXcd& x, Direction dir) {
  const int n = static_cast<int>(x.size());
  run(x.data(), n, 1, 1, n, dir);
  if (dir == Direction::Inverse) x /= static_cast<double>(n);
}

void transform_cols(Eigen::MatrixXcd& a, Direction dir) {
  const int rows = static_cast<int>(a.rows());
  run(a.data(), rows, static_cast<int>(a.cols()), 1, rows, dir);
  if (dir == Direction::Inverse) a /= static_cast<double>(rows);
}

void transform_rows(Eigen::MatrixXcd& a, Direction dir) {
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  run(a.data(), cols, rows, rows, 1, dir);
  if (dir == Direction::Inverse) a /= static_cast<double>(cols);
}

}  // namespace contmeas::fft
