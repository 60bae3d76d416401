#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace hydrofrac::detail {

// Batched real-to-complex transforms of `rows` contiguous rows of length n.
// Plans are created once per (n, rows) and shared; FFTW's planner is not
// reentrant, so creation is serialized. Execution through the new-array
// interface is thread safe.
class RowFft {
 public:
  RowFft(std::size_t n, std::size_t rows) : n_(n) {
    std::vector<double> re(n * rows);
    std::vector<std::complex<double>> sp((n / 2 + 1) * rows);
    const int len = static_cast<int>(n);
    const int half = static_cast<int>(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_many_dft_r2c(1, &len, static_cast<int>(rows), re.data(), nullptr, 1, len,
                                      reinterpret_cast<fftw_complex*>(sp.data()), nullptr, 1, half,
                                      flags);
    inverse_ = fftw_plan_many_dft_c2r(1, &len, static_cast<int>(rows),
                                      reinterpret_cast<fftw_complex*>(sp.data()), nullptr, 1, half,
                                      re.data(), nullptr, 1, len, flags);
  }
  RowFft(const RowFft&) = delete;
  RowFft& operator=(const RowFft&) = delete;
  ~RowFft() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  // out = DFT(in) / n, so that f(x) = sum_k c_k exp(2 pi i k x).
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const {
    // r2c plans preserve their input.
    fftw_execute_dft_r2c(forward_, const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& c : out) c *= scale;
  }

  // c2r overwrites its input, hence the copy.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const {
    std::vector<std::complex<double>> scratch(in.begin(), in.end());
    fftw_execute_dft_c2r(inverse_, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  }

  static const RowFft& get(std::size_t n, std::size_t rows) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<RowFft>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{n, rows}];
    if (!slot) slot = std::make_unique<RowFft>(n, rows);
    return *slot;
  }

 private:
  std::size_t n_;
  fftw_plan forward_{};
  fftw_plan inverse_{};
};

}  // namespace hydrofrac::detail
