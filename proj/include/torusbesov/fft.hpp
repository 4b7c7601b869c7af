#pragma once

// Thin RAII layer over FFTW: aligned storage that can hold either N real
// samples or the N/2+1 half-spectrum, and a process-wide cache of in-place
// real<->complex plans.

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <span>
#include <string>
#include <utility>

namespace torusbesov {

namespace detail {

struct FftwDeleter {
  void operator()(double* p) const noexcept { fftw_free(p); }
};

} // namespace detail

/// Aligned buffer of 2*(N/2+1) doubles, large enough for an in-place
/// r2c/c2r transform of length N.
class AlignedBuffer {
public:
  AlignedBuffer() = default;

  explicit AlignedBuffer(std::size_t n_points)
      : n_points_(n_points), data_(allocate(padded_size(n_points))) {
    std::fill_n(data_.get(), padded_size(n_points), 0.0);
  }

  AlignedBuffer(const AlignedBuffer& other)
      : n_points_(other.n_points_),
        data_(other.data_ ? allocate(padded_size(other.n_points_)) : nullptr) {
    if (data_)
      std::copy_n(other.data_.get(), padded_size(n_points_), data_.get());
  }

  AlignedBuffer& operator=(const AlignedBuffer& other) {
    if (this != &other) {
      AlignedBuffer tmp(other);
      *this = std::move(tmp);
    }
    return *this;
  }

  AlignedBuffer(AlignedBuffer&&) noexcept = default;
  AlignedBuffer& operator=(AlignedBuffer&&) noexcept = default;

  std::size_t points() const noexcept { return n_points_; }
  std::size_t modes() const noexcept { return n_points_ / 2 + 1; }

  std::span<double> real() noexcept { return {data_.get(), n_points_}; }
  std::span<const double> real() const noexcept { return {data_.get(), n_points_}; }

  std::span<std::complex<double>> complex() noexcept {
    return {reinterpret_cast<std::complex<double>*>(data_.get()), modes()};
  }
  std::span<const std::complex<double>> complex() const noexcept {
    return {reinterpret_cast<const std::complex<double>*>(data_.get()), modes()};
  }

  double* raw() noexcept { return data_.get(); }

  static std::size_t padded_size(std::size_t n) { return 2 * (n / 2 + 1); }

private:
  static std::unique_ptr<double[], detail::FftwDeleter> allocate(std::size_t count) {
    auto* p = fftw_alloc_real(count);
    if (p == nullptr)
      throw std::bad_alloc();
    return std::unique_ptr<double[], detail::FftwDeleter>(p);
  }

  std::size_t n_points_ = 0;
  std::unique_ptr<double[], detail::FftwDeleter> data_;
};

namespace fft {

namespace detail {

// Sizes up to this exponent are planned with FFTW_MEASURE (and the result is
// persisted as wisdom so repeated runs pick the identical algorithm); larger
// sizes use FFTW_ESTIMATE, which is deterministic without wisdom.
inline constexpr std::size_t kMeasureLimit = std::size_t{1} << 20;
inline constexpr std::size_t kMeasureFloor = std::size_t{1} << 12;

inline std::filesystem::path wisdom_path() {
  if (const char* env = std::getenv("TORUSBESOV_WISDOM"))
    return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"))
    return std::filesystem::path(xdg) / "torusbesov" / "fftw-wisdom";
  if (const char* home = std::getenv("HOME"))
    return std::filesystem::path(home) / ".cache" / "torusbesov" / "fftw-wisdom";
  return {};
}

class PlanCache {
public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  struct Pair {
    fftw_plan forward;
    fftw_plan backward;
  };

  Pair get(std::size_t n) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(n); it != plans_.end())
      return it->second;

    const bool measure = n >= kMeasureFloor && n <= kMeasureLimit;
    if (measure)
      load_wisdom();

    AlignedBuffer scratch(n);
    const unsigned flags = measure ? FFTW_MEASURE : FFTW_ESTIMATE;
    auto* re = scratch.raw();
    auto* cx = reinterpret_cast<fftw_complex*>(scratch.raw());
    const int len = static_cast<int>(n);
    Pair p{fftw_plan_dft_r2c_1d(len, re, cx, flags),
           fftw_plan_dft_c2r_1d(len, cx, re, flags)};
    plans_.emplace(n, p);

    if (measure)
      save_wisdom();
    return p;
  }

private:
  PlanCache() = default;

  void load_wisdom() {
    if (wisdom_loaded_)
      return;
    wisdom_loaded_ = true;
    const auto path = wisdom_path();
    if (!path.empty() && std::filesystem::exists(path))
      fftw_import_wisdom_from_filename(path.c_str());
  }

  void save_wisdom() {
    const auto path = wisdom_path();
    if (path.empty())
      return;
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec)
      return;
    // Write-then-rename so concurrent processes never read a torn file.
    auto tmp = path;
    tmp += ".tmp." + std::to_string(reinterpret_cast<std::uintptr_t>(this)) +
           std::to_string(plans_.size());
    if (fftw_export_wisdom_to_filename(tmp.c_str()) != 0)
      std::filesystem::rename(tmp, path, ec);
    if (ec)
      std::filesystem::remove(tmp, ec);
  }

  std::mutex mutex_;
  std::map<std::size_t, Pair> plans_;
  bool wisdom_loaded_ = false;
};

} // namespace detail

/// Unnormalized in-place forward transform: X_k = sum_m x_m e^{-2 pi i m k / N}.
inline void forward_in_place(AlignedBuffer& buf) {
  auto plan = detail::PlanCache::instance().get(buf.points());
  fftw_execute_dft_r2c(plan.forward, buf.raw(),
                       reinterpret_cast<fftw_complex*>(buf.raw()));
}

/// Unnormalized in-place backward transform: x_m = sum_k X_k e^{+2 pi i m k / N}
/// over the Hermitian extension of the half spectrum.
inline void backward_in_place(AlignedBuffer& buf) {
  auto plan = detail::PlanCache::instance().get(buf.points());
  fftw_execute_dft_c2r(plan.backward, reinterpret_cast<fftw_complex*>(buf.raw()),
                       buf.raw());
}

} // namespace fft
} // namespace torusbesov
