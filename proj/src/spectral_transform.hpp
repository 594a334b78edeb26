#pragma once

#include <fftw3.h>

#include <cstddef>
#include <vector>

#include "ifrk/grid.hpp"

namespace ifrk {

/// Real-to-complex FFT pair over a periodic grid with aligned scratch buffers.
/// Forward is unnormalised; the caller folds 1/m into its spectral factors.
/// Plans are created with FFTW_ESTIMATE so that the arithmetic is identical
/// from run to run.
class SpectralTransform {
 public:
  explicit SpectralTransform(const GridSpec& grid);
  ~SpectralTransform();
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  const GridSpec& grid() const { return grid_; }
  std::size_t real_size() const { return real_size_; }
  std::size_t spectrum_size() const { return spectrum_size_; }

  double* real() { return real_; }
  fftw_complex* spectrum() { return spectrum_; }

  void forward() { fftw_execute(forward_); }
  /// Destroys the contents of spectrum().
  void inverse() { fftw_execute(inverse_); }

  /// Shape of the stored half spectrum: points on every axis but the last,
  /// points/2 + 1 on the last.
  std::vector<std::size_t> spectrum_shape() const;

 private:
  GridSpec grid_;
  std::size_t real_size_;
  std::size_t spectrum_size_;
  double* real_ = nullptr;
  fftw_complex* spectrum_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace ifrk
