#include "hypsym/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <bit>

namespace hypsym {

Grid Grid::periodic(Index size, double period) {
  Grid g{size, period, period};
  validate(g);
  return g;
}

Grid Grid::reflected(Index size, double interval) {
  Grid g{size, 2.0 * interval, interval};
  validate(g);
  return g;
}

Index Grid::window_last() const {
  if (is_periodic_window()) return size - 1;
  return static_cast<Index>(std::llround(window / spacing()));
}

void validate(const Grid& grid) {
  if (grid.size < 8 || !std::has_single_bit(static_cast<unsigned long long>(grid.size)))
    throw DomainError("grid size must be a power of two >= 8");
  if (!(grid.period > 0.0) || !std::isfinite(grid.period))
    throw DomainError("grid period must be positive and finite");
  if (!(grid.window > 0.0) || grid.window > grid.period)
    throw DomainError("grid window must lie in (0, period]");
  if (!grid.is_periodic_window()) {
    const double steps = grid.window / grid.spacing();
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
      throw DomainError("grid window must be a whole number of samples");
  }
}

WindowRange window_range(const Grid& grid) {
  if (grid.is_periodic_window()) return {0, grid.size - 1, true};
  return {0, grid.window_last(), false};
}

namespace detail {

namespace {
Eigen::FFT<double>& engine() {
  // kissfft caches twiddles per size; one engine per thread keeps that safe.
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}
}  // namespace

VectorXc forward_fft(const VectorXc& values) {
  VectorXc out(values.size());
  engine().fwd(out, values);
  return out;
}

VectorXc inverse_fft(const VectorXc& spectrum) {
  VectorXc out(spectrum.size());
  engine().inv(out, spectrum);
  return out;
}

}  // namespace detail

ComplexFunction inverse_transform(const Grid& grid, const VectorXc& spectrum) {
  if (spectrum.size() != grid.size) throw DomainError("spectrum length does not match the grid");
  return ComplexFunction(grid, detail::inverse_fft(spectrum));
}

RealFunction real_part(const ComplexFunction& f) {
  return RealFunction(f.grid(), f.values().real());
}

RealFunction imag_part(const ComplexFunction& f) {
  return RealFunction(f.grid(), f.values().imag());
}

ComplexFunction to_complex(const RealFunction& f) {
  return ComplexFunction(f.grid(), f.values().cast<Complex>());
}

}  // namespace hypsym
