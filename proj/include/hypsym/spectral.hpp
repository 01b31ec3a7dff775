#pragma once

// Uniform periodic grids, sampled functions of time and their Fourier
// multipliers. Everything else in the library is built on these types.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <type_traits>
#include <utility>

#include "hypsym/errors.hpp"

namespace hypsym {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
template <typename T>
inline constexpr bool is_complex_v = is_complex<T>::value;

/// Uniform grid of `size` samples over one period [0, period). Norms are
/// evaluated on the physical window [0, window] with window <= period; a
/// window shorter than the period comes from an even reflection.
struct Grid {
  Index size = 0;
  double period = kTwoPi;
  double window = kTwoPi;

  static Grid periodic(Index size, double period = kTwoPi);
  /// Grid for a function given on [0, interval] and extended by even
  /// reflection to a function of period 2*interval.
  static Grid reflected(Index size, double interval);

  double spacing() const { return period / static_cast<double>(size); }
  double time(Index i) const { return spacing() * static_cast<double>(i); }
  bool is_periodic_window() const { return window == period; }
  /// Index of the last sample inside the window (size - 1 for a periodic
  /// window, where the endpoint coincides with sample 0).
  Index window_last() const;

  /// Integer wavenumber of FFT slot n, in (-size/2, size/2].
  Index wavenumber(Index n) const { return n <= size / 2 ? n : n - size; }
  /// Angular frequency of FFT slot n.
  double frequency(Index n) const {
    return kTwoPi * static_cast<double>(wavenumber(n)) / period;
  }
  double nyquist_frequency() const {
    return std::numbers::pi * static_cast<double>(size) / period;
  }

  bool operator==(const Grid&) const = default;
};

/// Throws DomainError unless size is a power of two >= 8 and the window is
/// a positive sample-aligned length not exceeding the period.
void validate(const Grid& grid);

/// A scalar function of time on a Grid, optionally carrying its spectrum.
template <typename Scalar>
class SampledFunction {
 public:
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SampledFunction() = default;
  SampledFunction(Grid grid, Values values) : grid_(grid), values_(std::move(values)) {
    validate(grid_);
    if (values_.size() != grid_.size) throw DomainError("sample count does not match the grid");
  }

  /// Samples fn(t) at every grid point of the full period.
  template <typename Fn>
  static SampledFunction sample(const Grid& grid, Fn&& fn) {
    Values v(grid.size);
    for (Index i = 0; i < grid.size; ++i) v[i] = static_cast<Scalar>(fn(grid.time(i)));
    return SampledFunction(grid, std::move(v));
  }

  /// Samples fn on [0, window] and mirrors it about t = window.
  template <typename Fn>
  static SampledFunction sample_reflected(const Grid& grid, Fn&& fn) {
    Values v(grid.size);
    for (Index i = 0; i < grid.size; ++i) {
      const double t = grid.time(i);
      v[i] = static_cast<Scalar>(t <= grid.window ? fn(t) : fn(grid.period - t));
    }
    return SampledFunction(grid, std::move(v));
  }

  static SampledFunction constant(const Grid& grid, Scalar c) {
    return SampledFunction(grid, Values::Constant(grid.size, c));
  }

  const Grid& grid() const { return grid_; }
  Index size() const { return values_.size(); }
  const Values& values() const { return values_; }
  Scalar operator()(Index i) const { return values_[i]; }

  /// Mutable access drops any cached spectrum.
  Values& mutable_values() {
    spectrum_.reset();
    return values_;
  }

  /// Copy carrying the spectrum, so repeated transforms are free.
  SampledFunction with_spectrum() const;
  const std::shared_ptr<const VectorXc>& cached_spectrum() const { return spectrum_; }

  SampledFunction& operator+=(const SampledFunction& o) {
    check_same_grid(o);
    mutable_values() += o.values_;
    return *this;
  }
  SampledFunction& operator-=(const SampledFunction& o) {
    check_same_grid(o);
    mutable_values() -= o.values_;
    return *this;
  }
  SampledFunction& operator*=(Scalar c) {
    mutable_values() *= c;
    return *this;
  }
  friend SampledFunction operator+(SampledFunction a, const SampledFunction& b) { return a += b; }
  friend SampledFunction operator-(SampledFunction a, const SampledFunction& b) { return a -= b; }
  friend SampledFunction operator*(SampledFunction a, Scalar c) { return a *= c; }
  friend SampledFunction operator*(Scalar c, SampledFunction a) { return a *= c; }
  friend SampledFunction operator-(SampledFunction a) { return a *= Scalar(-1); }
  /// Pointwise product.
  friend SampledFunction operator*(const SampledFunction& a, const SampledFunction& b) {
    a.check_same_grid(b);
    return SampledFunction(a.grid_, a.values_.cwiseProduct(b.values_));
  }

  void check_same_grid(const SampledFunction& o) const {
    if (!(grid_ == o.grid_)) throw DomainError("functions live on different grids");
  }

 private:
  Grid grid_;
  Values values_;
  std::shared_ptr<const VectorXc> spectrum_;
};

using RealFunction = SampledFunction<double>;
using ComplexFunction = SampledFunction<Complex>;

namespace detail {
VectorXc forward_fft(const VectorXc& values);
VectorXc inverse_fft(const VectorXc& spectrum);
}  // namespace detail

/// Fourier coefficients in FFT slot order, normalised by 1/N so that
/// cos(k t) has coefficient 1/2 at +-k. Slot n carries wavenumber
/// grid.wavenumber(n).
template <typename Scalar>
VectorXc transform(const SampledFunction<Scalar>& f) {
  if (f.cached_spectrum()) return *f.cached_spectrum();
  VectorXc spec = detail::forward_fft(f.values().template cast<Complex>());
  spec /= static_cast<double>(f.size());
  return spec;
}

template <typename Scalar>
SampledFunction<Scalar> SampledFunction<Scalar>::with_spectrum() const {
  SampledFunction out = *this;
  out.spectrum_ = std::make_shared<const VectorXc>(transform(*this));
  return out;
}

ComplexFunction inverse_transform(const Grid& grid, const VectorXc& spectrum);

RealFunction real_part(const ComplexFunction& f);
RealFunction imag_part(const ComplexFunction& f);
ComplexFunction to_complex(const RealFunction& f);
inline const ComplexFunction& to_complex(const ComplexFunction& f) { return f; }

/// Multiplies the spectrum of f by symbol(angular frequency). A non-finite
/// symbol value at a frequency where f has energy is a DomainError.
template <typename Scalar, typename Symbol>
ComplexFunction apply_multiplier(const SampledFunction<Scalar>& f, Symbol&& symbol) {
  VectorXc spec = transform(f);
  const Grid& g = f.grid();
  for (Index n = 0; n < g.size; ++n) {
    if (spec[n] == Complex(0.0)) continue;
    const Complex m = static_cast<Complex>(symbol(g.frequency(n)));
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
      throw DomainError("multiplier symbol is not finite at an occupied frequency");
    spec[n] *= m;
  }
  return inverse_transform(g, spec);
}

/// apply_multiplier for symbols that keep real functions real (even, real
/// symbols such as dyadic cut-offs). Returns the input scalar type.
template <typename Scalar, typename Symbol>
SampledFunction<Scalar> filter(const SampledFunction<Scalar>& f, Symbol&& symbol) {
  ComplexFunction out = apply_multiplier(f, std::forward<Symbol>(symbol));
  if constexpr (is_complex_v<Scalar>) {
    return out;
  } else {
    return real_part(out);
  }
}

/// Spectral derivative of the given order. The Nyquist slot of odd orders
/// is zeroed so real input stays real.
template <typename Scalar>
SampledFunction<Scalar> derivative(const SampledFunction<Scalar>& f, int order = 1) {
  const Grid& g = f.grid();
  const double nyquist = g.nyquist_frequency();
  return filter(f, [order, nyquist](double xi) -> Complex {
    if (order % 2 == 1 && xi == nyquist) return 0.0;
    return std::pow(Complex(0.0, xi), order);
  });
}

/// Index range of the window [0, window] and whether the trapezoid wraps.
struct WindowRange {
  Index first = 0;
  Index last = 0;
  bool periodic = true;
};
WindowRange window_range(const Grid& grid);

/// L^p norm over [0, window] by the trapezoid rule (periodic rectangle rule
/// on a full-period window); p = infinity is the discrete max.
template <typename Derived>
double lp_norm(const Eigen::MatrixBase<Derived>& values, const Grid& grid, double p,
               Index first, Index last, bool periodic) {
  const double h = grid.spacing();
  if (std::isinf(p)) {
    double m = 0.0;
    for (Index i = first; i <= last; ++i) m = std::max(m, std::abs(values[i % grid.size]));
    return m;
  }
  double acc = 0.0;
  for (Index i = first; i <= last; ++i) {
    const double w = (!periodic && (i == first || i == last)) ? 0.5 : 1.0;
    acc += w * std::pow(std::abs(values[i % grid.size]), p);
  }
  return std::pow(acc * h, 1.0 / p);
}

template <typename Scalar>
double lp_norm(const SampledFunction<Scalar>& f, double p) {
  const WindowRange w = window_range(f.grid());
  return lp_norm(f.values(), f.grid(), p, w.first, w.last, w.periodic);
}

template <typename Scalar>
double sup_norm(const SampledFunction<Scalar>& f) {
  return lp_norm(f, kInfinity);
}

/// Sampled m x m matrix of functions of time. Storage is one column of the
/// N x m^2 array per entry, so both entrywise (spectral) and per-sample
/// (matrix algebra) access are views.
template <typename Scalar>
class MatrixFunction {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Storage = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using SampleStride = Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>;
  using SampleView = Eigen::Map<Matrix, 0, SampleStride>;
  using ConstSampleView = Eigen::Map<const Matrix, 0, SampleStride>;

  MatrixFunction() = default;
  MatrixFunction(const Grid& grid, Index dim) : grid_(grid), dim_(dim) {
    validate(grid_);
    data_ = Storage::Zero(grid_.size, dim_ * dim_);
  }

  /// Builds from fn(i) returning the m x m matrix at sample i.
  template <typename Fn>
  static MatrixFunction generate(const Grid& grid, Index dim, Fn&& fn) {
    MatrixFunction out(grid, dim);
    for (Index i = 0; i < grid.size; ++i) out.at(i) = fn(i);
    return out;
  }

  const Grid& grid() const { return grid_; }
  Index dim() const { return dim_; }
  Index samples() const { return grid_.size; }
  const Storage& data() const { return data_; }
  Storage& data() { return data_; }

  SampleView at(Index i) {
    return SampleView(data_.data() + i, dim_, dim_, SampleStride(dim_ * grid_.size, grid_.size));
  }
  ConstSampleView at(Index i) const {
    return ConstSampleView(data_.data() + i, dim_, dim_,
                           SampleStride(dim_ * grid_.size, grid_.size));
  }

  SampledFunction<Scalar> entry(Index r, Index c) const {
    return SampledFunction<Scalar>(grid_, data_.col(r + c * dim_));
  }
  void set_entry(Index r, Index c, const SampledFunction<Scalar>& f) {
    if (!(f.grid() == grid_)) throw DomainError("entry grid does not match");
    data_.col(r + c * dim_) = f.values();
  }

  /// Applies fn (SampledFunction -> SampledFunction) to every entry.
  template <typename Fn>
  MatrixFunction map_entries(Fn&& fn) const {
    MatrixFunction out(grid_, dim_);
    for (Index e = 0; e < dim_ * dim_; ++e) {
      const SampledFunction<Scalar> g = fn(SampledFunction<Scalar>(grid_, data_.col(e)));
      out.data_.col(e) = g.values();
    }
    return out;
  }

  MatrixFunction& operator+=(const MatrixFunction& o) {
    data_ += o.data_;
    return *this;
  }
  MatrixFunction& operator-=(const MatrixFunction& o) {
    data_ -= o.data_;
    return *this;
  }
  MatrixFunction& operator*=(Scalar c) {
    data_ *= c;
    return *this;
  }
  friend MatrixFunction operator+(MatrixFunction a, const MatrixFunction& b) { return a += b; }
  friend MatrixFunction operator-(MatrixFunction a, const MatrixFunction& b) { return a -= b; }
  friend MatrixFunction operator*(MatrixFunction a, Scalar c) { return a *= c; }
  friend MatrixFunction operator*(Scalar c, MatrixFunction a) { return a *= c; }

  template <typename Other>
  MatrixFunction<Other> cast() const {
    MatrixFunction<Other> out(grid_, dim_);
    out.data() = data_.template cast<Other>();
    return out;
  }

 private:
  Grid grid_;
  Index dim_ = 0;
  Storage data_;
};

using RealMatrixFunction = MatrixFunction<double>;
using ComplexMatrixFunction = MatrixFunction<Complex>;

/// Entrywise spectral time derivative.
template <typename Scalar>
MatrixFunction<Scalar> derivative(const MatrixFunction<Scalar>& a) {
  return a.map_entries([](const SampledFunction<Scalar>& f) { return derivative(f); });
}

/// Samplewise product a(t) b(t).
template <typename Scalar>
MatrixFunction<Scalar> pointwise_product(const MatrixFunction<Scalar>& a,
                                         const MatrixFunction<Scalar>& b) {
  if (!(a.grid() == b.grid()) || a.dim() != b.dim()) throw DomainError("shape mismatch");
  MatrixFunction<Scalar> out(a.grid(), a.dim());
  for (Index i = 0; i < a.samples(); ++i) out.at(i).noalias() = a.at(i) * b.at(i);
  return out;
}

/// Samplewise a(t) b(t) c(t).
template <typename Scalar>
MatrixFunction<Scalar> pointwise_product(const MatrixFunction<Scalar>& a,
                                         const MatrixFunction<Scalar>& b,
                                         const MatrixFunction<Scalar>& c) {
  return pointwise_product(pointwise_product(a, b), c);
}

template <typename Scalar>
MatrixFunction<Scalar> pointwise_adjoint(const MatrixFunction<Scalar>& a) {
  MatrixFunction<Scalar> out(a.grid(), a.dim());
  for (Index i = 0; i < a.samples(); ++i) out.at(i) = a.at(i).adjoint();
  return out;
}

/// Largest value over the window of the samplewise Frobenius norm.
template <typename Scalar>
double sup_norm(const MatrixFunction<Scalar>& a) {
  const WindowRange w = window_range(a.grid());
  double m = 0.0;
  for (Index i = w.first; i <= w.last; ++i) m = std::max(m, a.at(i % a.samples()).norm());
  return m;
}

/// Largest samplewise Frobenius norm of a - a^*, i.e. the self-adjointness
/// defect.
template <typename Scalar>
double hermitian_defect(const MatrixFunction<Scalar>& a) {
  double m = 0.0;
  for (Index i = 0; i < a.samples(); ++i) {
    const auto s = a.at(i);
    m = std::max(m, (s - s.adjoint()).norm());
  }
  return m;
}

}  // namespace hypsym
