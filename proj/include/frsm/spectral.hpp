// Periodic pseudo-spectral grid, fields and Fourier-multiplier operators.
//
// Coefficient arrays are indexed like the physical arrays: entry (i, j) holds
// the mode (m(i), m(j)) with m(i) = i for i < N/2 and i - N otherwise. Index i
// runs along x1 and index j along x2. Coefficients are normalized so that
//
//   f(x) = sum_k c_k exp(i k.x),   c_k = N^-2 sum_x f(x) exp(-i k.x),
//
// and every L2 quantity is an integral over the box [0, L)^2, so that
// <f, g> = L^2 sum_k Re(c_k conj(d_k)).
#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace frsm {

template <typename Scalar>
using RealGrid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexGrid = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

class GridMismatch : public std::invalid_argument {
 public:
  GridMismatch() : std::invalid_argument("fields live on different grids") {}
};

/// Uniform N x N periodic grid of side L.
template <typename Scalar = double>
class Grid {
 public:
  explicit Grid(int n, Scalar length = Scalar(2) * std::numbers::pi_v<Scalar>)
      : n_(n), length_(length) {
    if (n < 8 || (n & (n - 1)) != 0) {
      throw std::invalid_argument("grid size must be a power of two >= 8, got " +
                                  std::to_string(n));
    }
    if (!(length > Scalar(0))) throw std::invalid_argument("grid length must be positive");
    tables_ = std::make_shared<const Tables>(n, dk());
  }

  int n() const { return n_; }
  Scalar length() const { return length_; }
  Scalar dk() const { return Scalar(2) * std::numbers::pi_v<Scalar> / length_; }
  Scalar spacing() const { return length_ / Scalar(n_); }
  Scalar area() const { return length_ * length_; }
  Scalar nyquist() const { return dk() * Scalar(n_ / 2); }
  /// 2/3-rule cutoff; also the Galerkin truncation radius used by the solver.
  Scalar dealias_cutoff() const { return Scalar(2) / Scalar(3) * nyquist(); }
  /// Largest |k| present on the grid (the corner mode).
  Scalar max_wavenumber() const { return nyquist() * std::sqrt(Scalar(2)); }

  int mode(int index) const { return index < n_ / 2 ? index : index - n_; }
  int index(int mode) const { return ((mode % n_) + n_) % n_; }

  /// Derivative wavenumbers; the Nyquist line is zeroed so odd operators keep
  /// real fields real.
  const RealGrid<Scalar>& k1() const { return tables_->k1; }
  const RealGrid<Scalar>& k2() const { return tables_->k2; }
  /// |k| and |k|^2 from the integer indices, Nyquist included.
  const RealGrid<Scalar>& kabs() const { return tables_->kabs; }
  const RealGrid<Scalar>& ksq() const { return tables_->ksq; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  struct Tables {
    Tables(int n, Scalar dk) : k1(n, n), k2(n, n), kabs(n, n), ksq(n, n) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const long mi = i < n / 2 ? i : i - n;
          const long mj = j < n / 2 ? j : j - n;
          const long m2 = mi * mi + mj * mj;
          k1(i, j) = i == n / 2 ? Scalar(0) : dk * Scalar(mi);
          k2(i, j) = j == n / 2 ? Scalar(0) : dk * Scalar(mj);
          kabs(i, j) = dk * std::sqrt(Scalar(m2));
          ksq(i, j) = dk * dk * Scalar(m2);
        }
      }
    }
    RealGrid<Scalar> k1, k2, kabs, ksq;
  };

  int n_;
  Scalar length_;
  std::shared_ptr<const Tables> tables_;
};

namespace detail {

// In-place unnormalized 2D DFT (forward: exp(-i k.x), inverse: exp(+i k.x)).
template <typename Scalar>
void fft2(ComplexGrid<Scalar>& a, bool inverse) {
  using Complex = std::complex<Scalar>;
  thread_local Eigen::FFT<Scalar> fft;
  thread_local std::vector<Complex> in, out;
  fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
  const Eigen::Index n = a.rows();
  in.resize(n);
  out.resize(n);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    Complex* col = a.col(j).data();
    if (inverse) {
      fft.inv(out.data(), col, n);
    } else {
      fft.fwd(out.data(), col, n);
    }
    std::copy(out.begin(), out.end(), col);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) in[j] = a(i, j);
    if (inverse) {
      fft.inv(out.data(), in.data(), n);
    } else {
      fft.fwd(out.data(), in.data(), n);
    }
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = out[j];
  }
}

}  // namespace detail

/// One scalar unknown on a periodic grid, stored as Fourier coefficients.
template <typename Scalar = double>
class SpectralField {
 public:
  using Complex = std::complex<Scalar>;

  explicit SpectralField(Grid<Scalar> grid)
      : grid_(std::move(grid)), coeffs_(ComplexGrid<Scalar>::Zero(grid_.n(), grid_.n())) {}

  SpectralField(Grid<Scalar> grid, ComplexGrid<Scalar> coeffs)
      : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() != grid_.n() || coeffs_.cols() != grid_.n()) throw GridMismatch();
  }

  static SpectralField from_physical(const Grid<Scalar>& grid, const RealGrid<Scalar>& values) {
    if (values.rows() != grid.n() || values.cols() != grid.n()) throw GridMismatch();
    ComplexGrid<Scalar> c = values.template cast<Complex>();
    detail::fft2(c, false);
    c /= Scalar(grid.n()) * Scalar(grid.n());
    return SpectralField(grid, std::move(c));
  }

  /// Physical values on the grid; the imaginary round-off is discarded.
  RealGrid<Scalar> to_physical() const {
    ComplexGrid<Scalar> c = coeffs_;
    detail::fft2(c, true);
    return c.real();
  }

  const Grid<Scalar>& grid() const { return grid_; }
  ComplexGrid<Scalar>& coeffs() { return coeffs_; }
  const ComplexGrid<Scalar>& coeffs() const { return coeffs_; }
  Complex& operator()(Eigen::Index i, Eigen::Index j) { return coeffs_(i, j); }
  const Complex& operator()(Eigen::Index i, Eigen::Index j) const { return coeffs_(i, j); }

  SpectralField& operator+=(const SpectralField& o) {
    check(o);
    coeffs_ += o.coeffs_;
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    check(o);
    coeffs_ -= o.coeffs_;
    return *this;
  }
  SpectralField& operator*=(Scalar a) {
    coeffs_ *= a;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(Scalar s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, Scalar s) { return a *= s; }
  friend SpectralField operator-(SpectralField a) {
    a.coeffs_ = -a.coeffs_;
    return a;
  }

  void check(const SpectralField& o) const {
    if (!(grid_ == o.grid_)) throw GridMismatch();
  }

 private:
  Grid<Scalar> grid_;
  ComplexGrid<Scalar> coeffs_;
};

/// Physical values of two real fields from one complex transform of a + i b.
template <typename Scalar>
std::pair<RealGrid<Scalar>, RealGrid<Scalar>> to_physical_pair(const SpectralField<Scalar>& a,
                                                               const SpectralField<Scalar>& b) {
  a.check(b);
  ComplexGrid<Scalar> c = a.coeffs() + std::complex<Scalar>(0, 1) * b.coeffs();
  detail::fft2(c, true);
  return {c.real(), c.imag()};
}

/// Spectral fields of two real arrays from one complex transform of x + i y.
template <typename Scalar>
std::pair<SpectralField<Scalar>, SpectralField<Scalar>> from_physical_pair(const Grid<Scalar>& grid,
                                                                           const RealGrid<Scalar>& x,
                                                                           const RealGrid<Scalar>& y) {
  using Complex = std::complex<Scalar>;
  const int n = grid.n();
  if (x.rows() != n || x.cols() != n || y.rows() != n || y.cols() != n) throw GridMismatch();
  ComplexGrid<Scalar> c(n, n);
  c.real() = x;
  c.imag() = y;
  detail::fft2(c, false);
  c /= Scalar(n) * Scalar(n);
  ComplexGrid<Scalar> a(n, n), b(n, n);
  for (int j = 0; j < n; ++j) {
    const int rj = (n - j) % n;
    for (int i = 0; i < n; ++i) {
      const Complex p = c(i, j);
      const Complex q = std::conj(c((n - i) % n, rj));
      a(i, j) = Scalar(0.5) * (p + q);
      b(i, j) = Complex(0, Scalar(-0.5)) * (p - q);
    }
  }
  return {SpectralField<Scalar>(grid, std::move(a)), SpectralField<Scalar>(grid, std::move(b))};
}

/// Two-component field (u1, u2).
template <typename Scalar = double>
struct VectorField {
  std::array<SpectralField<Scalar>, 2> c;

  explicit VectorField(const Grid<Scalar>& grid) : c{SpectralField<Scalar>(grid), SpectralField<Scalar>(grid)} {}
  VectorField(SpectralField<Scalar> x, SpectralField<Scalar> y) : c{std::move(x), std::move(y)} {
    c[0].check(c[1]);
  }

  const Grid<Scalar>& grid() const { return c[0].grid(); }
  SpectralField<Scalar>& operator[](std::size_t i) { return c[i]; }
  const SpectralField<Scalar>& operator[](std::size_t i) const { return c[i]; }

  VectorField& operator+=(const VectorField& o) {
    c[0] += o.c[0];
    c[1] += o.c[1];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    c[0] -= o.c[0];
    c[1] -= o.c[1];
    return *this;
  }
  VectorField& operator*=(Scalar a) {
    c[0] *= a;
    c[1] *= a;
    return *this;
  }
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(Scalar s, VectorField a) { return a *= s; }
  friend VectorField operator*(VectorField a, Scalar s) { return a *= s; }
  friend VectorField operator-(VectorField a) { return a *= Scalar(-1); }
};

// ---------------------------------------------------------------------------
// Fourier multipliers

/// Lambda^s = |D|^s. The mean is removed for every s != 0; s == 0 is the identity.
template <typename Scalar>
SpectralField<Scalar> lambda_s(const SpectralField<Scalar>& f, Scalar s) {
  if (s == Scalar(0)) return f;
  SpectralField<Scalar> out = f;
  const auto& kabs = f.grid().kabs();
  auto& c = out.coeffs();
  if (s == Scalar(0.5)) {
    c *= kabs.sqrt().template cast<std::complex<Scalar>>();
    return out;
  }
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      c(i, j) = kabs(i, j) > Scalar(0) ? c(i, j) * std::pow(kabs(i, j), s) : std::complex<Scalar>(0);
    }
  }
  return out;
}

template <typename Scalar>
VectorField<Scalar> lambda_s(const VectorField<Scalar>& v, Scalar s) {
  return {lambda_s(v[0], s), lambda_s(v[1], s)};
}

template <typename Scalar>
SpectralField<Scalar> partial(const SpectralField<Scalar>& f, int axis) {
  const std::complex<Scalar> i1(0, 1);
  const auto& k = axis == 0 ? f.grid().k1() : f.grid().k2();
  return SpectralField<Scalar>(f.grid(), f.coeffs() * (i1 * k.template cast<std::complex<Scalar>>()));
}

template <typename Scalar>
VectorField<Scalar> gradient(const SpectralField<Scalar>& f) {
  return {partial(f, 0), partial(f, 1)};
}

template <typename Scalar>
SpectralField<Scalar> divergence(const VectorField<Scalar>& v) {
  return partial(v[0], 0) + partial(v[1], 1);
}

/// curl v = -d2 v1 + d1 v2.
template <typename Scalar>
SpectralField<Scalar> curl_2d(const VectorField<Scalar>& v) {
  return partial(v[1], 0) - partial(v[0], 1);
}

/// v_perp = (-v2, v1).
template <typename Scalar>
VectorField<Scalar> perp(const VectorField<Scalar>& v) {
  return {-v[1], v[0]};
}

template <typename Scalar>
VectorField<Scalar> grad_perp(const SpectralField<Scalar>& psi) {
  return perp(gradient(psi));
}

template <typename Scalar>
SpectralField<Scalar> laplacian(const SpectralField<Scalar>& f) {
  return SpectralField<Scalar>(f.grid(), f.coeffs() * (-f.grid().ksq()).template cast<std::complex<Scalar>>());
}

template <typename Scalar>
VectorField<Scalar> laplacian(const VectorField<Scalar>& v) {
  return {laplacian(v[0]), laplacian(v[1])};
}

/// Delta^-1 on zero-mean functions; the mean of the result is zero.
template <typename Scalar>
SpectralField<Scalar> inverse_laplacian(const SpectralField<Scalar>& f) {
  SpectralField<Scalar> out = f;
  const auto& ksq = f.grid().ksq();
  auto& c = out.coeffs();
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      c(i, j) = ksq(i, j) > Scalar(0) ? -c(i, j) / ksq(i, j) : std::complex<Scalar>(0);
    }
  }
  return out;
}

/// Q v = Delta^-1 grad div v, built from the derivative wavenumbers so that
/// P = 1 - Q and Q are exact complementary orthogonal projectors. Q kills the mean.
template <typename Scalar>
VectorField<Scalar> q_project(const VectorField<Scalar>& v) {
  v[0].check(v[1]);
  const auto& grid = v.grid();
  const auto& k1 = grid.k1();
  const auto& k2 = grid.k2();
  VectorField<Scalar> out(grid);
  auto& o1 = out[0].coeffs();
  auto& o2 = out[1].coeffs();
  const auto& a = v[0].coeffs();
  const auto& b = v[1].coeffs();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const Scalar d2 = k1(i, j) * k1(i, j) + k2(i, j) * k2(i, j);
      if (d2 == Scalar(0)) continue;
      const std::complex<Scalar> kv = (k1(i, j) * a(i, j) + k2(i, j) * b(i, j)) / d2;
      o1(i, j) = k1(i, j) * kv;
      o2(i, j) = k2(i, j) * kv;
    }
  }
  return out;
}

/// Leray projector P = 1 - Q; the mean passes through unchanged.
template <typename Scalar>
VectorField<Scalar> leray_project(const VectorField<Scalar>& v) {
  return v - q_project(v);
}

/// Sharp Galerkin cutoff: zero every mode with |k| > kmax, optionally the mean too.
template <typename Scalar>
SpectralField<Scalar> truncate(const SpectralField<Scalar>& f, Scalar kmax, bool zero_mean = false) {
  if (!(kmax > Scalar(0))) throw std::invalid_argument("truncation radius must be positive");
  SpectralField<Scalar> out = f;
  const auto& kabs = f.grid().kabs();
  const Scalar limit = kmax * (Scalar(1) + Scalar(64) * Eigen::NumTraits<Scalar>::epsilon());
  out.coeffs() = (kabs > limit).select(std::complex<Scalar>(0), out.coeffs());
  if (zero_mean) out(0, 0) = 0;
  return out;
}

template <typename Scalar>
VectorField<Scalar> truncate(const VectorField<Scalar>& v, Scalar kmax, bool zero_mean = false) {
  return {truncate(v[0], kmax, zero_mean), truncate(v[1], kmax, zero_mean)};
}

// ---------------------------------------------------------------------------
// Pointwise (physical-space) products. The results are not truncated.

template <typename Scalar>
SpectralField<Scalar> product(const SpectralField<Scalar>& a, const SpectralField<Scalar>& b) {
  a.check(b);
  return SpectralField<Scalar>::from_physical(a.grid(), a.to_physical() * b.to_physical());
}

/// Planar cross product A x B = A1 B2 - A2 B1 (z-component of the 3D product).
template <typename Scalar>
SpectralField<Scalar> cross_2d(const VectorField<Scalar>& a, const VectorField<Scalar>& b) {
  a[0].check(b[0]);
  const RealGrid<Scalar> x = a[0].to_physical() * b[1].to_physical() - a[1].to_physical() * b[0].to_physical();
  return SpectralField<Scalar>::from_physical(a.grid(), x);
}

// ---------------------------------------------------------------------------
// Inner products and norms

template <typename Scalar>
Scalar inner(const SpectralField<Scalar>& f, const SpectralField<Scalar>& g) {
  f.check(g);
  return f.grid().area() * (f.coeffs() * g.coeffs().conjugate()).real().sum();
}

template <typename Scalar>
Scalar inner(const VectorField<Scalar>& v, const VectorField<Scalar>& w) {
  return inner(v[0], w[0]) + inner(v[1], w[1]);
}

template <typename Scalar>
Scalar norm_sq(const SpectralField<Scalar>& f) {
  return f.grid().area() * f.coeffs().abs2().sum();
}

template <typename Scalar>
Scalar norm_sq(const VectorField<Scalar>& v) {
  return norm_sq(v[0]) + norm_sq(v[1]);
}

template <typename Scalar>
Scalar norm(const SpectralField<Scalar>& f) {
  return std::sqrt(norm_sq(f));
}

template <typename Scalar>
Scalar norm(const VectorField<Scalar>& v) {
  return std::sqrt(norm_sq(v));
}

/// Sup over grid points.
template <typename Scalar>
Scalar sup_norm(const SpectralField<Scalar>& f) {
  return f.to_physical().abs().maxCoeff();
}

template <typename Scalar>
Scalar sup_norm(const VectorField<Scalar>& v) {
  const auto [a, b] = to_physical_pair(v[0], v[1]);
  return (a.square() + b.square()).sqrt().maxCoeff();
}

/// max_k |c(k) - conj(c(-k))|; zero for a field that represents a real function.
template <typename Scalar>
Scalar hermitian_residual(const SpectralField<Scalar>& f) {
  const int n = f.grid().n();
  Scalar r(0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      r = std::max(r, std::abs(f(i, j) - std::conj(f((n - i) % n, (n - j) % n))));
    }
  }
  return r;
}

/// Spectral restriction / zero padding onto another grid of the same length.
/// Modes that do not exist on the target grid (and its Nyquist lines) are dropped.
template <typename Scalar>
SpectralField<Scalar> resample(const SpectralField<Scalar>& f, const Grid<Scalar>& target) {
  if (f.grid().length() != target.length()) throw GridMismatch();
  SpectralField<Scalar> out(target);
  const int ns = f.grid().n();
  const int nt = target.n();
  const int half = std::min(ns, nt) / 2;
  for (int j = 0; j < ns; ++j) {
    const int mj = f.grid().mode(j);
    if (mj <= -half || mj >= half) continue;
    for (int i = 0; i < ns; ++i) {
      const int mi = f.grid().mode(i);
      if (mi <= -half || mi >= half) continue;
      out(target.index(mi), target.index(mj)) = f(i, j);
    }
  }
  return out;
}

template <typename Scalar>
VectorField<Scalar> resample(const VectorField<Scalar>& v, const Grid<Scalar>& target) {
  return {resample(v[0], target), resample(v[1], target)};
}

using GridD = Grid<double>;
using Field = SpectralField<double>;
using VecField = VectorField<double>;

}  // namespace frsm
