#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "frsm/diagnostics.hpp"
#include "frsm/spectral.hpp"
#include "support.hpp"

using namespace frsm;
using namespace frsm::test;
using std::complex;

namespace {

constexpr double kTol = 1e-12;
const double kPi = std::numbers::pi;

// Derivative wavenumber: zero on the Nyquist line.
double kd(int m, int n) { return m == -n / 2 ? 0.0 : double(m); }

}  // namespace

TEST_CASE("grid rejects sizes that are not powers of two >= 8") {
  CHECK_THROWS_AS(GridD(4), std::invalid_argument);
  CHECK_THROWS_AS(GridD(24), std::invalid_argument);
  CHECK_THROWS_AS(GridD(16, -1.0), std::invalid_argument);
  CHECK_NOTHROW(GridD(8));
}

TEST_CASE("wavenumbers are exact integers times dk") {
  const GridD g(16, 4.0 * kPi);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) {
      const double m1 = g.mode(i), m2 = g.mode(j);
      CHECK(g.kabs()(i, j) == std::sqrt(m1 * m1 + m2 * m2) * 0.5);
    }
  CHECK(g.k1()(8, 0) == 0.0);
  CHECK(g.k2()(0, 8) == 0.0);
}

TEST_CASE("round trip and Parseval hold for N in {8, 16, 32, 64}") {
  std::mt19937_64 rng(1);
  for (int n : {8, 16, 32, 64}) {
    const GridD g(n, 3.0);
    const RealGrid<double> a = random_values(n, rng), b = random_values(n, rng);
    const Field fa = Field::from_physical(g, a), fb = Field::from_physical(g, b);
    CHECK(rel_diff(fa.to_physical(), a) < kTol);
    const double physical = (a * b).sum() * g.spacing() * g.spacing();
    CHECK(std::abs(inner(fa, fb) - physical) <= kTol * std::sqrt((a * a).sum() * (b * b).sum()) * g.spacing() * g.spacing());
    CHECK(hermitian_residual(fa) < kTol);
  }
}

TEST_CASE("paired transforms agree with single transforms") {
  std::mt19937_64 rng(2);
  const GridD g(16);
  const Field a = random_field(g, rng), b = random_field(g, rng);
  const auto [pa, pb] = to_physical_pair(a, b);
  CHECK(max_abs_diff(pa, a.to_physical()) < kTol);
  CHECK(max_abs_diff(pb, b.to_physical()) < kTol);
  const auto [qa, qb] = from_physical_pair(g, pa, pb);
  CHECK((qa.coeffs() - a.coeffs()).abs().maxCoeff() < kTol);
  CHECK((qb.coeffs() - b.coeffs()).abs().maxCoeff() < kTol);
}

TEST_CASE("lambda_s matches the DFT oracle on an 8x8 grid") {
  std::mt19937_64 rng(3);
  const GridD g(8);
  const RealGrid<double> v = random_values(8, rng);
  const Field f = Field::from_physical(g, v);
  for (double s : {0.5, 1.0, -0.5, 1.5, 2.0}) {
    const RealGrid<double> oracle = dft_apply(v, g.length(), [&](int m1, int m2) -> complex<double> {
      const double k = std::hypot(double(m1), double(m2));
      return k == 0.0 ? 0.0 : std::pow(k, s);
    });
    CHECK(rel_diff(lambda_s(f, s).to_physical(), oracle) < kTol);
  }
  CHECK((lambda_s(f, 0.0).coeffs() - f.coeffs()).abs().maxCoeff() == 0.0);
}

TEST_CASE("gradient matches the DFT oracle on an 8x8 grid") {
  std::mt19937_64 rng(4);
  const GridD g(8);
  const RealGrid<double> v = random_values(8, rng);
  const VecField grad = gradient(Field::from_physical(g, v));
  const auto o1 = dft_apply(v, g.length(), [](int m1, int) { return complex<double>(0.0, kd(m1, 8)); });
  const auto o2 = dft_apply(v, g.length(), [](int, int m2) { return complex<double>(0.0, kd(m2, 8)); });
  CHECK(rel_diff(grad[0].to_physical(), o1) < kTol);
  CHECK(rel_diff(grad[1].to_physical(), o2) < kTol);
}

TEST_CASE("Leray and Q projections match the DFT oracle on an 8x8 grid") {
  std::mt19937_64 rng(5);
  const GridD g(8);
  const RealGrid<double> a = random_values(8, rng), b = random_values(8, rng);
  const VecField v(Field::from_physical(g, a), Field::from_physical(g, b));
  const VecField q = q_project(v), p = leray_project(v);

  // Q_jl = k_j k_l / |k|^2 on derivative wavenumbers, summed over l by linearity.
  auto q_entry = [](int j, int l) {
    return [j, l](int m1, int m2) -> complex<double> {
      const double k[2] = {kd(m1, 8), kd(m2, 8)};
      const double d2 = k[0] * k[0] + k[1] * k[1];
      return d2 == 0.0 ? 0.0 : k[j] * k[l] / d2;
    };
  };
  for (int j = 0; j < 2; ++j) {
    const RealGrid<double> oq = dft_apply(a, g.length(), q_entry(j, 0)) + dft_apply(b, g.length(), q_entry(j, 1));
    const RealGrid<double>& vj = j == 0 ? a : b;
    CHECK(rel_diff(q[j].to_physical(), oq) < kTol);
    CHECK(rel_diff(p[j].to_physical(), vj - oq) < kTol);
  }
}

TEST_CASE("Leray projection: solenoidal fields are kept, gradients are removed") {
  std::mt19937_64 rng(6);
  const GridD g(32);
  const Field psi = random_field(g, rng);
  const VecField sol = grad_perp(psi);
  const VecField grad = gradient(psi);
  CHECK(norm(leray_project(sol) - sol) <= kTol * norm(sol));
  CHECK(norm(leray_project(grad)) <= kTol * norm(grad));
  CHECK(norm(q_project(sol)) <= kTol * norm(sol));
  CHECK(norm(q_project(grad) - grad) <= kTol * norm(grad));

  const VecField v = random_vec(g, rng);
  const VecField p = leray_project(v), q = q_project(v);
  CHECK(norm(p + q - v) <= kTol * norm(v));
  CHECK(std::abs(inner(p, q)) <= kTol * norm_sq(v));
  CHECK(norm(q_project(q) - q) <= kTol * norm(v));
  CHECK(norm(leray_project(p) - p) <= kTol * norm(v));
  CHECK(sup_norm(divergence(p)) <= kTol * sup_norm(v) * g.nyquist());
  CHECK(sup_norm(curl_2d(q)) <= kTol * sup_norm(v) * g.nyquist());
}

TEST_CASE("lambda_s composes on zero-mean fields") {
  std::mt19937_64 rng(7);
  const GridD g(32);
  const Field f = truncate(random_field(g, rng), 1e9, true);
  for (auto [a, b] : {std::pair{0.5, 0.5}, std::pair{1.0, -0.5}, std::pair{-1.0, 2.0}}) {
    CHECK(norm(lambda_s(lambda_s(f, a), b) - lambda_s(f, a + b)) <= kTol * norm(lambda_s(f, a + b)));
  }
}

TEST_CASE("single-mode eigenfunctions") {
  const GridD g(16);
  const Field c = sample(g, [](double x, double) { return std::cos(x); });
  CHECK(rel_diff(lambda_s(c, 2.0).to_physical(), c.to_physical()) < kTol);

  const Field s = sample(g, [](double x, double) { return std::sin(x); });
  const VecField gs = gradient(s);
  CHECK(rel_diff(gs[0].to_physical(), c.to_physical()) < kTol);
  CHECK(sup_norm(gs[1]) < kTol);

  const Field k = sample(g, [](double, double) { return 3.0; });
  CHECK(norm(gradient(k)) < kTol);
}

TEST_CASE("truncate") {
  std::mt19937_64 rng(8);
  const GridD g(16);
  const Field f = random_field(g, rng);
  CHECK((truncate(f, g.max_wavenumber()).coeffs() - f.coeffs()).abs().maxCoeff() == 0.0);

  const Field m3 = sample(g, [](double x, double) { return std::cos(3.0 * x); });
  CHECK(norm(truncate(m3, 2.0)) < kTol);

  const double kc = g.dealias_cutoff();
  const Field t = truncate(f, kc);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) {
      const double m1 = g.mode(i), m2 = g.mode(j);
      const bool keep = m1 * m1 + m2 * m2 <= kc * kc;
      CHECK(t(i, j) == (keep ? f(i, j) : complex<double>(0.0)));
    }
  CHECK(truncate(f, kc, true)(0, 0) == 0.0);
}

TEST_CASE("curl, perp and cross") {
  std::mt19937_64 rng(9);
  const GridD g(16);
  const Field psi = sample(g, [](double x, double) { return std::sin(x); });
  const Field c = curl_2d(grad_perp(psi));
  CHECK(rel_diff(c.to_physical(), (-psi).to_physical()) < kTol);

  const VecField v = random_vec(g, rng);
  const VecField pp = perp(perp(v));
  CHECK((pp[0].coeffs() + v[0].coeffs()).abs().maxCoeff() == 0.0);
  CHECK((pp[1].coeffs() + v[1].coeffs()).abs().maxCoeff() == 0.0);
  CHECK(sup_norm(cross_2d(v, v)) < kTol);

  const VecField w = random_vec(g, rng);
  const RealGrid<double> expected = v[0].to_physical() * w[1].to_physical() - v[1].to_physical() * w[0].to_physical();
  CHECK(rel_diff(cross_2d(v, w).to_physical(), expected) < kTol);
  CHECK_THROWS_AS(cross_2d(v, VecField(GridD(8))), GridMismatch);
}

TEST_CASE("Sobolev norms") {
  std::mt19937_64 rng(10);
  const GridD g(32);
  const Field one = sample(g, [](double x, double) { return 0.7 * std::cos(x); });
  for (double s : {-1.0, 0.5, 1.0, 2.0}) CHECK(std::abs(sobolev_norm(one, s, true) - norm(one)) < kTol);

  const Field f = random_field(g, rng);
  CHECK(std::abs(sobolev_norm(f, 0.0, true) - norm(f)) <= kTol * norm(f));
  CHECK(std::abs(sobolev_norm(f, 0.0, false) - norm(f)) <= kTol * norm(f));

  // (1 + |k|)^2 lies between (1 + |k|^2) and 2 (1 + |k|^2).
  for (int trial = 0; trial < 100; ++trial) {
    const Field h = random_band(g, rng, 8.0);
    const double direct = std::sqrt(norm_sq(h) + norm_sq(partial(h, 0)) + norm_sq(partial(h, 1)));
    const double ratio = sobolev_norm(h, 1.0, false) / direct;
    CHECK(ratio >= 1.0 - kTol);
    CHECK(ratio <= std::sqrt(2.0) + kTol);
  }
}

TEST_CASE("resample pads and restricts spectrally") {
  std::mt19937_64 rng(11);
  const GridD coarse(16), fine(64);
  const Field f = random_band(coarse, rng, coarse.dealias_cutoff());
  const Field up = resample(f, fine);
  CHECK(std::abs(norm(up) - norm(f)) <= kTol * norm(f));
  CHECK((resample(up, coarse).coeffs() - f.coeffs()).abs().maxCoeff() < kTol);
}
