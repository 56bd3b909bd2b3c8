#include "frsm/batteries.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <type_traits>

#include "frsm/diagnostics.hpp"
#include "frsm/physics.hpp"

namespace frsm {

unsigned worker_count() {
  unsigned n = 0;
  if (const char* env = std::getenv("FRSM_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 of the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  std::seed_seq seq{static_cast<std::uint32_t>(z), static_cast<std::uint32_t>(z >> 32)};
  return std::mt19937_64(seq);
}

Field random_band_limited(const GridD& grid, std::mt19937_64& rng, double kmax, double slope, double amplitude,
                          bool zero_mean) {
  const int n = grid.n();
  if (kmax >= grid.nyquist()) throw std::invalid_argument("random field band must stay below the Nyquist line");
  std::normal_distribution<double> normal(0.0, 1.0);
  Field f(grid);
  const auto& kabs = grid.kabs();
  for (int j = 0; j < n; ++j) {
    const int mj = grid.mode(j);
    for (int i = 0; i < n; ++i) {
      const int mi = grid.mode(i);
      if (!(mi > 0 || (mi == 0 && mj > 0))) continue;
      const double k = kabs(i, j);
      if (k > kmax * (1.0 + 1e-12)) continue;
      const double w = std::pow(k, -slope) / std::sqrt(2.0);
      const std::complex<double> c(w * normal(rng), w * normal(rng));
      f(i, j) = c;
      f(grid.index(-mi), grid.index(-mj)) = std::conj(c);
    }
  }
  if (!zero_mean) f(0, 0) = normal(rng);
  const double nf = norm(f);
  if (nf > 0.0) f *= amplitude / nf;
  return f;
}

double interpolation_single_mode(double length, int mode) {
  const double k = 2.0 * std::numbers::pi * std::abs(mode) / length;
  return std::sqrt(2.0) / (k * length);
}

bool BatteryReport::passed() const {
  if (entries.empty()) return false;
  return std::all_of(entries.begin(), entries.end(), [&](const BatteryEntry& e) { return e.stable(tolerance); });
}

const BatteryEntry* BatteryReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::string BatteryReport::to_string() const {
  std::ostringstream os;
  os.precision(6);
  os << "samples " << samples << " + " << samples << ", stability tolerance " << tolerance << "\n";
  for (const auto& e : entries) {
    os << "  " << e.name << ": max(n) = " << e.max_half << ", max(2n) = " << e.max_full << ", mean = " << e.mean_full
       << ", drift = " << e.drift() << (e.stable(tolerance) ? "  stable" : "  UNSTABLE") << "\n";
  }
  for (const auto& n : notes) os << "  note: " << n << "\n";
  return os.str();
}

namespace {

double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

/// Runs `eval` on 2 * samples indices and reduces each named ratio.
BatteryReport collect(const std::vector<std::string>& names, std::size_t samples, double tolerance,
                      const std::function<std::vector<double>(std::size_t)>& eval) {
  const std::size_t total = 2 * samples;
  std::vector<std::vector<double>> values(total);
  parallel_for(total, [&](std::size_t i) { values[i] = eval(i); });

  BatteryReport report;
  report.samples = samples;
  report.tolerance = tolerance;
  for (std::size_t q = 0; q < names.size(); ++q) {
    BatteryEntry e;
    e.name = names[q];
    double sum = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
      const double v = values[i][q];
      e.finite = e.finite && std::isfinite(v);
      if (i < samples) e.max_half = std::max(e.max_half, v);
      e.max_full = std::max(e.max_full, v);
      sum += v;
    }
    e.mean_full = sum / static_cast<double>(total);
    report.entries.push_back(e);
  }
  return report;
}

template <typename F>
F aligned(F f, double amplitude) {
  const double n = norm(f);
  if (n > 0.0) f *= amplitude / n;
  return f;
}

struct Band {
  double kmax;
  double slope;
};

// Products of two fields of band <= kmax are exact on the grid when kmax < N/4 dk.
Band random_band(const GridD& grid, std::mt19937_64& rng) {
  // P(band = m dk) ~ m^-2 on 1 <= m < N/4, so the extreme low bands are well sampled.
  const int top = std::max(1, grid.n() / 4 - 1);
  std::vector<double> w(top);
  for (int m = 1; m <= top; ++m) w[m - 1] = 1.0 / (double(m) * m);
  std::discrete_distribution<int> kd(w.begin(), w.end());
  std::uniform_real_distribution<double> sd(0.0, 3.0);
  Band b{(kd(rng) + 1) * grid.dk(), sd(rng)};
  return b;
}

double random_amplitude(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ld(std::log(0.25), std::log(4.0));
  return std::exp(ld(rng));
}

// sup_{x > 0} L x^3 / (p x^2 + q x^4 + r x^6), attained at x^2 = (sqrt(q^2 + 12 p r) - q) / (6 r).
double worst_scale_cubic(double L, double p, double q, double r) {
  if (L == 0.0) return 0.0;
  double x2 = 0.0;
  if (r > 0.0) {
    x2 = (std::sqrt(q * q + 12.0 * p * r) - q) / (6.0 * r);
  } else if (q > 0.0) {
    x2 = p / q;
  } else {
    return std::numeric_limits<double>::infinity();
  }
  const double x = std::sqrt(x2);
  return safe_ratio(L * x, p + q * x2 + r * x2 * x2);
}

// sup_{x > 0} L x^3 / (p x^2 + q x^3 + t x^4) = L / (q + 2 sqrt(p t)).
double worst_scale_quadratic(double L, double p, double q, double t) {
  if (L == 0.0) return 0.0;
  return safe_ratio(L, q + 2.0 * std::sqrt(p * t));
}

struct ProductPair {
  double s, t;
};

constexpr ProductPair kProductPairs[] = {{0.5, 0.5}, {0.25, 0.75}, {0.75, 0.75}, {0.9, 0.3}};

std::string product_name(const ProductPair& p) {
  std::ostringstream os;
  os << "product_rule(s=" << p.s << ",t=" << p.t << ")";
  return os.str();
}

}  // namespace

BatteryReport inequality_battery(const GridD& grid, std::size_t samples, std::uint64_t seed, double tolerance) {
  if (samples == 0) throw std::invalid_argument("battery needs at least one sample");
  std::vector<std::string> names = {"interpolation", "l4_embedding", "l4_interpolation"};
  for (const auto& p : kProductPairs) names.push_back(product_name(p));
  names.push_back("algebra_rule(s=1)");
  names.push_back("lorentz_bound");
  const double exact_band = grid.max_wavenumber();

  auto eval = [&](std::size_t index) {
    std::mt19937_64 rng = sample_rng(seed, index);
    std::vector<double> r;
    auto draw = [&](bool zero_mean) {
      const Band b = random_band(grid, rng);
      return random_band_limited(grid, rng, b.kmax, b.slope, random_amplitude(rng), zero_mean);
    };

    const Field v = draw(true);
    const double h_half = norm(lambda_s(v, 0.5));
    r.push_back(safe_ratio(sup_norm(v), std::sqrt(h_half * norm(lambda_s(v, 1.5)))));
    const double l4 = std::sqrt(std::sqrt(norm_sq(product(v, v))));
    r.push_back(safe_ratio(l4, h_half));
    r.push_back(safe_ratio(h_half, std::sqrt(norm(v) * std::sqrt(gradient_norm_sq(v)))));

    const Field u1 = draw(true);
    const Field u2 = draw(true);
    const Field u12 = product(u1, u2);
    for (const auto& p : kProductPairs) {
      r.push_back(safe_ratio(norm(lambda_s(u12, p.s + p.t - 1.0)),
                             norm(lambda_s(u1, p.s)) * norm(lambda_s(u2, p.t))));
    }

    const Field a = draw(false);
    const Field b = draw(false);
    const double num = sobolev_norm(product(a, b), 1.0, false);
    r.push_back(safe_ratio(num, sup_norm(a) * sobolev_norm(b, 1.0, false) + sobolev_norm(a, 1.0, false) * sup_norm(b)));

    const VecField m(draw(true), draw(true));
    const VecField g = gradient(draw(true));
    // u along the solenoidal part of M.grad H
    const VecField u = aligned(leray_project(lorentz_force(m, solve_magnetostatics(m, g), 1.0, exact_band)), 1.0);
    r.push_back(lorentz_bound_ratio(u, m, g, exact_band));
    return r;
  };

  BatteryReport report = collect(names, samples, tolerance, eval);
  report.notes.push_back("homogeneous ratios use zero-mean fields: Lambda^s removes constants");
  report.notes.push_back("single-mode interpolation reference cos(x1): " +
                         std::to_string(interpolation_single_mode(grid.length(), 1)));
  return report;
}

BatteryReport leibniz_battery(const GridD& grid, int k, std::size_t samples, std::uint64_t seed, double tolerance) {
  if (k < 1 || k > 3) throw std::invalid_argument("Leibniz battery order must be 1, 2 or 3");
  if (samples == 0) throw std::invalid_argument("battery needs at least one sample");

  auto d_alpha = [](Field f, int a1, int a2) {
    for (int i = 0; i < a1; ++i) f = partial(f, 0);
    for (int i = 0; i < a2; ++i) f = partial(f, 1);
    return f;
  };
  auto d_alpha_vec = [&](const VecField& v, int a1, int a2) {
    return VecField(d_alpha(v[0], a1, a2), d_alpha(v[1], a1, a2));
  };
  // F_l, G_l of the pair (a, b)
  auto ledgers = [&](const auto& a, const auto& b, std::vector<double>& F, std::vector<double>& G) {
    F.assign(k, 0.0);
    G.assign(k, 0.0);
    for (int l = 0; l < k; ++l) {
      const double fa = sobolev_norm(a, double(l), false), fb = sobolev_norm(b, double(l), false);
      F[l] = std::sqrt(fa * fa + fb * fb);
      double g = 0.0;
      if constexpr (std::is_same_v<std::decay_t<decltype(a)>, Field>) {
        for (const Field* x : {&a, &b}) {
          const double n = sobolev_norm(gradient(*x), double(l), false);
          g += n * n;
        }
      } else {
        for (const VecField* x : {&a, &b}) {
          for (int c = 0; c < 2; ++c) {
            const double n = sobolev_norm(gradient((*x)[c]), double(l), false);
            g += n * n;
          }
        }
      }
      G[l] = std::sqrt(g);
    }
  };

  auto eval = [&](std::size_t index) {
    std::mt19937_64 rng = sample_rng(seed, index);
    std::uniform_int_distribution<int> split(0, k);
    const int a1 = split(rng);
    const int a2 = k - a1;
    auto draw = [&](bool zero_mean) {
      const Band band = random_band(grid, rng);
      return random_band_limited(grid, rng, band.kmax, band.slope, 1.0, zero_mean);
    };
    std::vector<double> F, G, r;

    // transport: a divergence-free, b and c two-component
    {
      const VecField a = leray_project(grad_perp(draw(true)));
      const VecField b(draw(false), draw(false));
      const auto [a_1, a_2] = to_physical_pair(a[0], a[1]);
      VecField adv(grid);
      for (int j = 0; j < 2; ++j) {
        const auto [b1, b2] = to_physical_pair(partial(b[j], 0), partial(b[j], 1));
        adv[j] = Field::from_physical(grid, a_1 * b1 + a_2 * b2);
      }
      // c along the transport term: the maximizing direction of the left side
      const VecField c = aligned(adv, 1.0);
      const VecField dc = d_alpha_vec(c, a1, a2);
      const VecField da = d_alpha_vec(a, a1, a2);
      const VecField db = d_alpha_vec(b, a1, a2);
      const double lhs = std::abs(inner(d_alpha_vec(adv, a1, a2), dc));
      ledgers(a, b, F, G);
      double sum_fg = 0.0;
      for (int l = 0; l < k; ++l) sum_fg += F[l] * F[l] * G[l] * G[l];
      double sum_g = 0.0;
      for (int l = 1; l < k; ++l) sum_g += G[l] * G[l];
      // Under (a, b, c) -> lambda (a, b, c): LHS ~ lambda^3, the right side ~ p lambda^2 + q lambda^4 + r lambda^6.
      const double p = gradient_norm_sq(da) + gradient_norm_sq(db) + gradient_norm_sq(dc) + sum_g;
      const double q = G[0] * G[0] * (norm_sq(dc) + norm_sq(da));
      const double r6 = sum_fg * norm_sq(dc);
      r.push_back(worst_scale_cubic(lhs, p, q, r6));
    }

    // bilinear: scalars
    {
      const Field a = draw(false);
      const Field b = draw(false);
      const Field ab = product(a, b);
      const Field c = aligned(ab, 1.0);
      const Field dc = d_alpha(c, a1, a2);
      const double lhs = std::abs(inner(d_alpha(ab, a1, a2), dc));
      ledgers(a, b, F, G);
      double sum = 0.0;
      for (int l = 1; l < k; ++l) sum += std::sqrt(G[l - 1] * G[l] * G[k - l - 1] * G[k - l]);
      // LHS ~ lambda^3, the right side ~ p lambda^2 + q lambda^3 + t lambda^4.
      const double p = gradient_norm_sq(d_alpha(a, a1, a2)) + gradient_norm_sq(d_alpha(b, a1, a2)) +
                       2.0 * gradient_norm_sq(dc);
      const double q = sum * norm(dc);
      const double t = G[k - 1] * G[k - 1] * (norm_sq(a) + norm_sq(b));
      r.push_back(worst_scale_quadratic(lhs, p, q, t));
    }
    return r;
  };

  const std::string suffix = "(k=" + std::to_string(k) + ")";
  BatteryReport report = collect({"leibniz_transport" + suffix, "leibniz_bilinear" + suffix}, samples, tolerance, eval);
  report.notes.push_back(
      "needed C_k = sup over a common scale of LHS / (epsilon part + structural part), epsilon = 1, C_k = 1");
  return report;
}

}  // namespace frsm
