#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "jacobi/distributions.hpp"
#include "jacobi/metric.hpp"
#include "jacobi/quadrature.hpp"
#include "jacobi/spectral.hpp"

using namespace jacobi;

namespace {
constexpr double kPi = 3.14159265358979323846;

double kernel_mass(const HeatKernelModel& model, const JacobiParams& p, double t, double x,
                   std::size_t order) {
  const GaussRule& rule = gauss_jacobi_rule(p, order);
  double mass = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    mass += rule.weights[i] * model.heat_kernel(t, x, rule.nodes[i]);
  }
  return mass;
}

// I(s) = int_0^inf exp(-s u (u + d - 1)) du by quadrature after u = v/sqrt(s);
// the integrand is negligible beyond v = 9.
double sandwich_integral(double d, double s, std::size_t order = 128) {
  const GaussRule rule = gauss_legendre_rule(order);
  const double hi = 9.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = 0.5 * hi * (rule.nodes[i] + 1.0);
    sum += 0.5 * hi * rule.weights[i] * std::exp(-v * v - (d - 1.0) * std::sqrt(s) * v);
  }
  return sum / std::sqrt(s);
}
}  // namespace

TEST_CASE("eigenvalues") {
  CHECK(eigenvalue(JacobiParams::symmetric(2.0), 1) == doctest::Approx(2.0));
  CHECK(eigenvalue(JacobiParams::symmetric(3.7), 0) == 0.0);
  CHECK(eigenvalue(JacobiParams::symmetric(1.0), 3) == doctest::Approx(9.0));
  // Non-symmetric: same form with d = alpha + beta.
  CHECK(eigenvalue(JacobiParams(0.75, 1.5), 2) == doctest::Approx(2.0 * (2.0 + 2.25 - 1.0)));
  double prev = 0.0;
  for (std::size_t k = 1; k < 40; ++k) {
    const double lam = eigenvalue(JacobiParams(0.5, 2.5), k);
    CHECK(lam > prev);
    prev = lam;
  }
}

TEST_CASE("basis: normalization and low-degree values") {
  HeatKernelModel legendre(JacobiParams(1.0, 1.0));
  for (double x : {-1.0, -0.31, 0.0, 0.77, 1.0}) {
    CHECK(legendre.basis_eval(0, x) == 1.0);
  }
  // d=2: J_1 = sqrt(3) x since int x^2 dx/2 = 1/3.
  CHECK(legendre.basis_eval(1, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(legendre.basis_eval(1, 0.4) == doctest::Approx(std::sqrt(3.0) * 0.4).epsilon(1e-14));
  // Arcsine: J_k = sqrt(2) T_k for k >= 1.
  HeatKernelModel arcsine(JacobiParams(0.5, 0.5));
  for (int k = 1; k <= 6; ++k) {
    const double th = 0.83;
    CHECK(arcsine.basis_eval(static_cast<std::size_t>(k), std::cos(th)) ==
          doctest::Approx(std::sqrt(2.0) * std::cos(k * th)).epsilon(1e-12));
  }
}

TEST_CASE("basis: orthonormality matrix is the identity to 1e-8") {
  const std::vector<JacobiParams> models{{1.0, 1.0}, {0.5, 0.5}, {1.75, 3.25}};
  for (const auto& p : models) {
    HeatKernelModel model(p);
    const GaussRule& rule = gauss_jacobi_rule(p, 64);
    std::vector<std::vector<double>> vals(21, std::vector<double>(rule.nodes.size()));
    for (std::size_t k = 0; k <= 20; ++k) {
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        vals[k][i] = model.basis_eval(k, rule.nodes[i]);
      }
    }
    for (std::size_t j = 0; j <= 20; ++j) {
      for (std::size_t k = j; k <= 20; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          dot += rule.weights[i] * vals[j][i] * vals[k][i];
        }
        CAPTURE(p.alpha());
        CAPTURE(j);
        CAPTURE(k);
        CHECK(std::fabs(dot - (j == k ? 1.0 : 0.0)) < 1e-8);
      }
    }
  }
}

TEST_CASE("heat kernel: large-t limit and exact symmetry") {
  HeatKernelModel model(JacobiParams::symmetric(2.5));
  CHECK(std::fabs(model.heat_kernel(60.0, 0.42, -0.9) - 1.0) < 1e-12);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double x = unif(gen), y = unif(gen);
    for (double t : {1e-3, 0.05, 1.0}) {
      CHECK(model.heat_kernel(t, x, y) == model.heat_kernel(t, y, x));  // bitwise
    }
  }
}

TEST_CASE("heat kernel: extended-precision summation oracle") {
  // d=2 at the center, plus off-center and non-symmetric spot checks.
  struct Case {
    double alpha, beta, t, x, y;
  };
  for (const Case& c : {Case{1.0, 1.0, 0.5, 0.0, 0.0}, Case{1.0, 1.0, 0.03, 0.4, -0.2},
                        Case{0.5, 0.5, 0.01, 0.9, 0.85}, Case{0.75, 1.5, 0.1, -0.6, 0.3}}) {
    HeatKernelModel model(JacobiParams(c.alpha, c.beta));
    const double got = model.heat_kernel(c.t, c.x, c.y);
    const double want =
        static_cast<double>(oracle::heat_kernel_ld(c.alpha, c.beta, c.t, c.x, c.y));
    CAPTURE(c.alpha);
    CAPTURE(c.t);
    CHECK(std::fabs(got - want) < 1e-12 * std::max(1.0, std::fabs(want)));
  }
}

TEST_CASE("heat kernel: argument validation and truncation failure") {
  HeatKernelModel model(JacobiParams(0.5, 0.5));
  CHECK_THROWS_AS(model.heat_kernel(1e-9, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(model.heat_kernel(0.1, 1.5, 0.0), std::invalid_argument);
  TruncationPolicy tight;
  tight.k_max = 8;
  tight.k_min = 1;
  HeatKernelModel capped(JacobiParams(0.5, 0.5), tight);
  CHECK_THROWS_AS(capped.heat_kernel(1e-4, 0.0, 0.0), std::runtime_error);
  TruncationPolicy bad;
  bad.k_min = 10;
  bad.k_max = 5;
  CHECK_THROWS_AS(HeatKernelModel(JacobiParams(1.0, 1.0), bad), std::invalid_argument);
}

TEST_CASE("heat kernel: mass conservation on the spec grid") {
  for (double d : {1.0, 2.0, 3.5}) {
    const JacobiParams p = JacobiParams::symmetric(d);
    HeatKernelModel model(p);
    for (double t : {1e-3, 0.1, 1.0}) {
      for (double x : {-0.9, 0.0, 0.9}) {
        const double m256 = kernel_mass(model, p, t, x, 256);
        const double m512 = kernel_mass(model, p, t, x, 512);
        CAPTURE(d);
        CAPTURE(t);
        CAPTURE(x);
        CHECK(std::fabs(m256 - 1.0) < 1e-8);
        CHECK(std::fabs(m512 - 1.0) < 1e-8);
      }
    }
  }
  // Non-symmetric model.
  const JacobiParams q(0.75, 1.5);
  HeatKernelModel model(q);
  CHECK(std::fabs(kernel_mass(model, q, 0.01, 0.3, 512) - 1.0) < 1e-8);
}

TEST_CASE("heat kernel: Chapman-Kolmogorov") {
  for (double d : {1.0, 2.0, 3.5}) {
    const JacobiParams p = JacobiParams::symmetric(d);
    HeatKernelModel model(p);
    const GaussRule& rule = gauss_jacobi_rule(p, 512);
    const std::vector<std::pair<double, double>> pts{{-0.9, 0.3}, {0.0, 0.0}, {0.9, -0.5}};
    for (double t : {1e-3, 0.1, 1.0}) {
      for (auto [x, y] : pts) {
        double conv = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          conv += rule.weights[i] * model.heat_kernel(0.5 * t, x, rule.nodes[i]) *
                  model.heat_kernel(0.5 * t, rule.nodes[i], y);
        }
        CAPTURE(d);
        CAPTURE(t);
        CHECK(std::fabs(conv - model.heat_kernel(t, x, y)) < 1e-8);
      }
    }
  }
}

TEST_CASE("heat kernel: near-positivity of the truncation") {
  HeatKernelModel model(JacobiParams(0.5, 0.5));
  double min_val = 1e300;
  for (int i = 0; i <= 200; ++i) {
    const double x = -1.0 + 2.0 * i / 200.0;
    for (int j = 0; j <= 200; ++j) {
      const double y = -1.0 + 2.0 * j / 200.0;
      min_val = std::min(min_val, model.heat_kernel(1e-3, x, y));
    }
  }
  CHECK(min_val >= -1e-10);
}

TEST_CASE("product heat kernel multiplies factor kernels") {
  const JacobiParams f1(0.5, 0.5), f2(1.0, 1.0);
  HeatKernelModel prod(ProductJacobiParams(f1, f2));
  HeatKernelModel m1(f1), m2(f2);
  const std::vector<double> x{0.2, -0.7}, y{-0.1, 0.5};
  CHECK(prod.heat_kernel(0.05, x, y) ==
        doctest::Approx(m1.heat_kernel(0.05, x[0], y[0]) * m2.heat_kernel(0.05, x[1], y[1]))
            .epsilon(1e-14));
  const std::vector<double> bad{0.2};
  CHECK_THROWS_AS(prod.heat_kernel(0.05, bad, bad), std::invalid_argument);
  CHECK_THROWS_AS(prod.basis_eval(1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(prod.heat_kernel(0.05, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("trace: values, monotonicity, tensorization") {
  HeatKernelModel m1(JacobiParams(0.5, 0.5));
  CHECK(std::fabs(m1.trace(80.0) - 1.0) < 1e-12);
  CHECK(m1.trace(1.0) ==
        doctest::Approx(static_cast<double>(oracle::trace_ld(1.0, 1.0))).epsilon(1e-14));
  double prev = 1e300;
  for (double s : {1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0}) {
    const double tr = m1.trace(s);
    CHECK(tr >= 1.0);
    CHECK(tr < prev);
    prev = tr;
  }
  CHECK_THROWS_AS(m1.trace(0.0), std::invalid_argument);
  CHECK_THROWS_AS(m1.trace(-1.0), std::invalid_argument);

  HeatKernelModel prod(ProductJacobiParams(JacobiParams(0.5, 0.5), JacobiParams(1.0, 1.0)));
  HeatKernelModel f2(JacobiParams(1.0, 1.0));
  for (double s : {1e-3, 0.3, 2.0}) {
    CHECK(prod.trace(s) == doctest::Approx(m1.trace(s) * f2.trace(s)).epsilon(1e-14));
  }
}

TEST_CASE("trace: sandwich I(s) <= trace(s) <= I(s) + 1") {
  for (double d : {1.0, 2.0, 3.5}) {
    HeatKernelModel model(JacobiParams::symmetric(d));
    for (double ls = -6.0; ls <= 1.0; ls += 0.29) {
      const double s = std::pow(10.0, ls);
      const double tr = model.trace(s);
      const double is = sandwich_integral(d, s);
      CAPTURE(d);
      CAPTURE(s);
      CHECK(tr >= is - 1e-9 * tr);
      CHECK(tr <= is + 1.0 + 1e-9 * tr);
    }
  }
}

TEST_CASE("trace asymptotics: sqrt(s) trace -> sqrt(pi)/2") {
  for (double d : {1.0, 3.0}) {
    HeatKernelModel model(JacobiParams::symmetric(d));
    CHECK(std::fabs(model.trace_asymptotic_deviation(1e-6)) < 2e-3);
  }
  HeatKernelModel prod(ProductJacobiParams(JacobiParams(0.5, 0.5), JacobiParams(0.5, 0.5)));
  CHECK(std::fabs(prod.trace_asymptotic_deviation(1e-6)) < 5e-3);
  // The deviation shrinks as s decreases.
  HeatKernelModel m(JacobiParams::symmetric(2.0));
  CHECK(std::fabs(m.trace_asymptotic_deviation(1e-7)) <
        std::fabs(m.trace_asymptotic_deviation(1e-4)));
}

TEST_CASE("spectral constant: closed forms and the zeta(2) value") {
  CHECK(std::fabs(spectral_constant(2.0) - 1.0) < 1e-12);
  CHECK(std::fabs(spectral_constant(3.0) - 0.75) < 1e-12);
  CHECK(std::fabs(spectral_constant(5.0) - 25.0 / 48.0) < 1e-12);
  CHECK(std::fabs(spectral_constant(1.0) - kPi * kPi / 6.0) < 1e-10);
  for (int d = 2; d <= 50; ++d) {
    CAPTURE(d);
    CHECK(std::fabs(spectral_constant(d) - oracle::spectral_constant_closed(d)) < 1e-12);
  }
  // Non-integer arguments are monotone decreasing in d.
  CHECK(spectral_constant(1.5) < spectral_constant(1.2));
  CHECK_THROWS_AS(spectral_constant(0.9), std::invalid_argument);
}

TEST_CASE("trace integral identity") {
  struct Case {
    double d;
    double want;
  };
  for (const Case& c : {Case{1.0, kPi * kPi / 6.0}, Case{2.0, 1.0}, Case{4.0, 11.0 / 18.0}}) {
    HeatKernelModel model(JacobiParams::symmetric(c.d));
    const auto [lhs, rhs] = model.trace_integral_identity_check(1e-8);
    CAPTURE(c.d);
    CHECK(std::fabs(lhs - rhs) < 1e-6);
    CHECK(rhs == doctest::Approx(c.want).epsilon(1e-10));
  }
  HeatKernelModel prod(ProductJacobiParams(JacobiParams(0.5, 0.5), JacobiParams(0.5, 0.5)));
  CHECK_THROWS_AS(prod.trace_integral_identity_check(), std::invalid_argument);
  // An unreachable tolerance reports quadrature non-convergence.
  HeatKernelModel m(JacobiParams::symmetric(1.5));
  CHECK_THROWS_AS(m.trace_integral_identity_check(1e-18), std::runtime_error);
}

TEST_CASE("dispersion: bounded by 2t and stationary limit") {
  for (double d : {1.0, 2.0, 3.5}) {
    HeatKernelModel model(JacobiParams::symmetric(d));
    for (double t : {0.01, 0.1, 1.0}) {
      const double v = model.dispersion_integral(t);
      CAPTURE(d);
      CAPTURE(t);
      CHECK(v >= 0.0);
      CHECK(v <= 2.0 * t);
    }
    // Large t: kernel tends to 1, the integral to the double integral of
    // rho^2, i.e. twice the angle variance. Oracle in angle coordinates,
    // where the integrand has no endpoint derivative blow-up.
    const JacobiParams p = JacobiParams::symmetric(d);
    const GaussRule gl = gauss_legendre_rule(1024);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double th = 0.5 * kPi * (gl.nodes[i] + 1.0);
      const double w = 0.5 * kPi * gl.weights[i] * pdf(p, std::cos(th)) * std::sin(th);
      m1 += w * th;
      m2 += w * th * th;
    }
    const double stationary = 2.0 * (m2 - m1 * m1);
    CHECK(model.dispersion_integral(40.0) == doctest::Approx(stationary).epsilon(5e-6));
  }
}

TEST_CASE("dispersion: arcsine closed-form spectral oracle") {
  // For d = 1 the angle is uniform and the coefficients of arccos against
  // the basis are -2 sqrt(2) / (pi k^2) for odd k, giving
  // 2 sum_odd (1 - e^{-k^2 t}) 8 / (pi^2 k^4).
  HeatKernelModel model(JacobiParams(0.5, 0.5));
  for (double t : {0.01, 0.1, 1.0}) {
    double want = 0.0;
    for (long k = 1; k < 400001; k += 2) {
      const double kk = static_cast<double>(k);
      want += 2.0 * (1.0 - std::exp(-kk * kk * t)) * 8.0 / (kPi * kPi * kk * kk * kk * kk);
    }
    CHECK(model.dispersion_integral(t) == doctest::Approx(want).epsilon(2e-6));
  }
}

TEST_CASE("dispersion: Monte Carlo oracle at d=1, t=0.1") {
  // Draw X from the measure and Y from p_t(X, .) d mu by inverse transform
  // over the Gauss rule's cumulative kernel weights.
  const JacobiParams p(0.5, 0.5);
  HeatKernelModel model(p);
  const double t = 0.1;
  const GaussRule& rule = gauss_jacobi_rule(p, 512);
  RngState rng(0xd15bULL);
  const std::size_t pairs = 20000;
  std::vector<double> vals;
  vals.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const double x = sample_point(p, rng);
    std::vector<double> cum(rule.nodes.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      acc += rule.weights[j] * model.heat_kernel(t, x, rule.nodes[j]);
      cum[j] = acc;
    }
    const double u = rng.next_double() * acc;
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    const double y = rule.nodes[static_cast<std::size_t>(it - cum.begin())];
    const double r = intrinsic_distance(x, y);
    vals.push_back(r * r);
  }
  const auto mv = oracle::mean_var(vals);
  const double se = std::sqrt(mv.var / static_cast<double>(pairs));
  CHECK(std::fabs(model.dispersion_integral(t) - mv.mean) < 3.0 * se);
}

TEST_CASE("dispersion: product model adds factor contributions") {
  const JacobiParams f1(0.5, 0.5), f2(1.0, 1.0);
  HeatKernelModel prod(ProductJacobiParams(f1, f2));
  HeatKernelModel m1(f1), m2(f2);
  for (double t : {0.05, 0.5}) {
    CHECK(prod.dispersion_integral(t) ==
          doctest::Approx(m1.dispersion_integral(t) + m2.dispersion_integral(t)).epsilon(1e-12));
    CHECK(prod.dispersion_integral(t) <= 4.0 * t);  // 2t per factor
  }
  CHECK_THROWS_AS(prod.dispersion_integral(1e-9), std::invalid_argument);
}

TEST_CASE("matching upper bound: value, limits and rate") {
  HeatKernelModel prod(ProductJacobiParams(JacobiParams(0.5, 0.5), JacobiParams(0.5, 0.5)));
  const double n = 1000.0;
  const double t = std::log(n) / n;
  const double bound = prod.matching_upper_bound(t, 1000);
  CHECK(bound > 0.0);
  CHECK(bound < 30.0 * t);  // of order log n / n

  // Fixed t, n -> infinity: only the dispersion term survives.
  const double disp = 2.0 * prod.dispersion_integral(0.01);
  CHECK(prod.matching_upper_bound(0.01, 1u << 30) == doctest::Approx(disp).epsilon(1e-6));

  // Decreasing in n.
  CHECK(prod.matching_upper_bound(t, 2000) < prod.matching_upper_bound(t, 500));

  CHECK_THROWS_AS(prod.matching_upper_bound(1e-9, 10), std::invalid_argument);
  CHECK_THROWS_AS(prod.matching_upper_bound(0.01, 0), std::invalid_argument);
}

TEST_CASE("matching upper bound: three-factor optimized rate is ~n^(-2/3)") {
  HeatKernelModel triple(ProductJacobiParams(std::vector<JacobiParams>{
      JacobiParams(0.5, 0.5), JacobiParams(0.5, 0.5), JacobiParams(0.5, 0.5)}));
  const auto optimize = [&](std::size_t n) {
    double best = 1e300;
    for (double lt = -7.0; lt <= -0.5; lt += 0.1) {
      best = std::min(best, triple.matching_upper_bound(std::pow(10.0, lt), n));
    }
    return best;
  };
  const double b3 = optimize(1000);
  const double b6 = optimize(1000000);
  const double ratio = b6 / b3;
  const double want = std::pow(1e-3, 2.0 / 3.0);
  CHECK(ratio / want > 0.5);
  CHECK(ratio / want < 2.0);
}

TEST_CASE("discretized generator: L J_k = -lambda_k J_k via finite differences") {
  // Symmetric operator (1-x^2) f'' - d x f' on a cosine-spaced grid,
  // non-uniform three-point stencils, interior points |x| <= 0.95.
  const double d = 2.5;
  const JacobiParams p = JacobiParams::symmetric(d);
  HeatKernelModel model(p);
  const int m = 4000;
  std::vector<double> xs(m + 1);
  for (int j = 0; j <= m; ++j) xs[j] = std::cos(kPi * j / m);
  for (std::size_t k = 1; k <= 10; ++k) {
    std::vector<double> fv(m + 1);
    for (int j = 0; j <= m; ++j) fv[j] = model.basis_eval(k, xs[j]);
    double max_err = 0.0, max_ref = 0.0;
    for (int j = 1; j < m; ++j) {
      const double x = xs[j];
      if (std::fabs(x) > 0.95) continue;
      const double hm = xs[j] - xs[j + 1];  // grid descends in x
      const double hp = xs[j - 1] - xs[j];
      const double fm = fv[j + 1], f0 = fv[j], fp = fv[j - 1];
      const double d1 = (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) /
                        (hm * hp * (hm + hp));
      const double d2 = 2.0 * (hm * fp + hp * fm - (hm + hp) * f0) / (hm * hp * (hm + hp));
      const double lhs = (1.0 - x * x) * d2 - d * x * d1;
      const double rhs = -eigenvalue(p, k) * f0;
      max_err = std::max(max_err, std::fabs(lhs - rhs));
      max_ref = std::max(max_ref, std::fabs(rhs));
    }
    CAPTURE(k);
    CHECK(max_err / max_ref < 1e-4);
  }
}
