#include "phicurv/jet.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

using namespace phicurv;

namespace {

MultiIndex mi(std::initializer_list<int> exps) {
  MultiIndex m{};
  int i = 0;
  for (int e : exps) {
    m.e[i++] = static_cast<std::uint8_t>(e);
    m.deg += static_cast<std::uint8_t>(e);
  }
  return m;
}

// Independent truncated convolution used as the product-rule oracle.
std::vector<double> convolve(const JetSpace& sp, std::span<const double> a,
                             std::span<const double> b) {
  std::vector<double> out(sp.size(), 0.0);
  for (int ra = 0; ra < sp.size(); ++ra) {
    for (int rb = 0; rb < sp.size(); ++rb) {
      MultiIndex sum = sp.index(ra);
      bool ok = true;
      for (int v = 0; v < sp.dim(); ++v) sum.e[v] += sp.index(rb).e[v];
      sum.deg += sp.index(rb).deg;
      if (sum.deg > sp.order()) ok = false;
      if (ok) out[sp.rank(sum)] += a[ra] * b[rb];
    }
  }
  return out;
}

Jet random_jet(const JetSpaceRef& sp, std::vector<double> base, std::mt19937& rng,
               double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Jet j(sp, std::move(base));
  for (int r = 0; r < sp->size(); ++r) j.set_coeff(r, dist(rng));
  return j;
}

}  // namespace

TEST_CASE("lift_variable produces the identity jet") {
  Jet j = lift_variable(0, {2.0, 3.0}, JetConfig{2, 2});
  CHECK(j.coeff(mi({0, 0})) == 2.0);
  CHECK(j.coeff(mi({1, 0})) == 1.0);
  CHECK(j.coeff(mi({0, 1})) == 0.0);
  CHECK(j.coeff(mi({2, 0})) == 0.0);
  CHECK_THROWS_AS(lift_variable(2, {0.0, 0.0}, JetConfig{2, 2}), Error);
}

TEST_CASE("monomial x2^4 has a single coefficient") {
  Jet x2 = lift_variable(1, {0.0, 0.0}, JetConfig{4, 2});
  Jet p = pow(x2, 4L);
  auto sp = p.space();
  for (int r = 0; r < sp->size(); ++r) {
    if (sp->index(r) == mi({0, 4}))
      CHECK(p.coeff(r) == 1.0);
    else
      CHECK(p.coeff(r) == 0.0);
  }
}

TEST_CASE("exp jet at 1 matches the factorial closed form") {
  Jet x = lift_variable(0, {1.0}, JetConfig{3, 1});
  Jet e = exp(x);
  const double ev = std::exp(1.0);
  // Oracle: d^k/dx^k exp = exp, Taylor coefficient exp(1)/k!.
  double fact = 1.0;
  for (int k = 0; k <= 3; ++k) {
    if (k > 1) fact *= k;
    CHECK(e.coeff(k) == doctest::Approx(ev / fact).epsilon(1e-15));
  }
}

TEST_CASE("sin jet at 0 matches the Maclaurin series") {
  Jet x = lift_variable(0, {0.0}, JetConfig{3, 1});
  Jet s = sin(x);
  CHECK(s.coeff(0) == doctest::Approx(0.0));
  CHECK(s.coeff(1) == doctest::Approx(1.0));
  CHECK(s.coeff(2) == doctest::Approx(0.0));
  CHECK(s.coeff(3) == doctest::Approx(-1.0 / 6.0));
}

TEST_CASE("x*x at base 3 gives (9, 6, 1)") {
  Jet x = lift_variable(0, {3.0}, JetConfig{2, 1});
  Jet p = x * x;
  CHECK(p.coeff(0) == 9.0);
  CHECK(p.coeff(1) == 6.0);
  CHECK(p.coeff(2) == 1.0);
}

TEST_CASE("1/(1+x) at 0 is the geometric series") {
  auto cfg = JetConfig{3, 1};
  Jet one = jet_constant(jet_space(cfg), {0.0}, 1.0);
  Jet x = lift_variable(0, {0.0}, cfg);
  Jet q = one / (one + x);
  for (int k = 0; k <= 3; ++k)
    CHECK(q.coeff(k) == doctest::Approx((k % 2 == 0) ? 1.0 : -1.0).epsilon(1e-15));
}

TEST_CASE("product rule equals the coefficient convolution") {
  auto sp = jet_space(3, 4);
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    Jet a = random_jet(sp, {0.1, -0.2, 0.4}, rng);
    Jet b = random_jet(sp, {0.1, -0.2, 0.4}, rng);
    Jet p = a * b;
    auto oracle = convolve(*sp, a.coeffs(), b.coeffs());
    for (int r = 0; r < sp->size(); ++r)
      CHECK(p.coeff(r) == doctest::Approx(oracle[r]).epsilon(1e-14));
  }
}

TEST_CASE("chain rule: composed elementary calls match analytic derivatives") {
  // f(x) = sin(exp(x)) at x0; derivatives worked out by hand.
  const double x0 = 0.3;
  Jet x = lift_variable(0, {x0}, JetConfig{3, 1});
  Jet f = sin(exp(x));
  const double u = std::exp(x0);
  const double d1 = std::cos(u) * u;
  const double d2 = -std::sin(u) * u * u + std::cos(u) * u;
  const double d3 =
      -std::cos(u) * u * u * u - 3.0 * std::sin(u) * u * u + std::cos(u) * u;
  CHECK(f.coeff(0) == doctest::Approx(std::sin(u)).epsilon(1e-13));
  CHECK(f.coeff(1) == doctest::Approx(d1).epsilon(1e-13));
  CHECK(f.coeff(2) == doctest::Approx(d2 / 2.0).epsilon(1e-13));
  CHECK(f.coeff(3) == doctest::Approx(d3 / 6.0).epsilon(1e-13));
}

TEST_CASE("jet first derivatives agree with central finite differences") {
  // For every elementary function, compare the jet derivative of F(c + s*t)
  // against a second-order central difference in t.
  struct Case {
    const char* name;
    double (*fn)(double);
    Jet (*jfn)(const Jet&);
    double base;
  };
  const Case cases[] = {
      {"sin", std::sin, static_cast<Jet (*)(const Jet&)>(phicurv::sin), 0.4},
      {"cos", std::cos, static_cast<Jet (*)(const Jet&)>(phicurv::cos), 0.4},
      {"exp", std::exp, static_cast<Jet (*)(const Jet&)>(phicurv::exp), 0.4},
      {"log", std::log, static_cast<Jet (*)(const Jet&)>(phicurv::log), 1.7},
      {"sqrt", std::sqrt, static_cast<Jet (*)(const Jet&)>(phicurv::sqrt), 1.7},
      {"atan", std::atan, static_cast<Jet (*)(const Jet&)>(phicurv::atan), 0.4},
  };
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  for (const auto& c : cases) {
    CAPTURE(c.name);
    for (int trial = 0; trial < 5; ++trial) {
      const double s = dist(rng);
      Jet t = lift_variable(0, {0.0}, JetConfig{2, 1});
      Jet arg = s * t + c.base;
      Jet value = c.jfn(arg);
      const double jet_deriv = value.coeff(1);
      for (double h : {1e-3, 1e-4}) {
        const double fd = (c.fn(c.base + s * h) - c.fn(c.base - s * h)) / (2.0 * h);
        const double rel = std::abs(fd - jet_deriv) / (std::abs(jet_deriv) + 1.0);
        CHECK(rel <= 100.0 * h * h);
      }
    }
  }
}

TEST_CASE("polynomial arithmetic is coefficient-exact") {
  // (x1 + 2)^2 * (x2 - 1) expanded at base (0.5, -1.5); oracle expands the
  // shifted polynomial with exact dyadic arithmetic.
  auto cfg = JetConfig{4, 2};
  Jet x1 = lift_variable(0, {0.5, -1.5}, cfg);
  Jet x2 = lift_variable(1, {0.5, -1.5}, cfg);
  Jet p = pow(x1 + 2.0, 2L) * (x2 - 1.0);
  // In u = x1 - 0.5, v = x2 + 1.5: (u + 2.5)^2 (v - 2.5).
  const double a = 2.5, b = -2.5;
  auto sp = p.space();
  auto expect = [&](int du, int dv) -> double {
    double cu = (du == 0) ? a * a : (du == 1) ? 2.0 * a : (du == 2) ? 1.0 : 0.0;
    double cv = (dv == 0) ? b : (dv == 1) ? 1.0 : 0.0;
    return cu * cv;
  };
  for (int r = 0; r < sp->size(); ++r) {
    const auto& m = sp->index(r);
    CHECK(p.coeff(r) == expect(m.e[0], m.e[1]));  // bit-exact
  }
}

TEST_CASE("deriv applies the multi-factorial") {
  Jet x = lift_variable(0, {0.0, 0.0}, JetConfig{4, 2});
  Jet y = lift_variable(1, {0.0, 0.0}, JetConfig{4, 2});
  Jet p = pow(x, 3L) * y;
  CHECK(p.deriv(mi({3, 1})) == 6.0);
  CHECK(p.coeff(mi({3, 1})) == 1.0);
}

TEST_CASE("partial derivative shifts the coefficient table") {
  Jet x = lift_variable(0, {0.7}, JetConfig{4, 1});
  Jet p = pow(x, 4L);
  Jet dp = partial(p, 0);
  Jet expected = 4.0 * pow(x, 3L);
  for (int r = 0; r + 1 < p.space()->size(); ++r)
    CHECK(dp.coeff(r) == doctest::Approx(expected.coeff(r)).epsilon(1e-14));
  // Top coefficient is zeroed, not trusted.
  CHECK(dp.coeff(p.space()->size() - 1) == 0.0);
}

TEST_CASE("error paths") {
  auto cfg = JetConfig{3, 1};
  Jet zero = jet_constant(jet_space(cfg), {0.0}, 0.0);
  Jet one = jet_constant(jet_space(cfg), {0.0}, 1.0);
  CHECK_THROWS_AS((void)(one / zero), Error);
  CHECK_THROWS_AS((void)log(zero), Error);
  CHECK_THROWS_AS((void)sqrt(zero - 1.0), Error);
  Jet other = jet_constant(jet_space(cfg), {1.0}, 1.0);
  CHECK_THROWS_AS((void)(one + other), Error);
  try {
    (void)(one / zero);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DivisionByZeroJet);
  }
}

TEST_CASE("jet_apply dispatch mirrors the free functions") {
  auto cfg = JetConfig{3, 1};
  Jet x = lift_variable(0, {0.25}, cfg);
  Jet args[2] = {x, jet_constant(jet_space(cfg), {0.25}, 2.0)};
  Jet p = jet_apply(JetOp::Pow, std::span<const Jet>(args, 2));
  Jet q = pow(x, 2L);
  for (int r = 0; r < p.space()->size(); ++r)
    CHECK(p.coeff(r) == doctest::Approx(q.coeff(r)));
  Jet bad_exp = lift_variable(0, {0.25}, cfg);
  Jet args2[2] = {x, bad_exp};
  CHECK_THROWS_AS((void)jet_apply(JetOp::Pow, std::span<const Jet>(args2, 2)), Error);
}
