#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kraichnan/quadrature.hpp"
#include "kraichnan/special_functions.hpp"

using namespace kraichnan;

TEST_CASE("adaptive GK on smooth integrands") {
  auto q = integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  CHECK(q.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  auto g = integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0, 1e-12);
  CHECK(g.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("adaptive GK handles integrable endpoint singularity") {
  auto q = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
  CHECK(q.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("CVZ acceleration of alternating series") {
  std::vector<double> inv_k, leibniz;
  for (int k = 0; k < 24; ++k) {
    inv_k.push_back(1.0 / (k + 1.0));
    leibniz.push_back(1.0 / (2.0 * k + 1.0));
  }
  CHECK(cvz_alternating(inv_k) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(cvz_alternating(leibniz) == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
}

TEST_CASE("oscillatory cosine tail against the Poisson-kernel closed form") {
  // \int_0^inf cos(a r)/(1+r^2) dr = (pi/2) e^{-a}
  for (double a : {0.7, 2.0, 6.0}) {
    auto g = [](double r) { return 1.0 / (1.0 + r * r); };
    const double z0 = (M_PI / 2.0) / a;  // first zero of cos(a r)
    auto head = integrate([&](double r) { return g(r) * std::cos(a * r); }, 0.0, z0, 1e-13);
    auto tail = osc_cos_tail(g, z0, a, 1e-13);
    CHECK(head.value + tail.value ==
          doctest::Approx(M_PI / 2.0 * std::exp(-a)).epsilon(1e-10));
  }
}

TEST_CASE("oscillatory tail is consistent across split points (slow decay)") {
  // g = r^{-3/2}: absolutely convergent but far too slow for naive truncation
  auto g = [](double r) { return std::pow(r, -1.5); };
  for (double a : {0.05, 1.0, 20.0}) {
    auto t1 = osc_cos_tail(g, 1.0, a, 1e-12);
    auto head = integrate_panels([&](double r) { return g(r) * std::cos(a * r); },
                                 {1.0, 2.0, 4.0, 7.0}, 1e-13);
    auto t2 = osc_cos_tail(g, 7.0, a, 1e-12);
    CHECK(t1.value == doctest::Approx(head.value + t2.value).epsilon(1e-8));
  }
}

TEST_CASE("Gauss-Chebyshev rule with the exact weight") {
  // \int_0^1 u^2 (1-u^2)^{-1/2} du = pi/4 ; same for 1-u^2
  auto q1 = gauss_chebyshev_01([](double u) { return u * u; });
  auto q2 = gauss_chebyshev_01([](double u) { return 1.0 - u * u; });
  CHECK(q1.value == doctest::Approx(M_PI / 4.0).epsilon(1e-13));
  CHECK(q2.value == doctest::Approx(M_PI / 4.0).epsilon(1e-13));
}

TEST_CASE("exponential integral E1") {
  // quadrature oracle on both branches of the implementation
  for (double x : {0.05, 0.3, 0.9, 1.1, 4.0, 30.0}) {
    auto oracle = integrate([](double t) { return std::exp(-t) / t; }, x,
                            x + 60.0, 1e-14);
    CHECK(expint_e1(x) == doctest::Approx(oracle.value).epsilon(1e-12));
  }
  // one pinned reference value
  CHECK(expint_e1(1.0) == doctest::Approx(0.21938393439552026).epsilon(1e-13));
  CHECK(std::isinf(expint_e1(0.0)));
}

TEST_CASE("Riesz normalization gamma_{2 beta}") {
  // gamma_1 = pi * 2 * Gamma(1/2)/Gamma(1/2) = 2 pi
  CHECK(riesz_gamma(0.5) == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
  CHECK_THROWS_AS(riesz_gamma(1.0), std::domain_error);
}
