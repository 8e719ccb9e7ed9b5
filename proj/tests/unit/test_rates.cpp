#include <doctest.h>

#include <bit>
#include <cmath>

#include "kclg/hyperplane.hpp"
#include "kclg/rates.hpp"

using namespace kclg;

namespace {

// Configuration on a torus of side n holding `bits` at sites -(offset), ..., wrapping.
Configuration window_config(int n, int offset, std::uint32_t bits, int width) {
  Configuration eta(Geometry::torus(1, n));
  for (int t = 0; t < width; ++t) {
    if ((bits >> t) & 1u) eta.set(static_cast<std::size_t>(((t - offset) % n + n) % n), true);
  }
  return eta;
}

// Brute-force Bernoulli expectation of a window function over `width` sites.
template <class F>
double bernoulli_expectation(double rho, int width, F&& f) {
  double s = 0.0;
  for (std::uint32_t w = 0; w < (1u << width); ++w) {
    const int ones = std::popcount(w);
    s += std::pow(rho, ones) * std::pow(1.0 - rho, width - ones) * f(w);
  }
  return s;
}

}  // namespace

TEST_CASE("porous-medium constraints") {
  const auto pm2 = RateModel::porous_medium(2);
  const auto pm3 = RateModel::porous_medium(3);
  const auto g = Geometry::torus(1, 8);
  // η(x-1)=1, η(x+2)=0 with x = 2
  CHECK(kinetic_constraint(pm2, Configuration::from_bits(g, "01000000"), Site{2}, 0) == 1.0);
  CHECK(kinetic_constraint(pm2, Configuration::from_bits(g, "00110000"), Site{2}, 0) == 0.0);
  CHECK(kinetic_constraint(pm2, Configuration::from_bits(g, "01001000"), Site{2}, 0) == 2.0);
  // m=3: η(x-1)=η(x+2)=1, the rest of the window empty, x = 3
  CHECK(kinetic_constraint(pm3, Configuration::from_bits(g, "00100100"), Site{3}, 0) == 1.0);
  // η(x-2)η(x-1) + η(x+2)η(x+3)
  CHECK(kinetic_constraint(pm3, Configuration::from_bits(g, "01100110"), Site{3}, 0) == 3.0);
}

TEST_CASE("bond exchange rates") {
  const auto pm2 = RateModel::porous_medium(2);
  const auto eta = Configuration::from_bits(Geometry::torus(1, 6), "110000");
  CHECK(bond_exchange_rate(pm2, eta, Site{1}, 0) == 1.0);
  CHECK(bond_exchange_rate(pm2, eta, Site{0}, 0) == 0.0);
  CHECK(bond_exchange_rate(RateModel::ssep(), eta, Site{3}, 0) == 0.0);
  CHECK(bond_exchange_rate(RateModel::ssep(), eta, Site{1}, 0) == 0.5);

  // Perturbed θ=1, N=100: empty constraint window gives N^{θ-2}/(2d).
  const auto pert = RateModel::perturbed(2, 1.0, 100);
  Configuration lone(Geometry::torus(1, 100));
  lone.set(50, true);
  CHECK(bond_exchange_rate(pert, lone, Site{50}, 0) == doctest::Approx(0.01 * 0.5));
  CHECK(pert.ssep_prefactor() == doctest::Approx(0.01));

  // Box: the simple-exclusion part is 1 per bond.
  const auto box = Configuration::from_bits(Geometry::box(6), "100000");
  CHECK(bond_exchange_rate(RateModel::ssep(), box, Site{1}, 0) == 1.0);
  CHECK(bond_exchange_rate(pm2, box, Site{1}, 0) == 0.0);
}

TEST_CASE("rates are symmetric under the exchange they drive") {
  for (const auto& model : {RateModel::porous_medium(2), RateModel::porous_medium(3), RateModel::ssep(),
                            RateModel::perturbed(2, 0.5, 7)}) {
    for (const auto& g : {Geometry::torus(1, 7), Geometry::box(7)}) {
      for (int k = 0; k <= 7; ++k) {
        for (const auto& eta : enumerate_hyperplane(g, k)) {
          for (std::size_t i = 0; i + (g.is_torus() ? 0 : 1) < g.volume(); ++i) {
            const Site x = g.site(i);
            const Site y = g.shift(x, 0, 1);
            const double c = kinetic_constraint(model, eta, x, 0);
            const auto flipped = eta.swapped(x, y);
            CHECK(c == kinetic_constraint(model, flipped, x, 0));
            CHECK(bond_exchange_rate(model, eta, x, 0) == bond_exchange_rate(model, flipped, x, 0));
          }
        }
      }
    }
  }
}

TEST_CASE("two-dimensional constraint uses the bond axis") {
  const auto g = Geometry::torus(2, 5);
  Configuration eta(g);
  eta.set(g.index(Site{0, 2}), true);  // x - e_1 for x = (1, 2)
  const auto pm2 = RateModel::porous_medium(2);
  CHECK(kinetic_constraint(pm2, eta, Site{1, 2}, 0) == 1.0);
  CHECK(kinetic_constraint(pm2, eta, Site{1, 2}, 1) == 0.0);
  CHECK(bond_exchange_rate(RateModel::ssep(), eta, Site{0, 2}, 1) == 0.25);
}

TEST_CASE("window tables match direct evaluation") {
  for (const auto& model : {RateModel::porous_medium(2), RateModel::porous_medium(3), RateModel::ssep(),
                            RateModel::perturbed(3, 1.0, 12)}) {
    const auto g = Geometry::torus(1, 12);
    const BondSystem bonds(g, model.reach());
    const RateTable table(model, g);
    for (const auto& eta : enumerate_hyperplane(g, 5)) {
      for (std::size_t b = 0; b < bonds.bond_count(); ++b) {
        CHECK(table[bonds.pack(b, eta)] == bond_exchange_rate(model, eta, g.site(bonds.left(b)), bonds.axis(b)));
      }
    }
  }
}

TEST_CASE("current and local functions") {
  const auto pm2 = RateModel::porous_medium(2);
  // windows (η(-1), η(0), η(1), η(2)) placed at sites 7, 0, 1, 2 of a torus of side 8
  auto w = [](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return window_config(8, 1, a | (b << 1) | (c << 2) | (d << 3), 4);
  };
  CHECK(current(pm2, w(1, 1, 0, 0), Site{0}, 0) == 1.0);
  CHECK(current(pm2, w(0, 1, 0, 0), Site{0}, 0) == 0.0);
  CHECK(current(pm2, w(1, 0, 1, 0), Site{0}, 0) == -1.0);
  CHECK(local_h(w(1, 1, 0, 0), Site{0}, 0) == 1);
  CHECK(local_h(w(0, 0, 0, 0), Site{0}, 0) == 0);
  CHECK(local_g(w(0, 0, 0, 0), Site{0}, 0) == 0);
  CHECK(local_g(w(1, 1, 0, 0), Site{0}, 0) == 1);
  CHECK_THROWS_AS(current(RateModel::ssep(), w(1, 1, 0, 0), Site{0}, 0), PreconditionError);
}

TEST_CASE("gradient identity on every window") {
  const auto pm2 = RateModel::porous_medium(2);
  for (std::uint32_t bits = 0; bits < 16; ++bits) {
    const auto eta = window_config(8, 1, bits, 4);
    const int w = static_cast<int>(current(pm2, eta, Site{0}, 0));
    CHECK(w == local_h(eta, Site{0}, 0) - local_h(eta, Site{1}, 0));
  }
}

TEST_CASE("expected local functions against Bernoulli sums") {
  for (double rho = 0.1; rho < 0.95; rho += 0.1) {
    const double h = bernoulli_expectation(rho, 4, [](std::uint32_t w) {
      return static_cast<double>(local_h(window_config(8, 1, w, 4), Site{0}, 0));
    });
    const double g = bernoulli_expectation(rho, 4, [](std::uint32_t w) {
      return static_cast<double>(local_g(window_config(8, 1, w, 4), Site{0}, 0));
    });
    CHECK(expected_local(LocalName::h, rho, 2) == doctest::Approx(h).epsilon(1e-12));
    CHECK(expected_local(LocalName::g, rho, 2) == doctest::Approx(g).epsilon(1e-12));
  }
  CHECK(expected_local(LocalName::h, 0.5, 2) == 0.25);
  CHECK(expected_local(LocalName::g, 0.5, 2) == 0.5);
  CHECK(expected_local(LocalName::h, 0.0, 2) == 0.0);
  CHECK(expected_local(LocalName::h, 1.0, 2) == 1.0);
  CHECK_THROWS_AS(expected_local(LocalName::h, 1.5, 2), PreconditionError);
}

TEST_CASE("gradient decompositions") {
  SUBCASE("m=2 reproduces h_1") {
    const auto d = find_gradient_decomposition(RateModel::porous_medium(2));
    REQUIRE(d.has_value());
    CHECK(d->max_residual(RateModel::porous_medium(2)) == Rational(0));
    for (std::uint32_t bits = 0; bits < 8; ++bits) {
      CHECK(d->values[bits] == Rational(local_h(window_config(8, 1, bits, 3), Site{0}, 0)));
    }
  }
  SUBCASE("m=3 has an exact solution") {
    const auto model = RateModel::porous_medium(3);
    const auto d = find_gradient_decomposition(model);
    REQUIRE(d.has_value());
    CHECK(d->values.size() == 32);
    CHECK(d->max_residual(model) == Rational(0));
    // independent replay on a torus: W_{0,1} = h(window at 0) - h(window at 1)
    for (std::uint32_t bits = 0; bits < 64; ++bits) {
      const auto eta = window_config(12, 2, bits, 6);
      auto h_at = [&](int x) {
        std::uint32_t w = 0;
        for (int s = 0; s < 5; ++s) w |= static_cast<std::uint32_t>(eta(Site{((x - 2 + s) % 12 + 12) % 12})) << s;
        return (*d)(w);
      };
      CHECK(Rational(static_cast<std::int64_t>(current(model, eta, Site{0}, 0))) == h_at(0) - h_at(1));
    }
  }
  SUBCASE("least-norm gauge also solves") {
    const auto model = RateModel::porous_medium(3);
    const auto d = find_gradient_decomposition(model, GaugeChoice::least_norm);
    REQUIRE(d.has_value());
    CHECK(d->max_residual(model) == Rational(0));
  }
  SUBCASE("simple exclusion") {
    const auto d = find_gradient_decomposition(RateModel::ssep());
    REQUIRE(d.has_value());
    CHECK(d->values == std::vector<Rational>{0, 1});
  }
  CHECK_THROWS_AS(find_gradient_decomposition(RateModel::perturbed(2, 1.0, 10)), PreconditionError);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(RateModel::porous_medium(4), PreconditionError);
  CHECK_THROWS_AS(RateModel::porous_medium(2).validate_for(Geometry::torus(1, 3)), PreconditionError);
  CHECK_NOTHROW(RateModel::porous_medium(2).validate_for(Geometry::torus(1, 4)));
  CHECK_THROWS_AS(RateModel::porous_medium(3).validate_for(Geometry::torus(1, 5)), PreconditionError);
  CHECK(RateModel::porous_medium(2).name() == "pm2");
  CHECK(RateModel::perturbed(2, 1.0, 512).name() == "pm2+ssep(theta=1,N=512)");
}
