#include <catch2/catch_amalgamated.hpp>

#include "chronolab/bosonic_ring.hpp"

using namespace chronolab;
namespace ring = chronolab::ring;

TEST_CASE("gpe: uniform ground state above threshold") {
  ring::RingGrid g{128};
  ring::GPEParams p;
  p.gamma = -5.0;  // above -pi^2: uniform remains the minimum
  auto st = ring::gpe_ground_state(p, g);
  REQUIRE(std::abs(st.phi.squaredNorm() * g.dx() - 1.0) < 1e-10);
  REQUIRE(st.mu == Catch::Approx(p.gamma).margin(1e-5));
  REQUIRE(ring::density_contrast(st) == Catch::Approx(1.0).margin(1e-4));
}

TEST_CASE("gpe: soliton regime matches the sech profile") {
  ring::RingGrid g{256};
  ring::GPEParams p;
  p.gamma = -15.0;
  auto st = ring::gpe_ground_state(p, g);
  REQUIRE(ring::density_contrast(st) > 1.5);

  // center the comparison profile on the numerical density maximum
  int kmax = 0;
  for (int k = 1; k < g.M; ++k)
    if (std::norm(st.phi[k]) > std::norm(st.phi[kmax])) kmax = k;
  auto sol = ring::soliton_profile(p.gamma, g.x(kmax), g);
  REQUIRE(ring::state_overlap(st, sol) >= 0.99);
}

TEST_CASE("gpe: invalid parameters rejected") {
  ring::RingGrid tiny{16};
  ring::GPEParams p;
  REQUIRE_THROWS_AS(ring::gpe_ground_state(p, tiny), contract_error);
  ring::RingGrid g{64};
  p.tol = -1.0;
  REQUIRE_THROWS_AS(ring::gpe_ground_state(p, g), contract_error);
}

TEST_CASE("soliton profile: symmetry, norm, width scaling") {
  ring::RingGrid g{512};
  auto st = ring::soliton_profile(-15.0, 0.5, g);
  REQUIRE(std::abs(st.phi.squaredNorm() * g.dx() - 1.0) < 1e-12);
  // symmetric about x_cm
  int c = g.M / 2;
  for (int d = 1; d < g.M / 4; ++d)
    REQUIRE(std::abs(st.phi[c + d] - st.phi[c - d]) < 1e-12);

  // half-maximum width halves when |gamma| doubles
  auto width = [&](double gamma) {
    auto s = ring::soliton_profile(gamma, 0.5, g);
    double half = std::abs(s.phi[c]) / 2;
    int d = 0;
    while (std::abs(s.phi[c + d]) > half) ++d;
    return static_cast<double>(d);
  };
  REQUIRE(width(-15.0) / width(-30.0) == Catch::Approx(2.0).epsilon(0.05));

  REQUIRE_THROWS_AS(ring::soliton_profile(1.0, 0.5, g), contract_error);
}

TEST_CASE("symmetry-breaking threshold sits at -pi^2") {
  ring::RingGrid g{128};
  double th = ring::find_threshold(g, -14.0, -6.0, 0.02);
  REQUIRE(th == Catch::Approx(-M_PI * M_PI).epsilon(0.05));
  REQUIRE_THROWS_AS(ring::find_threshold(g, -5.0, -4.0), contract_error);
}

TEST_CASE("cm current and rotation period") {
  REQUIRE(ring::cm_current(3, 12, 2 * M_PI * 3 / 12) ==
          Catch::Approx(0.0).margin(1e-15));
  REQUIRE(ring::cm_current(10, 10, 1.0) == Catch::Approx(2 * M_PI - 1.0));
  REQUIRE(ring::rotation_period(10, 1.0) ==
          Catch::Approx(1.0 / (2 * M_PI - 1.0)));
  REQUIRE_THROWS_AS(ring::cm_current(1, 0, 0.0), contract_error);
}

TEST_CASE("cm spreading: free-particle width and crossing time") {
  auto e0 = ring::cm_spreading(0.05, 100, 0.0);
  REQUIRE(e0.sigma == Catch::Approx(0.05));

  // asymptote t/(N sigma0), linear in t and inversely proportional to N
  double t = 1e5;
  auto ea = ring::cm_spreading(0.05, 100, t);
  REQUIRE(ea.sigma == Catch::Approx(t / (100 * 0.05)).epsilon(1e-4));
  auto eb = ring::cm_spreading(0.05, 200, t);
  REQUIRE(ea.sigma / eb.sigma == Catch::Approx(2.0).epsilon(1e-3));

  // t_c grows linearly with N at fixed sigma0
  double t1 = ring::cm_spreading(0.1, 50, 0).t_c;
  double t2 = ring::cm_spreading(0.1, 150, 0).t_c;
  REQUIRE(t2 / t1 == Catch::Approx(3.0).epsilon(1e-9));
  // and sigma(t_c) = 1
  REQUIRE(ring::cm_spreading(0.1, 50, t1).sigma == Catch::Approx(1.0));

  REQUIRE_THROWS_AS(ring::cm_spreading(-0.1, 10, 0.0), contract_error);
}

TEST_CASE("state csv header") {
  ring::RingGrid g{64};
  auto st = ring::soliton_profile(-12.0, 0.25, g);
  auto text = ring::state_csv(st);
  REQUIRE(text.rfind("x,re,im,density\n", 0) == 0);
}
