#include <doctest.h>

#include <cmath>
#include <sstream>
#include <tuple>

#include "qkd/error.hpp"
#include "qkd/scan.hpp"

using namespace qkd;

namespace {

ScanConfig nondecoy(MuPolicy mu = MuPolicy::automatic()) {
  ScanConfig c;
  c.mode = Mode::nondecoy;
  c.mu = mu;
  return c;
}

ScanConfig decoy(MuPolicy mu = MuPolicy::automatic()) {
  ScanConfig c;
  c.mode = Mode::decoy;
  c.mu = mu;
  return c;
}

}  // namespace

TEST_CASE("distance grid") {
  const auto g = distance_grid(0.0, 10.0, 2.5);
  REQUIRE(g.size() == 5);
  CHECK(g.back() == 10.0);
  CHECK(distance_grid(3.0, 3.0, 1.0).size() == 1);
  CHECK(distance_grid(0.0, 1.0, 0.1).size() == 11);
  CHECK_THROWS_AS(distance_grid(0.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(distance_grid(2.0, 1.0, 0.5), DomainError);
}

TEST_CASE("non-decoy sweep uses mu = eta") {
  const auto& gys = builtin_setup("GYS");
  const auto grid = distance_grid(0.0, 30.0, 5.0);
  const auto pts = sweep(gys, nondecoy(), grid);
  REQUIRE(pts.size() == grid.size());
  CHECK(pts[0].mu_used == 0.045);
  for (const auto& p : pts) {
    CHECK(p.mu_used == doctest::Approx(transmittance(gys, p.distance_km)));
    CHECK(p.status == PointStatus::ok);
    CHECK(p.R_gllp <= p.R_lutkenhaus);
  }
}

TEST_CASE("fixed mu = 0.1 on GYS is PNS-insecure everywhere") {
  const auto pts = sweep(builtin_setup("GYS"), nondecoy(MuPolicy::fixed(0.1)),
                         distance_grid(0.0, 200.0, 1.0));
  for (const auto& p : pts) {
    REQUIRE(p.status == PointStatus::pns_insecure);
    REQUIRE(p.R_gllp == 0.0);
    REQUIRE(p.R_lutkenhaus == 0.0);
    REQUIRE(std::isnan(p.Q1_bound));
  }
  CHECK_THROWS_AS(max_distance(builtin_setup("GYS"), nondecoy(MuPolicy::fixed(0.1)), Scheme::gllp),
                  NoPositiveRateError);
}

TEST_CASE("sweep rejects bad grids") {
  const auto& s = builtin_setup("KTH");
  const std::vector<double> empty;
  const std::vector<double> unsorted{0.0, 5.0, 3.0};
  CHECK_THROWS_AS(sweep(s, nondecoy(), empty), DomainError);
  CHECK_THROWS_AS(sweep(s, nondecoy(), unsorted), DomainError);
}

TEST_CASE("optimal intensity") {
  const auto& gys = builtin_setup("GYS");
  SUBCASE("non-decoy optimum against a brute-force scan and the mu = eta rule") {
    for (const auto& [name, d, tol] : {std::tuple{"GYS", 20.0, 0.45}, std::tuple{"KTH", 10.0, 0.2},
                                       std::tuple{"G13", 10.0, 0.2}}) {
      const auto& s = builtin_setup(name);
      const auto cfg = nondecoy();
      const double eta = transmittance(s, d);
      const double mu = optimal_mu(s, d, cfg, Scheme::lutkenhaus);
      double brute_mu = 0.0;
      double brute_r = -1.0;
      for (int k = 1; k <= 20000; ++k) {
        const double m = 3.0 * eta * k / 20000.0;
        const double r = signed_rate(s, d, m, cfg, Scheme::lutkenhaus);
        if (r > brute_r) {
          brute_r = r;
          brute_mu = m;
        }
      }
      INFO(name);
      CHECK(std::abs(mu - brute_mu) < 1e-4);
      CHECK(signed_rate(s, d, mu, cfg, Scheme::lutkenhaus) >= brute_r * (1.0 - 1e-9));
      // GYS, with its large misalignment error, optimizes near 0.6 eta.
      CHECK(std::abs(mu - eta) / eta < tol);
    }
  }
  SUBCASE("decoy optimum at 0 km") {
    const double mu = optimal_mu(gys, 0.0, decoy(), Scheme::gllp);
    CHECK(mu > 0.3);
    CHECK(mu < 0.7);
    // Local optimality to the stated tolerance.
    const auto cfg = decoy();
    const double r = signed_rate(gys, 0.0, mu, cfg, Scheme::gllp);
    CHECK(r >= signed_rate(gys, 0.0, mu - 1e-3, cfg, Scheme::gllp));
    CHECK(r >= signed_rate(gys, 0.0, mu + 1e-3, cfg, Scheme::gllp));
  }
  SUBCASE("beyond the cutoff") {
    CHECK_THROWS_AS(optimal_mu(gys, 400.0, decoy(), Scheme::gllp), NoPositiveRateError);
    CHECK_THROWS_AS(optimal_mu(gys, 100.0, nondecoy(), Scheme::gllp), NoPositiveRateError);
  }
}

TEST_CASE("automatic decoy policy holds the zero-distance optimum") {
  const auto& kth = builtin_setup("KTH");
  const double mu0 = optimal_mu(kth, 0.0, decoy(), Scheme::gllp);
  const auto pts = sweep(kth, decoy(), distance_grid(0.0, 60.0, 10.0));
  for (const auto& p : pts) CHECK(p.mu_used == mu0);
  CHECK(policy_mu(kth, 40.0, decoy(), Scheme::lutkenhaus) == mu0);
}

TEST_CASE("cutoff distances") {
  for (const auto& s : builtin_setups()) {
    for (const auto policy : {MuPolicy::automatic(), MuPolicy::optimal()}) {
      const auto nd = nondecoy(policy);
      const auto dc = decoy(policy);
      const double nd_gllp = max_distance(s, nd, Scheme::gllp);
      const double nd_lut = max_distance(s, nd, Scheme::lutkenhaus);
      const double dc_gllp = max_distance(s, dc, Scheme::gllp);
      const double dc_lut = max_distance(s, dc, Scheme::lutkenhaus);
      INFO(s.name);
      CHECK(dc_gllp > nd_gllp);
      CHECK(dc_lut > nd_lut);
      CHECK(nd_gllp <= nd_lut);
      CHECK(dc_gllp <= dc_lut);
    }
    // The cutoff brackets the sign change.
    const auto cfg = decoy();
    const double d = max_distance(s, cfg, Scheme::gllp);
    const double mu = policy_mu(s, d, cfg, Scheme::gllp);
    CHECK(signed_rate(s, d, mu, cfg, Scheme::gllp) > 0.0);
    CHECK_FALSE(signed_rate(s, d + 0.01, mu, cfg, Scheme::gllp) > 0.0);
  }
}

TEST_CASE("fixed-intensity rates do not revive past their peak") {
  for (const auto& s : builtin_setups()) {
    for (const auto& cfg : {nondecoy(MuPolicy::fixed(transmittance(s, 0.0))),
                            decoy(MuPolicy::fixed(0.5))}) {
      for (const auto scheme : {Scheme::lutkenhaus, Scheme::gllp}) {
        const double span = 200.0 / s.alpha_db_per_km * 0.2;
        double prev = signed_rate(s, 0.0, cfg.mu.value, cfg, scheme);
        bool falling = false;
        for (int k = 1; k <= 400; ++k) {
          const double r = signed_rate(s, span * k / 400.0, cfg.mu.value, cfg, scheme);
          if (r < prev) falling = true;
          if (falling && prev > 0.0) REQUIRE(r < prev);
          if (falling && !(prev > 0.0)) REQUIRE_FALSE(r > 0.0);
          prev = r;
        }
      }
    }
  }
}

TEST_CASE("CSV output") {
  const auto& gys = builtin_setup("GYS");
  const auto grid = distance_grid(0.0, 5.0, 1.0);
  const Scheme both[] = {Scheme::lutkenhaus, Scheme::gllp};

  const auto render = [&](const ScanConfig& cfg) {
    std::ostringstream out;
    const auto pts = sweep(gys, cfg, grid);
    write_csv(out, pts, cfg.mode, both);
    return out.str();
  };
  const auto text = render(nondecoy());
  CHECK(text == render(nondecoy()));

  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "distance_km,mu,scheme,mode,Q_mu,E_mu,Q1_bound,e1_bound,R");
  std::getline(lines, line);
  CHECK(line.rfind("0,4.50000e-02,lutkenhaus,nondecoy,", 0) == 0);
  int rows = 1;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 12);

  const auto pns = render(nondecoy(MuPolicy::fixed(0.1)));
  CHECK(pns.find(",nan,nan,0.00000e+00\n") != std::string::npos);
  CHECK(pns.find("e-") != std::string::npos);
}
