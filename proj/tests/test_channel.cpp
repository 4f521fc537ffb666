#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracle.hpp"
#include "qkd/channel.hpp"
#include "qkd/core_math.hpp"
#include "qkd/error.hpp"

using namespace qkd;

namespace {

SetupParams ideal(double y0 = 0.0, double e_d = 0.0, double eta_bob = 1.0) {
  return {"ideal", 1550.0, 0.2, e_d, y0, eta_bob};
}

}  // namespace

TEST_CASE("built-in setups carry the reference parameters") {
  REQUIRE(builtin_setups().size() == 4);
  const auto& gys = builtin_setup("GYS");
  CHECK(gys.alpha_db_per_km == 0.21);
  CHECK(gys.e_d == 0.033);
  CHECK(gys.y0 == 1.7e-6);
  CHECK(gys.eta_bob == 0.045);
  CHECK(builtin_setup("T8").wavelength_nm == 830.0);
  CHECK(builtin_setup("G13").y0 == 1.64e-4);
  CHECK(builtin_setup("KTH").eta_bob == 0.143);
  for (const auto& s : builtin_setups()) CHECK_NOTHROW(s.validate());
  CHECK_THROWS_AS(builtin_setup("gys"), DomainError);
}

TEST_CASE("setup files") {
  const auto s = load_setup_file(QKD_DATA_DIR "/gys.setup");
  const auto& gys = builtin_setup("GYS");
  CHECK(s.name == "GYS-file");
  CHECK(s.alpha_db_per_km == gys.alpha_db_per_km);
  CHECK(s.e_d == gys.e_d);
  CHECK(s.y0 == gys.y0);
  CHECK(s.eta_bob == gys.eta_bob);

  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return setup_from_key_values(parse_key_values(in, "test"), "test");
  };
  const std::string good =
      "name = X\nwavelength_nm = 1550\nalpha_db_per_km = 0.2\ne_d = 0.01\n"
      "y0 = 1e-5 # dark\neta_bob = 0.1\n";
  CHECK(parse(good).y0 == 1e-5);
  CHECK_THROWS_AS(parse("name = X\n"), ParseError);
  CHECK_THROWS_AS(parse(good + "colour = red\n"), ParseError);
  CHECK_THROWS_AS(parse(good + "y0 = 2e-5\n"), ParseError);
  CHECK_THROWS_AS(parse("name = X\nwavelength_nm = 1550\nalpha_db_per_km = 0.2\n"
                        "e_d = 0.6\ny0 = 0\neta_bob = 0.1\n"),
                  DomainError);
  CHECK_THROWS_AS(parse("name = X\nwavelength_nm = abc\nalpha_db_per_km = 0.2\n"
                        "e_d = 0.01\ny0 = 0\neta_bob = 0.1\n"),
                  ParseError);
  CHECK_THROWS_AS(load_setup_file("/nonexistent/file"), ParseError);
}

TEST_CASE("transmittance") {
  const auto& gys = builtin_setup("GYS");
  CHECK(transmittance(gys, 0.0) == 0.045);
  // 10 dB at 0.21 dB/km
  CHECK(std::abs(transmittance(gys, 47.62) - 0.0045) < 1e-5);
  CHECK(transmittance(gys, 1e5) < 1e-300);
  CHECK_THROWS_AS(transmittance(gys, -1.0), DomainError);
}

TEST_CASE("simulated observables") {
  SUBCASE("no error sources means no errors") {
    for (const double mu : {0.05, 0.5, 1.0}) {
      const auto obs = simulate_observables(ideal(0.0, 0.0, 0.3), 10.0, mu);
      CHECK(obs.E_mu == 0.0);
    }
  }
  SUBCASE("GYS at 0 km with mu = 0.1") {
    const auto obs = simulate_observables(builtin_setup("GYS"), 0.0, 0.1);
    CHECK(std::abs(obs.Q_mu - 0.0044916) < 1e-6);
    CHECK(obs.q == 0.5);
    CHECK_FALSE(obs.decoy.has_value());
  }
  SUBCASE("lossless channel") {
    for (const double mu : {0.1, 0.5, 0.9}) {
      const auto obs = simulate_observables(ideal(), 0.0, mu);
      CHECK(obs.Q_mu == doctest::Approx(1.0 - std::exp(-mu)).epsilon(1e-14));
    }
  }
  SUBCASE("decoy block") {
    const auto& kth = builtin_setup("KTH");
    const auto obs = simulate_observables(kth, 25.0, 0.5, 0.1, 0.4);
    REQUIRE(obs.decoy.has_value());
    CHECK(obs.decoy->Q_vac == kth.y0);
    CHECK(obs.decoy->nu == 0.1);
    CHECK(obs.decoy->Q_nu < obs.Q_mu);
    CHECK(obs.q == 0.4);
    CHECK_THROWS_AS(simulate_observables(kth, 25.0, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(simulate_observables(kth, 25.0, 0.5, 0.0), DomainError);
    CHECK_THROWS_AS(simulate_observables(kth, 25.0, 0.0), DomainError);
  }
  SUBCASE("gain underflow") {
    CHECK_THROWS_AS(simulate_observables(ideal(0.0, 0.01, 0.1), 1e5, 0.5),
                    DegenerateChannelError);
  }
}

TEST_CASE("single-photon truth") {
  SUBCASE("without background only misalignment errors remain") {
    const auto c = true_single_photon(ideal(0.0, 0.02, 0.2), 15.0, 0.4);
    CHECK(c.error_rate == doctest::Approx(0.02).epsilon(1e-14));
  }
  SUBCASE("GYS at 0 km, mu = 0.55") {
    const auto c = true_single_photon(builtin_setup("GYS"), 0.0, 0.55);
    const double y1 = 1.7e-6 + 0.045 * (1.0 - 1.7e-6);
    CHECK(c.yield == doctest::Approx(y1).epsilon(1e-14));
    CHECK(c.gain == doctest::Approx(0.0142800229798265).epsilon(1e-12));
    CHECK(std::abs(c.gain - 1.4284e-2) < 1e-5);
  }
  SUBCASE("zero transmittance leaves only background") {
    const auto& gys = builtin_setup("GYS");
    const auto c = true_single_photon(gys, 1e5, 0.5);
    CHECK(c.yield == gys.y0);
    CHECK(c.error_rate == 0.5);
  }
}

TEST_CASE("photon-number decomposition reproduces the observables") {
  for (const auto& s : builtin_setups()) {
    for (const double d : {0.0, 20.0, 50.0, 100.0}) {
      const double eta = transmittance(s, d);
      for (const double mu : {0.1, 0.48, eta}) {
        const auto obs = simulate_observables(s, d, mu);
        const auto truth = photon_number_truth(s, d, mu);
        REQUIRE(truth.size() == kMaxPhotonNumber + 1);
        double gain = 0.0;
        double error_gain = 0.0;
        double oracle_gain = 0.0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
          gain += truth[i].gain;
          error_gain += truth[i].error_rate * truth[i].gain;
          const auto ref = oracle::component(s.y0, s.e_d, eta, i);
          oracle_gain += ref.yield * oracle::poisson(mu, i);
          REQUIRE(truth[i].yield >= s.y0);
          REQUIRE(truth[i].yield <= 1.0);
          REQUIRE(truth[i].error_rate <= 0.5);
        }
        INFO(s.name << " d=" << d << " mu=" << mu);
        CHECK(std::abs(gain - obs.Q_mu) / obs.Q_mu < 1e-10);
        CHECK(std::abs(error_gain - obs.E_mu * obs.Q_mu) / (obs.E_mu * obs.Q_mu) < 1e-10);
        CHECK(std::abs(oracle_gain - obs.Q_mu) / obs.Q_mu < 1e-10);
      }
    }
  }
}

TEST_CASE("gain falls and QBER rises with distance") {
  for (const auto& s : builtin_setups()) {
    double prev_q = 2.0;
    double prev_e = -1.0;
    // Up to 80 dB of fiber loss; beyond that the signal is below double
    // resolution next to the background.
    const double span = 80.0 / s.alpha_db_per_km;
    for (int k = 0; k <= 200; ++k) {
      const double d = span * k / 200.0;
      const auto obs = simulate_observables(s, d, 0.3);
      REQUIRE(obs.Q_mu < prev_q);
      REQUIRE(obs.E_mu > prev_e);
      REQUIRE(obs.E_mu <= 0.5);
      prev_q = obs.Q_mu;
      prev_e = obs.E_mu;
    }
    CHECK(simulate_observables(s, 3000.0, 0.3).E_mu == doctest::Approx(0.5).epsilon(1e-9));
  }
}
