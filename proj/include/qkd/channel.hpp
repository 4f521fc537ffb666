#pragma once

// Standard fiber-channel model for BB84 with phase-randomized weak coherent
// pulses: exponential fiber loss, a lumped receiver efficiency, a background
// click rate and a misalignment error probability.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkd/kvfile.hpp"

namespace qkd {

struct SetupParams {
  std::string name;
  double wavelength_nm = 1550.0;
  double alpha_db_per_km = 0.2;
  double e_d = 0.0;      // misalignment error probability
  double y0 = 0.0;       // background click probability per pulse
  double eta_bob = 1.0;  // receiver transmittance times detector efficiency

  // Throws DomainError naming the violated field.
  void validate() const;
};

// The four reference setups: T8, G13, KTH, GYS.
std::span<const SetupParams> builtin_setups();
// Throws DomainError for unknown names.
const SetupParams& builtin_setup(std::string_view name);

SetupParams setup_from_key_values(const KeyValues& kv, std::string_view source);
SetupParams load_setup_file(const std::string& path);

struct DecoyObservables {
  double nu = 0.0;     // weak decoy intensity
  double Q_nu = 0.0;   // weak decoy gain
  double E_nu = 0.0;   // weak decoy QBER
  double Q_vac = 0.0;  // vacuum decoy gain, an estimate of Y_0
};

struct ChannelObservables {
  double q = 0.5;     // fraction of all pulses that are sifted signal pulses
  double mu = 0.0;
  double Q_mu = 0.0;
  double E_mu = 0.0;
  std::optional<DecoyObservables> decoy;
};

// Per photon-number yield, error rate and gain.
struct PhotonNumberComponent {
  double yield = 0.0;
  double error_rate = 0.0;
  double gain = 0.0;
};

// Components i = 0, 1, ..., truncated at some maximum photon number.
using PhotonNumberTruth = std::vector<PhotonNumberComponent>;

inline constexpr std::size_t kMaxPhotonNumber = 50;

// eta_bob * 10^{-alpha * l / 10}
double transmittance(const SetupParams& setup, double distance_km);

// Gains and QBERs the model predicts for signal intensity mu and, when
// `nu` is given, for a weak decoy of intensity nu plus a vacuum decoy.
// Throws DegenerateChannelError if a gain underflows to zero.
ChannelObservables simulate_observables(const SetupParams& setup, double distance_km,
                                        double mu, std::optional<double> nu = std::nullopt,
                                        double q = 0.5);

// Exact i-photon yields, error rates and gains for i = 0..max_photons.
PhotonNumberTruth photon_number_truth(const SetupParams& setup, double distance_km,
                                      double mu,
                                      std::size_t max_photons = kMaxPhotonNumber);

// The i = 1 entry of photon_number_truth, without computing the rest.
PhotonNumberComponent true_single_photon(const SetupParams& setup, double distance_km,
                                         double mu);

}  // namespace qkd
