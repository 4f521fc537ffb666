#pragma once

// Distance sweeps, signal-intensity optimization and cutoff-distance search.

#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "qkd/channel.hpp"
#include "qkd/postprocess.hpp"

namespace qkd {

enum class Mode { nondecoy, decoy };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view text);

// How the signal intensity is chosen at each distance.
//  automatic: non-decoy uses mu = eta(distance); decoy uses the GLLP-optimal
//             intensity at zero distance, held fixed along the fiber.
//  optimal:   numerically optimal intensity at every distance.
//  fixed:     the given value everywhere.
struct MuPolicy {
  enum class Kind { automatic, optimal, fixed };
  Kind kind = Kind::automatic;
  double value = 0.0;

  static MuPolicy automatic() { return {Kind::automatic, 0.0}; }
  static MuPolicy optimal() { return {Kind::optimal, 0.0}; }
  static MuPolicy fixed(double mu) { return {Kind::fixed, mu}; }
};

struct ScanConfig {
  Mode mode = Mode::nondecoy;
  MuPolicy mu = MuPolicy::automatic();
  double nu = 0.05;
  double f_ec = kDefaultErrorCorrectionEfficiency;
  double q = 0.5;
  E1Source e1_source = E1Source::decoy;
};

enum class PointStatus { ok, pns_insecure, estimator_collapse, degenerate_channel };

std::string_view to_string(PointStatus s);

struct SweepPoint {
  double distance_km = 0.0;
  double mu_used = 0.0;
  double R_lutkenhaus = 0.0;  // sign preserved; zero when status != ok
  double R_gllp = 0.0;
  double Q_mu = 0.0;
  double E_mu = 0.0;
  double Q1_bound = 0.0;  // NaN when status != ok
  double e1_bound = 0.0;  // NaN when status != ok
  PointStatus status = PointStatus::ok;

  double rate(Scheme s) const { return s == Scheme::gllp ? R_gllp : R_lutkenhaus; }
};

// Key rates at one distance for an explicit signal intensity.
SweepPoint evaluate_point(const SetupParams& setup, double distance_km, double mu,
                          const ScanConfig& config);

// Rate of `scheme`, or -infinity when no estimate exists (PNS-insecure,
// collapsed decoy bound, degenerate channel).
double signed_rate(const SetupParams& setup, double distance_km, double mu,
                   const ScanConfig& config, Scheme scheme);

// Intensity in (0, 1] (in (nu, 1] for decoy mode) maximizing the rate of
// `scheme`, to 1e-4 or better. Throws NoPositiveRateError if the best rate
// is not positive.
double optimal_mu(const SetupParams& setup, double distance_km, const ScanConfig& config,
                  Scheme scheme);

// One point per distance under the configured intensity policy.
std::vector<SweepPoint> sweep(const SetupParams& setup, const ScanConfig& config,
                              std::span<const double> distances_km);

// Largest distance with a positive rate for `scheme`, to 0.01 km.
// Throws NoPositiveRateError if the rate at zero distance is not positive.
double max_distance(const SetupParams& setup, const ScanConfig& config, Scheme scheme);

// The intensity the policy selects at this distance when reporting `scheme`.
double policy_mu(const SetupParams& setup, double distance_km, const ScanConfig& config,
                 Scheme scheme);

// dmin, dmin + step, ..., up to dmax inclusive (within rounding).
std::vector<double> distance_grid(double dmin, double dmax, double step);

inline constexpr std::string_view kCsvHeader =
    "distance_km,mu,scheme,mode,Q_mu,E_mu,Q1_bound,e1_bound,R";

// One row per (point, scheme); negative rates are written as zero.
void write_csv(std::ostream& out, std::span<const SweepPoint> points, Mode mode,
               std::span<const Scheme> schemes);

}  // namespace qkd
