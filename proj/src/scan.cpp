#include "qkd/scan.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "qkd/core_math.hpp"
#include "qkd/error.hpp"
#include "qkd/optimize.hpp"

namespace qkd {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinIntensity = 1e-4;
constexpr std::size_t kIntensityGrid = 400;
constexpr double kLogIntensityTol = 1e-6;
constexpr double kMarchStepKm = 1.0;
constexpr double kMarchLimitKm = 5000.0;
constexpr double kCutoffResolutionKm = 0.01;

optimize::Extremum best_intensity(const SetupParams& setup, double distance_km,
                                  const ScanConfig& config, Scheme scheme) {
  const double lo = config.mode == Mode::decoy ? config.nu * (1.0 + 1e-6) : kMinIntensity;
  if (!(lo < 1.0)) throw DomainError("decoy intensity leaves no room below mu = 1");
  const auto objective = [&](double log_mu) {
    return signed_rate(setup, distance_km, std::exp(log_mu), config, scheme);
  };
  auto best = optimize::grid_then_golden_maximize(objective, std::log(lo), 0.0,
                                                  kIntensityGrid, kLogIntensityTol);
  best.x = std::exp(best.x);
  return best;
}

// Resolves the intensity policy once so per-distance evaluation is cheap.
class MuSchedule {
public:
  MuSchedule(const SetupParams& setup, const ScanConfig& config)
      : setup_(setup), config_(config) {
    if (config.mu.kind == MuPolicy::Kind::fixed) {
      held_ = config.mu.value;
    } else if (config.mu.kind == MuPolicy::Kind::automatic && config.mode == Mode::decoy) {
      held_ = optimal_mu(setup, 0.0, config, Scheme::gllp);
    }
  }

  double at(double distance_km, Scheme scheme) const {
    if (held_ > 0.0) return held_;
    if (config_.mu.kind == MuPolicy::Kind::automatic) {
      return transmittance(setup_, distance_km);
    }
    return best_intensity(setup_, distance_km, config_, scheme).x;
  }

  // Intensity for a sweep row that reports both schemes.
  double for_sweep(double distance_km) const {
    if (held_ > 0.0 || config_.mu.kind == MuPolicy::Kind::automatic) {
      return at(distance_km, Scheme::gllp);
    }
    const auto gllp = best_intensity(setup_, distance_km, config_, Scheme::gllp);
    if (gllp.value > 0.0) return gllp.x;
    return best_intensity(setup_, distance_km, config_, Scheme::lutkenhaus).x;
  }

  double rate(double distance_km, Scheme scheme) const {
    if (config_.mu.kind == MuPolicy::Kind::optimal) {
      return best_intensity(setup_, distance_km, config_, scheme).value;
    }
    return signed_rate(setup_, distance_km, at(distance_km, scheme), config_, scheme);
  }

private:
  const SetupParams& setup_;
  const ScanConfig& config_;
  double held_ = 0.0;
};

std::string sci(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

std::string plain(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::decoy ? "decoy" : "nondecoy"; }

Mode parse_mode(std::string_view text) {
  if (text == "nondecoy") return Mode::nondecoy;
  if (text == "decoy") return Mode::decoy;
  throw ParseError("unknown mode '" + std::string(text) + "'");
}

std::string_view to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::pns_insecure: return "pns_insecure";
    case PointStatus::estimator_collapse: return "estimator_collapse";
    case PointStatus::degenerate_channel: return "degenerate_channel";
  }
  return "?";
}

SweepPoint evaluate_point(const SetupParams& setup, double distance_km, double mu,
                          const ScanConfig& config) {
  SweepPoint p;
  p.distance_km = distance_km;
  p.mu_used = mu;
  p.Q1_bound = kNaN;
  p.e1_bound = kNaN;

  const std::optional<double> nu =
      config.mode == Mode::decoy ? std::optional<double>(config.nu) : std::nullopt;
  ChannelObservables obs;
  try {
    obs = simulate_observables(setup, distance_km, mu, nu, config.q);
  } catch (const DegenerateChannelError&) {
    p.status = PointStatus::degenerate_channel;
    return p;
  }
  p.Q_mu = obs.Q_mu;
  p.E_mu = obs.E_mu;

  SinglePhotonEstimate est;
  try {
    est = config.mode == Mode::decoy ? estimate_decoy_vw(obs, config.e1_source)
                                     : estimate_pessimistic(obs);
  } catch (const PnsInsecureError&) {
    p.status = PointStatus::pns_insecure;
    return p;
  } catch (const EstimatorCollapseError&) {
    p.status = PointStatus::estimator_collapse;
    return p;
  }
  p.Q1_bound = est.Q1_bound;
  p.e1_bound = est.e1_bound;
  p.R_lutkenhaus = key_rate(Scheme::lutkenhaus, obs, est, config.f_ec).R;
  p.R_gllp = key_rate(Scheme::gllp, obs, est, config.f_ec).R;
  return p;
}

double signed_rate(const SetupParams& setup, double distance_km, double mu,
                   const ScanConfig& config, Scheme scheme) {
  const auto p = evaluate_point(setup, distance_km, mu, config);
  return p.status == PointStatus::ok ? p.rate(scheme) : kNegInf;
}

double optimal_mu(const SetupParams& setup, double distance_km, const ScanConfig& config,
                  Scheme scheme) {
  const auto best = best_intensity(setup, distance_km, config, scheme);
  if (!(best.value > 0.0)) {
    throw NoPositiveRateError("no intensity gives a positive " +
                              std::string(to_string(scheme)) + " rate at " +
                              plain(distance_km) + " km");
  }
  return best.x;
}

double policy_mu(const SetupParams& setup, double distance_km, const ScanConfig& config,
                 Scheme scheme) {
  return MuSchedule(setup, config).at(distance_km, scheme);
}

std::vector<SweepPoint> sweep(const SetupParams& setup, const ScanConfig& config,
                              std::span<const double> distances_km) {
  if (distances_km.empty()) throw DomainError("distance grid is empty");
  for (std::size_t i = 1; i < distances_km.size(); ++i) {
    if (!(distances_km[i] > distances_km[i - 1])) {
      throw DomainError("distance grid must be strictly ascending");
    }
  }
  const MuSchedule schedule(setup, config);
  std::vector<SweepPoint> points;
  points.reserve(distances_km.size());
  for (const double d : distances_km) {
    points.push_back(evaluate_point(setup, d, schedule.for_sweep(d), config));
  }
  return points;
}

double max_distance(const SetupParams& setup, const ScanConfig& config, Scheme scheme) {
  const MuSchedule schedule(setup, config);
  const auto positive = [&](double d) { return schedule.rate(d, scheme) > 0.0; };
  if (!positive(0.0)) {
    throw NoPositiveRateError("rate is not positive at zero distance");
  }
  double lo = 0.0;
  double hi = kMarchStepKm;
  while (positive(hi)) {
    lo = hi;
    hi += kMarchStepKm;
    if (hi > kMarchLimitKm) {
      throw NoPositiveRateError("rate stays positive beyond " + plain(kMarchLimitKm) + " km");
    }
  }
  return optimize::bisect_last_true(positive, lo, hi, kCutoffResolutionKm);
}

std::vector<double> distance_grid(double dmin, double dmax, double step) {
  if (!(step > 0.0)) throw DomainError("distance step must be positive");
  if (!(dmin >= 0.0) || !(dmax >= dmin)) throw DomainError("need 0 <= dmin <= dmax");
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor((dmax - dmin) / step + 1e-9));
  grid.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(dmin + step * static_cast<double>(i));
  return grid;
}

void write_csv(std::ostream& out, std::span<const SweepPoint> points, Mode mode,
               std::span<const Scheme> schemes) {
  out << kCsvHeader << '\n';
  for (const auto& p : points) {
    for (const auto scheme : schemes) {
      out << plain(p.distance_km) << ',' << sci(p.mu_used) << ',' << to_string(scheme) << ','
          << to_string(mode) << ',' << sci(p.Q_mu) << ',' << sci(p.E_mu) << ','
          << sci(p.Q1_bound) << ',' << sci(p.e1_bound) << ','
          << sci(std::max(p.rate(scheme), 0.0)) << '\n';
    }
  }
}

}  // namespace qkd
