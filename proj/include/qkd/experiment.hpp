#pragma once

// Reduction of raw counts from a vacuum + weak decoy-state run into the
// parameters the security analysis needs, and the end-to-end analysis down
// to final key lengths.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qkd/kvfile.hpp"
#include "qkd/postprocess.hpp"

namespace qkd {

struct RawExperimentCounts {
  std::uint64_t N = 0;  // all pulses sent
  std::uint64_t N_vac = 0;
  std::uint64_t K_vac = 0;
  double mu = 0.0;
  std::uint64_t N_mu = 0;
  std::uint64_t N_mu_s = 0;  // signal pulses in matching bases
  std::uint64_t K_mu_s = 0;  // sifted signal detections
  std::uint64_t K_mu_err = 0;
  double nu = 0.0;
  std::uint64_t N_nu = 0;
  std::uint64_t N_nu_s = 0;
  std::uint64_t K_nu_s = 0;
  std::uint64_t K_nu_err = 0;

  // Throws DomainError on an inconsistent count chain. Soft problems come
  // back as warnings.
  std::vector<std::string> validate() const;
};

RawExperimentCounts raw_counts_from_key_values(const KeyValues& kv, std::string_view source);
RawExperimentCounts load_raw_counts(const std::string& path);

enum class Provenance { computed_from_raw, supplied_override };
std::string_view to_string(Provenance p);

struct DerivedValue {
  double value = 0.0;
  Provenance provenance = Provenance::computed_from_raw;
  double computed = 0.0;  // the raw-count ratio, kept even when overridden
};

struct DerivedParams {
  DerivedValue q;
  DerivedValue Q_mu;
  DerivedValue E_mu;
  DerivedValue Y0;
  DerivedValue Q_nu;
  DerivedValue E_nu;
};

struct ParamOverrides {
  std::optional<double> q, Q_mu, E_mu, Y0, Q_nu, E_nu;

  // Keys: q, q_mu, e_mu, y0, q_nu, e_nu (case-insensitive).
  void set(std::string_view key, double value);
  // Parses "key=value".
  void set_from_assignment(std::string_view assignment);
};

// Plain ratios of the raw counts. Throws ZeroCountError naming the count.
DerivedParams derive_params(const RawExperimentCounts& raw);

DerivedParams apply_overrides(DerivedParams params, const ParamOverrides& overrides);

// Observables in the form the estimators take.
ChannelObservables to_observables(const DerivedParams& params, double mu, double nu);

struct AnalysisReport {
  RawExperimentCounts raw;
  DerivedParams params;
  E1Source e1_source = E1Source::signal;
  SinglePhotonEstimate estimate;
  RateResult lutkenhaus;
  RateResult gllp;
  std::uint64_t key_lutkenhaus = 0;
  std::uint64_t key_gllp = 0;
  std::vector<std::string> warnings;
};

// Validates, derives, applies overrides, bounds the single-photon
// contribution with decoy states and computes both rates and key lengths.
// Failures are rethrown as StageError carrying the stage name.
AnalysisReport analyze(const RawExperimentCounts& raw, const ParamOverrides& overrides = {},
                       E1Source e1_source = E1Source::signal,
                       double f_ec = kDefaultErrorCorrectionEfficiency);

void write_report_text(std::ostream& out, const AnalysisReport& report);
// `key = value` lines, re-readable with parse_key_values.
void write_report_kv(std::ostream& out, const AnalysisReport& report);

}  // namespace qkd
