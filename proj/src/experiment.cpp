#include "qkd/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>

#include "qkd/core_math.hpp"
#include "qkd/error.hpp"

namespace qkd {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double ratio(std::uint64_t num, std::uint64_t den, const char* num_name,
             const char* den_name) {
  if (den == 0) {
    throw ZeroCountError(std::string(den_name) + " is zero; cannot form " + num_name + "/" +
                         den_name);
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

DerivedValue computed(double v) { return {v, Provenance::computed_from_raw, v}; }

void override_value(DerivedValue& dv, const std::optional<double>& v) {
  if (v) {
    dv.value = *v;
    dv.provenance = Provenance::supplied_override;
  }
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string fmt(double v, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string pct(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f%%", 100.0 * v);
  return buf;
}

}  // namespace

std::vector<std::string> RawExperimentCounts::validate() const {
  const auto chain = [](std::initializer_list<std::pair<const char*, std::uint64_t>> links) {
    const std::pair<const char*, std::uint64_t>* prev = nullptr;
    for (const auto& link : links) {
      if (prev && prev->second > link.second) {
        throw DomainError(std::string(prev->first) + " (" + std::to_string(prev->second) +
                          ") exceeds " + link.first + " (" + std::to_string(link.second) + ")");
      }
      prev = &link;
    }
  };
  chain({{"K_mu_err", K_mu_err}, {"K_mu_s", K_mu_s}, {"N_mu_s", N_mu_s}, {"N_mu", N_mu}, {"N", N}});
  chain({{"K_nu_err", K_nu_err}, {"K_nu_s", K_nu_s}, {"N_nu_s", N_nu_s}, {"N_nu", N_nu}, {"N", N}});
  chain({{"K_vac", K_vac}, {"N_vac", N_vac}, {"N", N}});
  if (!(mu > 0.0)) throw DomainError("mu must be positive");
  if (!(nu > 0.0 && nu < mu)) throw DomainError("nu must satisfy 0 < nu < mu");

  std::vector<std::string> warnings;
  if (N_mu + N_nu + N_vac > N) {
    warnings.push_back("N_mu + N_nu + N_vac = " + std::to_string(N_mu + N_nu + N_vac) +
                       " exceeds N = " + std::to_string(N) +
                       " (rounded counts?)");
  }
  return warnings;
}

RawExperimentCounts raw_counts_from_key_values(const KeyValues& kv, std::string_view source) {
  static const std::set<std::string, std::less<>> kKeys = {
      "N",      "N_vac",  "K_vac",  "mu",       "N_mu",   "N_mu_s", "K_mu_s",
      "K_mu_err", "nu",   "N_nu",   "N_nu_s",   "K_nu_s", "K_nu_err"};
  for (const auto& [key, value] : kv) {
    if (!kKeys.contains(key)) {
      throw ParseError(std::string(source) + ": unknown key '" + key + "'");
    }
  }
  const auto get = [&](std::string_view key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw ParseError(std::string(source) + ": missing key '" + std::string(key) + "'");
    }
    return it->second;
  };
  const auto count = [&](std::string_view key) { return parse_count(get(key), key); };

  RawExperimentCounts r;
  r.N = count("N");
  r.N_vac = count("N_vac");
  r.K_vac = count("K_vac");
  r.mu = parse_double(get("mu"), "mu");
  r.N_mu = count("N_mu");
  r.N_mu_s = count("N_mu_s");
  r.K_mu_s = count("K_mu_s");
  r.K_mu_err = count("K_mu_err");
  r.nu = parse_double(get("nu"), "nu");
  r.N_nu = count("N_nu");
  r.N_nu_s = count("N_nu_s");
  r.K_nu_s = count("K_nu_s");
  r.K_nu_err = count("K_nu_err");
  return r;
}

RawExperimentCounts load_raw_counts(const std::string& path) {
  return raw_counts_from_key_values(read_key_values_file(path), path);
}

std::string_view to_string(Provenance p) {
  return p == Provenance::computed_from_raw ? "computed_from_raw" : "supplied_override";
}

void ParamOverrides::set(std::string_view key, double value) {
  const auto k = lower(key);
  if (k == "q") q = value;
  else if (k == "q_mu") Q_mu = value;
  else if (k == "e_mu") E_mu = value;
  else if (k == "y0") Y0 = value;
  else if (k == "q_nu") Q_nu = value;
  else if (k == "e_nu") E_nu = value;
  else throw ParseError("unknown override '" + std::string(key) +
                        "' (expected q, q_mu, e_mu, y0, q_nu, e_nu)");
}

void ParamOverrides::set_from_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ParseError("override '" + std::string(assignment) + "' is not key=value");
  }
  const auto key = assignment.substr(0, eq);
  set(key, parse_double(assignment.substr(eq + 1), key));
}

DerivedParams derive_params(const RawExperimentCounts& raw) {
  DerivedParams p;
  p.q = computed(ratio(raw.N_mu_s, raw.N, "N_mu_s", "N"));
  p.Q_mu = computed(ratio(raw.K_mu_s, raw.N_mu_s, "K_mu_s", "N_mu_s"));
  p.E_mu = computed(ratio(raw.K_mu_err, raw.K_mu_s, "K_mu_err", "K_mu_s"));
  p.Y0 = computed(ratio(raw.K_vac, raw.N_vac, "K_vac", "N_vac"));
  p.Q_nu = computed(ratio(raw.K_nu_s, raw.N_nu_s, "K_nu_s", "N_nu_s"));
  p.E_nu = computed(ratio(raw.K_nu_err, raw.K_nu_s, "K_nu_err", "K_nu_s"));
  return p;
}

DerivedParams apply_overrides(DerivedParams params, const ParamOverrides& o) {
  override_value(params.q, o.q);
  override_value(params.Q_mu, o.Q_mu);
  override_value(params.E_mu, o.E_mu);
  override_value(params.Y0, o.Y0);
  override_value(params.Q_nu, o.Q_nu);
  override_value(params.E_nu, o.E_nu);
  return params;
}

ChannelObservables to_observables(const DerivedParams& params, double mu, double nu) {
  ChannelObservables obs;
  obs.q = params.q.value;
  obs.mu = mu;
  obs.Q_mu = params.Q_mu.value;
  obs.E_mu = params.E_mu.value;
  obs.decoy = DecoyObservables{nu, params.Q_nu.value, params.E_nu.value, params.Y0.value};
  return obs;
}

AnalysisReport analyze(const RawExperimentCounts& raw, const ParamOverrides& overrides,
                       E1Source e1_source, double f_ec) {
  AnalysisReport report;
  report.raw = raw;
  report.e1_source = e1_source;
  report.warnings = stage("validate", [&] { return raw.validate(); });
  report.params = stage("derive_params", [&] {
    return apply_overrides(derive_params(raw), overrides);
  });

  const auto obs = to_observables(report.params, raw.mu, raw.nu);
  report.estimate = stage("estimate_decoy_vw", [&] { return estimate_decoy_vw(obs, e1_source); });
  if (report.estimate.e1_clamped) {
    report.warnings.push_back("e_1 numerator was negative and has been clamped to zero");
  }
  report.lutkenhaus = stage("key_rate", [&] {
    return key_rate(Scheme::lutkenhaus, obs, report.estimate, f_ec);
  });
  report.gllp = stage("key_rate", [&] { return key_rate(Scheme::gllp, obs, report.estimate, f_ec); });
  if (report.gllp.e1_out_of_range) {
    report.warnings.push_back("e_1 bound exceeds 1/2; privacy amplification consumes all untagged bits");
  }
  const auto total = static_cast<double>(raw.N);
  report.key_lutkenhaus =
      stage("final_key_length", [&] { return final_key_length(report.lutkenhaus.R, total); });
  report.key_gllp =
      stage("final_key_length", [&] { return final_key_length(report.gllp.R, total); });
  return report;
}

void write_report_text(std::ostream& out, const AnalysisReport& r) {
  out << "Decoy-state experiment analysis\n"
      << "  N = " << r.raw.N << " pulses, mu = " << fmt(r.raw.mu) << ", nu = " << fmt(r.raw.nu)
      << "\n\nSecurity parameters\n";
  const auto line = [&](const char* name, const DerivedValue& v, bool percent) {
    out << "  " << name << " = " << (percent ? pct(v.value) : fmt(v.value, 4)) << "  ["
        << to_string(v.provenance);
    if (v.provenance == Provenance::supplied_override) {
      out << "; raw ratio " << (percent ? pct(v.computed) : fmt(v.computed, 4));
    }
    out << "]\n";
  };
  line("q    ", r.params.q, false);
  line("Q_mu ", r.params.Q_mu, false);
  line("E_mu ", r.params.E_mu, true);
  line("Y0   ", r.params.Y0, false);
  line("Q_nu ", r.params.Q_nu, false);
  line("E_nu ", r.params.E_nu, true);

  out << "\nSingle-photon bounds (" << to_string(r.estimate.method) << ", e1 from "
      << to_string(r.e1_source) << " states)\n"
      << "  Q1 >= " << fmt(r.estimate.Q1_bound, 4) << "\n"
      << "  e1 <= " << pct(r.estimate.e1_bound) << "\n"
      << "\nError correction: f = " << fmt(r.lutkenhaus.f_ec) << ", sacrificed fraction f*H2(E_mu) = "
      << fmt(r.lutkenhaus.f_ec * binary_entropy(std::clamp(r.params.E_mu.value, 0.0, 1.0)), 4)
      << "\n\nKey rates\n"
      << "  R_lutkenhaus = " << fmt(r.lutkenhaus.R, 4) << "  ->  K_lutkenhaus = "
      << r.key_lutkenhaus << " bits\n"
      << "  R_gllp       = " << fmt(r.gllp.R, 4) << "  ->  K_gllp       = " << r.key_gllp
      << " bits\n";
  if (r.key_lutkenhaus > 0) {
    const double gap = 1.0 - static_cast<double>(r.key_gllp) / static_cast<double>(r.key_lutkenhaus);
    out << "  key-length gap (K_lutkenhaus - K_gllp) / K_lutkenhaus = " << pct(gap) << "\n";
  }
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
}

void write_report_kv(std::ostream& out, const AnalysisReport& r) {
  const auto value = [&](const char* name, const DerivedValue& v) {
    out << name << " = " << fmt(v.value, 17) << "\n"
        << name << ".provenance = " << to_string(v.provenance) << "\n"
        << name << ".computed_from_raw = " << fmt(v.computed, 17) << "\n";
  };
  out << "N = " << r.raw.N << "\n"
      << "mu = " << fmt(r.raw.mu, 17) << "\n"
      << "nu = " << fmt(r.raw.nu, 17) << "\n";
  value("q", r.params.q);
  value("Q_mu", r.params.Q_mu);
  value("E_mu", r.params.E_mu);
  value("Y0", r.params.Y0);
  value("Q_nu", r.params.Q_nu);
  value("E_nu", r.params.E_nu);
  out << "method = " << to_string(r.estimate.method) << "\n"
      << "Q1_bound = " << fmt(r.estimate.Q1_bound, 17) << "\n"
      << "e1_bound = " << fmt(r.estimate.e1_bound, 17) << "\n"
      << "e1_clamped = " << (r.estimate.e1_clamped ? "true" : "false") << "\n"
      << "f_ec = " << fmt(r.lutkenhaus.f_ec, 17) << "\n"
      << "R_lutkenhaus = " << fmt(r.lutkenhaus.R, 17) << "\n"
      << "R_gllp = " << fmt(r.gllp.R, 17) << "\n"
      << "K_lutkenhaus = " << r.key_lutkenhaus << "\n"
      << "K_gllp = " << r.key_gllp << "\n";
}

}  // namespace qkd
