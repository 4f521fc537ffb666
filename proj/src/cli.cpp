#include "qkd/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "qkd/channel.hpp"
#include "qkd/core_math.hpp"
#include "qkd/error.hpp"
#include "qkd/experiment.hpp"
#include "qkd/kvfile.hpp"
#include "qkd/scan.hpp"

namespace qkd::cli {
namespace {

// Flag value that passed CLI11 but fails a domain check.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string num(double v, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string pct(double v, int decimals = 2) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f%%", decimals, 100.0 * v);
  return buf;
}

struct SetupFlags {
  std::string setup;
  std::string setup_file;

  void add(CLI::App& app) {
    auto* a = app.add_option("--setup", setup, "Built-in setup: T8, G13, KTH or GYS");
    auto* b = app.add_option("--setup-file", setup_file, "Setup parameter file");
    a->excludes(b);
  }

  SetupParams resolve() const {
    if (!setup_file.empty()) {
      try {
        return load_setup_file(setup_file);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }
    if (setup.empty()) throw UsageError("one of --setup or --setup-file is required");
    try {
      return builtin_setup(setup);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
};

struct ModelFlags {
  std::string mode = "nondecoy";
  std::string mu = "auto";
  double nu = 0.05;
  double f_ec = kDefaultErrorCorrectionEfficiency;
  double q = 0.5;
  std::string e1_source = "decoy";

  void add(CLI::App& app, bool with_mu) {
    app.add_option("--mode", mode, "nondecoy or decoy")
        ->check(CLI::IsMember({"nondecoy", "decoy"}))
        ->capture_default_str();
    if (with_mu) {
      app.add_option("--mu", mu, "Signal intensity: auto, optimal or a number")
          ->capture_default_str();
    }
    app.add_option("--nu", nu, "Weak decoy intensity")->capture_default_str();
    app.add_option("--f-ec", f_ec, "Error-correction efficiency")->capture_default_str();
    app.add_option("--q", q, "Sifted signal fraction of all pulses")->capture_default_str();
    app.add_option("--e1-source", e1_source, "Decoy-mode e1 estimate: decoy or signal")
        ->check(CLI::IsMember({"decoy", "signal"}))
        ->capture_default_str();
  }

  ScanConfig resolve() const {
    ScanConfig c;
    c.mode = parse_mode(mode);
    c.e1_source = parse_e1_source(e1_source);
    if (!(f_ec >= 1.0)) throw UsageError("--f-ec must be >= 1");
    if (!(q > 0.0 && q <= 1.0)) throw UsageError("--q must lie in (0, 1]");
    if (!(nu > 0.0 && nu < 1.0)) throw UsageError("--nu must lie in (0, 1)");
    c.nu = nu;
    c.f_ec = f_ec;
    c.q = q;
    if (mu == "auto") {
      c.mu = MuPolicy::automatic();
    } else if (mu == "optimal") {
      c.mu = MuPolicy::optimal();
    } else {
      double value = 0.0;
      try {
        value = parse_double(mu, "--mu");
      } catch (const ParseError& e) {
        throw UsageError(std::string(e.what()) + " (expected auto, optimal or a number)");
      }
      if (!(value > 0.0)) throw UsageError("--mu must be positive");
      if (c.mode == Mode::decoy && !(value > nu)) throw UsageError("--mu must exceed --nu");
      c.mu = MuPolicy::fixed(value);
    }
    return c;
  }
};

std::vector<Scheme> resolve_schemes(const std::string& s) {
  if (s == "both") return {Scheme::lutkenhaus, Scheme::gllp};
  return {parse_scheme(s)};
}

void add_scheme_flag(CLI::App& app, std::string& scheme) {
  app.add_option("--scheme", scheme, "lutkenhaus, gllp or both")
      ->check(CLI::IsMember({"lutkenhaus", "gllp", "both"}))
      ->capture_default_str();
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty()) return fallback;
  file.open(path);
  if (!file) throw Error("cannot write '" + path + "'");
  return file;
}

// Runs `f`, tagging any library error with the stage name.
template <typename F>
auto at_stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"BB84 weak-coherent-pulse key-rate simulator and decoy-state analyzer", "qkdsim"};
  app.require_subcommand(1);

  // privacy-compare
  auto* cmp = app.add_subcommand("privacy-compare",
                                 "Compare the two privacy-amplification cost functions");
  double cmp_step = 1e-5;
  std::string cmp_out;
  cmp->add_option("--step", cmp_step, "Grid step over (0, 1/2]")->capture_default_str();
  cmp->add_option("--out", cmp_out, "Write e,H2,tau,relative_deviation on a 1e-3 grid");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Key rate versus distance, CSV output");
  SetupFlags sim_setup;
  ModelFlags sim_model;
  std::string sim_scheme = "both";
  std::optional<double> dmin, dmax;
  double dstep = 1.0;
  std::string sim_out;
  sim_setup.add(*sim);
  sim_model.add(*sim, true);
  add_scheme_flag(*sim, sim_scheme);
  sim->add_option("--dmin", dmin, "First distance in km (default 0)");
  sim->add_option("--dmax", dmax, "Last distance in km (default: cutoff + 10)");
  sim->add_option("--dstep", dstep, "Distance step in km")->capture_default_str();
  sim->add_option("--out", sim_out, "CSV output path (default stdout)");

  // max-distance
  auto* md = app.add_subcommand("max-distance", "Largest distance with a positive key rate");
  SetupFlags md_setup;
  ModelFlags md_model;
  std::string md_scheme = "both";
  md_setup.add(*md);
  md_model.add(*md, true);
  add_scheme_flag(*md, md_scheme);

  // optimal-mu
  auto* om = app.add_subcommand("optimal-mu", "Rate-maximizing signal intensity");
  SetupFlags om_setup;
  ModelFlags om_model;
  std::string om_scheme = "both";
  double om_distance = 0.0;
  om_setup.add(*om);
  om_model.add(*om, false);
  add_scheme_flag(*om, om_scheme);
  om->add_option("--distance", om_distance, "Fiber length in km")->capture_default_str();

  // analyze
  auto* an = app.add_subcommand("analyze", "Analyze raw counts from a decoy-state run");
  std::string an_data;
  std::vector<std::string> an_overrides;
  std::string an_e1 = "signal";
  double an_fec = kDefaultErrorCorrectionEfficiency;
  bool an_kv = false;
  an->add_option("--data", an_data, "Raw-counts file")->required();
  an->add_option("--override", an_overrides, "Replace a derived parameter, key=value");
  an->add_option("--e1-source", an_e1, "decoy or signal")
      ->check(CLI::IsMember({"decoy", "signal"}))
      ->capture_default_str();
  an->add_option("--f-ec", an_fec, "Error-correction efficiency")->capture_default_str();
  an->add_flag("--kv", an_kv, "Append a machine-readable key = value block");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (cmp->parsed()) {
      if (!(cmp_step > 0.0 && cmp_step <= 1e-4)) throw UsageError("--step must lie in (0, 1e-4]");
      const auto dev = at_stage("privacy-compare", [&] { return pa_term_max_deviation(cmp_step); });
      const double e = dev.e_at_max.value();
      out << "max deviation " << pct(dev.relative_deviation) << " at e = " << pct(e) << "\n"
          << "  H2(e) = " << num(binary_entropy(e)) << ", tau(e) = " << num(lutkenhaus_pa_term(e))
          << ", gap = " << num(dev.absolute_gap) << "\n";
      if (!cmp_out.empty()) {
        std::ofstream file;
        auto& os = open_output(cmp_out, file, out);
        os << "e,H2,tau,relative_deviation\n";
        for (int k = 1; k <= 500; ++k) {
          const double x = k * 1e-3;
          const double h = binary_entropy(x);
          const double t = lutkenhaus_pa_term(x);
          os << num(x) << ',' << num(h, 10) << ',' << num(t, 10) << ',' << num((h - t) / h, 10)
             << '\n';
        }
      }
      return kExitOk;
    }

    if (sim->parsed()) {
      const auto setup = sim_setup.resolve();
      const auto config = sim_model.resolve();
      const auto schemes = resolve_schemes(sim_scheme);
      if (!(dstep > 0.0)) throw UsageError("--dstep must be positive");
      const double lo = dmin.value_or(0.0);
      double hi = 0.0;
      if (dmax) {
        hi = *dmax;
      } else {
        // Lütkenhaus reaches at least as far as GLLP.
        const double cutoff = at_stage("max_distance", [&] {
          try {
            return max_distance(setup, config, Scheme::lutkenhaus);
          } catch (const NoPositiveRateError&) {
            return 90.0;
          }
        });
        hi = std::ceil(cutoff) + 10.0;
      }
      if (!(lo >= 0.0 && hi >= lo)) throw UsageError("need 0 <= dmin <= dmax");
      const auto grid = distance_grid(lo, hi, dstep);
      const auto points = at_stage("sweep", [&] { return sweep(setup, config, grid); });
      std::ofstream file;
      auto& os = open_output(sim_out, file, out);
      write_csv(os, points, config.mode, schemes);
      const auto flagged = std::count_if(points.begin(), points.end(), [](const SweepPoint& p) {
        return p.status != PointStatus::ok;
      });
      if (flagged > 0) {
        err << "note: " << flagged << " of " << points.size()
            << " distances have no single-photon estimate (";
        bool first = true;
        for (const auto s : {PointStatus::pns_insecure, PointStatus::estimator_collapse,
                             PointStatus::degenerate_channel}) {
          const auto n = std::count_if(points.begin(), points.end(),
                                       [s](const SweepPoint& p) { return p.status == s; });
          if (n == 0) continue;
          err << (first ? "" : ", ") << to_string(s) << ": " << n;
          first = false;
        }
        err << "); R written as 0\n";
      }
      return kExitOk;
    }

    if (md->parsed()) {
      const auto setup = md_setup.resolve();
      const auto config = md_model.resolve();
      for (const auto scheme : resolve_schemes(md_scheme)) {
        const double d = at_stage("max_distance", [&] { return max_distance(setup, config, scheme); });
        const double mu = policy_mu(setup, d, config, scheme);
        const auto p = evaluate_point(setup, d, mu, config);
        out << to_string(scheme) << ": cutoff " << num(d, 5) << " km, mu = " << num(mu, 4)
            << ", E_mu = " << pct(p.E_mu) << "\n";
      }
      return kExitOk;
    }

    if (om->parsed()) {
      const auto setup = om_setup.resolve();
      const auto config = om_model.resolve();
      if (!(om_distance >= 0.0)) throw UsageError("--distance must be non-negative");
      for (const auto scheme : resolve_schemes(om_scheme)) {
        const double mu =
            at_stage("optimal_mu", [&] { return optimal_mu(setup, om_distance, config, scheme); });
        const double r = signed_rate(setup, om_distance, mu, config, scheme);
        out << to_string(scheme) << ": mu* = " << num(mu, 5) << ", R = " << num(r, 5) << "\n";
      }
      return kExitOk;
    }

    if (an->parsed()) {
      ParamOverrides overrides;
      for (const auto& o : an_overrides) {
        try {
          overrides.set_from_assignment(o);
        } catch (const ParseError& e) {
          throw UsageError(e.what());
        }
      }
      if (!(an_fec >= 1.0)) throw UsageError("--f-ec must be >= 1");
      const auto raw = at_stage("load", [&] { return load_raw_counts(an_data); });
      const auto report = analyze(raw, overrides, parse_e1_source(an_e1), an_fec);
      write_report_text(out, report);
      if (an_kv) {
        out << "\n";
        write_report_kv(out, report);
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitUsage;
}

}  // namespace qkd::cli
