#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "app/config.hpp"
#include "app/scenarios.hpp"

namespace nlap::app {

struct Invocation {
  Config cfg;
  unsigned threads = 1;
};

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> s{"classify", "explicit-check", "construct", "shoot",
                                          "sweep",    "limit",          "analyze",   "report"};
  return s;
}

inline void dispatch(const Invocation& inv, std::ostream& out) {
  const std::string s = inv.cfg.str("scenario");
  if (s == "classify") return run_classify(inv.cfg, inv.threads, out);
  if (s == "explicit-check") return run_explicit_check(inv.cfg, inv.threads, out);
  if (s == "construct") return run_construct(inv.cfg, inv.threads, out);
  if (s == "shoot") return run_shoot(inv.cfg, inv.threads, out);
  if (s == "sweep") return run_sweep(inv.cfg, inv.threads, out);
  if (s == "limit") return run_limit(inv.cfg, inv.threads, out);
  if (s == "analyze") return run_analyze(inv.cfg, inv.threads, out);
  if (s == "report") return run_report(inv.cfg, inv.threads, out);
  throw PreconditionError(Failure::precondition, "unknown scenario '" + s + "'");
}

/// Full command-line entry point. Exit codes: 0 success, 2 precondition
/// failure (usage errors included), 3 numerical failure.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial N-Laplacian toolkit: exponential nonlinearities, isolated singularities", "nlap"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(0, 1);

  std::string config_file, out_dir, kind, profile, gammas;
  std::vector<std::string> sets;
  std::optional<long> N, threads, seed;
  std::optional<double> mu, beta, C, eps, tol, gamma;
  bool dump = false;

  auto add_common = [&](CLI::App* a) {
    a->add_option("--config", config_file, "key = value config file");
    a->add_option("--out", out_dir, "output directory");
    a->add_option("--threads", threads, "worker threads");
    a->add_option("--seed", seed, "reserved");
    a->add_option("--N", N, "dimension");
    a->add_option("--kind", kind, "nonlinearity kind");
    a->add_option("--mu", mu, "stretch exponent");
    a->add_option("--beta", beta, "growth rate");
    a->add_option("--C", C, "amplitude");
    a->add_option("--eps", eps, "inner radius for construct");
    a->add_option("--tol", tol, "iteration tolerance for construct");
    a->add_option("--gamma", gamma, "shooting height");
    a->add_option("--gammas", gammas, "comma-separated shooting heights");
    a->add_option("--profile", profile, "profile CSV for analyze");
    a->add_flag("--dump-trajectories", dump, "write one CSV per sweep trajectory");
    a->add_option("--set", sets, "key=value override (repeatable)");
  };
  add_common(&app);
  std::vector<CLI::App*> subs;
  for (const auto& name : scenario_names()) {
    auto* s = app.add_subcommand(name, "run the " + name + " scenario");
    s->fallthrough();
    subs.push_back(s);
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "nlap: " << e.what() << "\n";
    return 2;
  }

  try {
    Invocation inv;
    if (!config_file.empty()) load_config_file(inv.cfg, config_file);
    for (auto* s : subs)
      if (s->parsed()) inv.cfg.set("scenario", s->get_name());
    require(!inv.cfg.str("scenario").empty(), Failure::precondition,
            "no scenario given (subcommand or 'scenario' key)");
    const std::string sc = inv.cfg.str("scenario");
    auto setn = [&](const char* k, const auto& v) {
      if (v) inv.cfg.set(k, fmt_exact(static_cast<double>(*v)));
    };
    if (!out_dir.empty()) inv.cfg.set("out", out_dir);
    setn("threads", threads);
    setn("seed", seed);
    setn("N", N);
    if (!kind.empty()) inv.cfg.set("nl.kind", kind);
    setn("nl.mu", mu);
    setn("nl.beta", beta);
    setn("nl.C", C);
    setn("construct.eps", eps);
    setn("construct.tol", tol);
    setn("shoot.gamma", gamma);
    if (!gammas.empty()) inv.cfg.set(sc == "limit" ? "limit.gammas" : "sweep.gammas", gammas);
    if (!profile.empty()) inv.cfg.set("analyze.profile", profile);
    if (dump) inv.cfg.set("shoot.dump_trajectories", "true");
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      require(eq != std::string::npos, Failure::schema, "--set expects key=value, got '" + kv + "'");
      inv.cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    const long th = inv.cfg.integer("threads");
    require(th >= 1, Failure::precondition, "threads must be >= 1");
    inv.threads = static_cast<unsigned>(th);
    dispatch(inv, out);
    return 0;
  } catch (const PreconditionError& e) {
    err << "nlap: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "nlap: numerical failure, " << e.what() << "\n";
    return 3;
  }
}

}  // namespace nlap::app
