#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "app/config.hpp"
#include "nlap/constants.hpp"
#include "nlap/errors.hpp"
#include "nlap/transform.hpp"
#include "nlap/version.hpp"

namespace nlap::app {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline json conventions_json(int N) {
  return json{{"sigma", "surface measure of the unit sphere S^{N-1}, N pi^{N/2} / Gamma(N/2 + 1)"},
              {"sigma_value", sphere_measure(N)},
              {"omega_ball_volume", ball_volume(N)},
              {"omega_sphere_surface", sphere_measure(N)},
              {"flux", "p = r^{N-1} |u'|^{N-2} u'; q = |y'|^{N-2} y' = -N^{1-N} p"}};
}

/// NaN and infinities become null in JSON.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class V>
json num_array(const V& xs) {
  json a = json::array();
  for (double v : xs) a.push_back(num(v));
  return a;
}

struct Check {
  std::string name;
  std::string status;  // pass | fail | inconclusive
  std::string detail;
};

inline std::string pass_fail(bool ok) { return ok ? "pass" : "fail"; }

class ArtifactWriter {
 public:
  ArtifactWriter(const Config& cfg, std::string scenario)
      : cfg_(cfg), scenario_(std::move(scenario)), dir_(cfg.str("out")), hash_(config_hash(cfg)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw PreconditionError(Failure::precondition, "output directory '" + dir_.string() + "' is not writable");
  }

  const std::string& hash() const { return hash_; }
  const std::filesystem::path& dir() const { return dir_; }

  /// Comma-separated table, '#' header with provenance, %.17e numbers.
  void csv(const std::string& name, const std::vector<std::string>& columns,
           const std::vector<std::vector<double>>& rows, int N) {
    const auto path = dir_ / name;
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw PreconditionError(Failure::precondition, "cannot write '" + path.string() + "'");
    std::fprintf(f, "# nlap %s scenario=%s config_hash=%s\n", kVersion, scenario_.c_str(), hash_.c_str());
    std::fprintf(f, "# N=%d sigma=unit-sphere-surface(%.17e) omega_ball=%.17e\n", N, sphere_measure(N),
                 ball_volume(N));
    for (std::size_t c = 0; c < columns.size(); ++c) std::fprintf(f, "%s%s", c ? "," : "", columns[c].c_str());
    std::fputc('\n', f);
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) std::fprintf(f, "%s%.17e", c ? "," : "", row[c]);
      std::fputc('\n', f);
    }
    std::fclose(f);
    files_.push_back(name);
  }

  void trajectory_csv(const std::string& name, const EFTrajectory& tr) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < tr.size(); ++i) rows.push_back({tr.t[i], tr.y[i], tr.dy(i), tr.q[i]});
    csv(name, {"t", "y", "dy", "q"}, rows, tr.N);
  }

  void profile_csv(const std::string& name, const RadialProfile& pr) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < pr.size(); ++i) rows.push_back({pr.r[i], pr.u[i], pr.p[i]});
    csv(name, {"r", "u", "p"}, rows, pr.N);
  }

  /// Main report plus the timestamped sidecar.
  void report(int N, const std::vector<Check>& checks, json results, unsigned threads) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["tool_version"] = kVersion;
    doc["scenario"] = scenario_;
    doc["N"] = N;
    doc["config_hash"] = hash_;
    json c = json::object();
    for (const auto& [k, v] : cfg_.resolved()) c[k] = v;
    doc["config"] = c;
    doc["conventions"] = conventions_json(N);
    json cj = json::array();
    for (const auto& ch : checks) cj.push_back({{"name", ch.name}, {"status", ch.status}, {"detail", ch.detail}});
    doc["checks"] = cj;
    doc["results"] = std::move(results);
    doc["files"] = files_;
    write_text(scenario_ + ".json", doc.dump(2) + "\n");

    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char ts[32];
    std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json meta{{"scenario", scenario_}, {"timestamp", ts}, {"threads", threads}, {"config_hash", hash_}};
    const auto path = dir_ / (scenario_ + ".meta.json");
    std::ofstream(path) << meta.dump(2) << "\n";
  }

  void write_text(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream o(path, std::ios::binary);
    if (!o) throw PreconditionError(Failure::precondition, "cannot write '" + path.string() + "'");
    o << text;
  }

 private:
  const Config& cfg_;
  std::string scenario_;
  std::filesystem::path dir_;
  std::string hash_;
  std::vector<std::string> files_;
};

/// Reads a profile CSV with columns r,u,p ('#' lines ignored); rows may be in
/// either radial order.
inline RadialProfile read_profile_csv(const std::string& path, int N) {
  std::ifstream in(path);
  if (!in) throw PreconditionError(Failure::precondition, "cannot read profile '" + path + "'");
  RadialProfile pr;
  pr.N = N;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "r,u,p") throw PreconditionError(Failure::schema, path + ": expected header 'r,u,p'");
      header = true;
      continue;
    }
    double r, u, p;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &u, &p) != 3)
      throw PreconditionError(Failure::schema, path + ": malformed row '" + line + "'");
    pr.r.push_back(r);
    pr.u.push_back(u);
    pr.p.push_back(p);
  }
  if (pr.r.size() >= 2 && pr.r.front() < pr.r.back()) {
    std::reverse(pr.r.begin(), pr.r.end());
    std::reverse(pr.u.begin(), pr.u.end());
    std::reverse(pr.p.begin(), pr.p.end());
  }
  pr.validate();
  return pr;
}

}  // namespace nlap::app
