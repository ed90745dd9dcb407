#ifndef CIS_TESTS_SUPPORT_HPP
#define CIS_TESTS_SUPPORT_HPP

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "cis/cis.hpp"
#include "json.hpp"

// Full-scale benchmark runs shared by the acceptance binary and the
// example tests. Each run is cached under CIS_RUNS_DIR/<name> and reused
// while its configuration is unchanged.
namespace support {

using nlohmann::json;

inline cis::BenchConfig example1() {
  cis::BenchConfig c;
  c.example = 1;
  c.alphas = {0.2};
  c.depth = 10;
  return c;
}

inline cis::BenchConfig example2() {
  cis::BenchConfig c;
  c.example = 2;
  c.alphas = {0.2, 0.9};
  c.pairs = {{1, 2}};
  c.include_ms = false;
  return c;
}

inline cis::BenchConfig example3(int depth) {
  cis::BenchConfig c;
  c.example = 3;
  c.alphas = {0.5};
  c.depth = depth;
  c.pairs = {{1, 2}};
  c.include_ms = false;
  return c;
}

inline json config_key(const cis::BenchConfig& c) {
  json pairs = json::array();
  for (const auto& p : c.pairs) pairs.push_back(cis::to_string(p));
  return {{"example", c.example},       {"p", c.p},
          {"n", c.n_per_class},         {"n_test", c.n_test_per_class},
          {"alphas", c.alphas},         {"depth", c.depth},
          {"replicates", c.replicates}, {"seed", c.seed},
          {"tau_grid", c.tau_grid},     {"folds", c.folds},
          {"pairs", pairs},             {"ms", c.include_ms},
          {"version", cis::kVersion}};
}

inline json alpha_json(double a) { return std::isnan(a) ? json(nullptr) : json(a); }
inline double alpha_of(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

inline json record_json(const cis::ReplicateRecord& r) {
  const auto& m = r.metrics;
  return {{"replicate", r.replicate}, {"seed", r.seed},        {"method", cis::to_string(r.method)},
          {"a", r.pair.first},        {"b", r.pair.second},    {"alpha", alpha_json(r.alpha)},
          {"tau", alpha_json(r.tau)}, {"ok", r.ok},            {"error", r.error},
          {"fp", m.fp},               {"fn", m.fn},            {"se", m.sensitivity},
          {"sp", m.specificity},      {"mms", m.mms},          {"er", alpha_json(m.er_percent)},
          {"selected", r.selected},   {"depth", r.depth_reached}, {"truncated", r.truncated}};
}

inline cis::ReplicateRecord record_of(const json& j) {
  cis::ReplicateRecord r;
  r.replicate = j.at("replicate");
  r.seed = j.at("seed");
  r.method = j.at("method") == "CIS" ? cis::Method::CIS : cis::Method::MS;
  r.pair = {j.at("a").get<int>(), j.at("b").get<int>()};
  r.alpha = alpha_of(j.at("alpha"));
  r.tau = alpha_of(j.at("tau"));
  r.ok = j.at("ok");
  r.error = j.at("error");
  r.metrics.fp = j.at("fp");
  r.metrics.fn = j.at("fn");
  r.metrics.sensitivity = j.at("se");
  r.metrics.specificity = j.at("sp");
  r.metrics.mms = j.at("mms");
  r.metrics.er_percent = alpha_of(j.at("er"));
  r.selected = j.at("selected");
  r.depth_reached = j.at("depth");
  r.truncated = j.at("truncated");
  return r;
}

inline void write_file(const std::filesystem::path& p, const std::string& s) { cis::io::write_atomic(p, s); }

inline cis::BenchReport cached(const std::string& name, const cis::BenchConfig& c) {
  const std::filesystem::path dir = std::filesystem::path(CIS_RUNS_DIR) / name;
  const auto cache = dir / "records.json";
  if (std::filesystem::exists(cache)) {
    std::ifstream in(cache);
    const json j = json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.value("key", json()) == config_key(c)) {
      cis::BenchReport rep;
      rep.config = c;
      for (const auto& r : j.at("records")) rep.records.push_back(record_of(r));
      rep.aggregates = cis::aggregate(c, rep.records);
      return rep;
    }
  }
  std::cerr << "running " << name << " (" << c.replicates << " replicates)\n";
  auto rep = cis::run_benchmark(c);
  std::filesystem::create_directories(dir);
  write_file(dir / "report.csv", cis::bench_report_csv(rep));
  write_file(dir / "replicates.csv", cis::bench_replicates_csv(rep));
  write_file(dir / "table.txt", cis::bench_table(rep));
  json j{{"key", config_key(c)}, {"records", json::array()}};
  for (const auto& r : rep.records) j["records"].push_back(record_json(r));
  write_file(cache, j.dump() + "\n");
  return rep;
}

inline const cis::Aggregate& find(const cis::BenchReport& rep, cis::Method m, cis::ClassPair pair,
                                  double alpha = std::nan("")) {
  for (const auto& g : rep.aggregates)
    if (g.method == m && g.pair == pair && (m == cis::Method::MS || g.alpha == alpha)) return g;
  throw std::runtime_error("no aggregate for " + cis::to_string(m) + " " + cis::to_string(pair));
}

}  // namespace support

#endif  // CIS_TESTS_SUPPORT_HPP
