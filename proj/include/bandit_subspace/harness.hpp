#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bandit_subspace/domain.hpp"
#include "bandit_subspace/error.hpp"
#include "bandit_subspace/evaluation.hpp"
#include "bandit_subspace/learners.hpp"
#include "bandit_subspace/oracles.hpp"
#include "bandit_subspace/random.hpp"

namespace bandit_subspace {

enum class Algo { BanditPca, Mbgd, Mbeg, Pca };

inline std::string to_string(Algo a) {
  switch (a) {
    case Algo::BanditPca: return "bandit-pca";
    case Algo::Mbgd: return "mbgd";
    case Algo::Mbeg: return "mbeg";
    case Algo::Pca: return "pca";
  }
  return "?";
}

inline Algo parse_algo(const std::string& s) {
  if (s == "bandit-pca") return Algo::BanditPca;
  if (s == "mbgd") return Algo::Mbgd;
  if (s == "mbeg") return Algo::Mbeg;
  if (s == "pca") return Algo::Pca;
  throw Error(ErrorCode::BadConfig, "unknown algo '" + s + "' (bandit-pca, mbgd, mbeg, pca)");
}

struct ExperimentConfig {
  DomainSpec domain;
  std::shared_ptr<const DistributionSpec> distribution;
  Algo algo = Algo::Mbgd;
  std::vector<int> m_values;
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::optional<double> eta;
  std::optional<double> alpha;
  std::string output_path;
  int threads = 1;
};

/// Rejects configurations that every trial would fail on.
inline void validate_config(const ExperimentConfig& cfg) {
  cfg.domain.validate();
  if (!cfg.distribution) throw Error(ErrorCode::BadConfig, "no distribution");
  if (cfg.distribution->dim() != cfg.domain.d) {
    throw Error(ErrorCode::BadConfig, "distribution dimension " +
                                          std::to_string(cfg.distribution->dim()) +
                                          " differs from d = " + std::to_string(cfg.domain.d));
  }
  for (const auto& pt : cfg.distribution->support()) validate_instance(pt.x, cfg.domain);
  if (cfg.m_values.empty()) throw Error(ErrorCode::BadConfig, "m_values is empty");
  for (int m : cfg.m_values) {
    if (m < 1) throw Error(ErrorCode::BadConfig, "m values must be positive");
  }
  if (cfg.trials < 1) throw Error(ErrorCode::BadConfig, "trials must be positive");
  if (cfg.threads < 1) throw Error(ErrorCode::BadConfig, "threads must be positive");
  switch (cfg.algo) {
    case Algo::BanditPca:
    case Algo::Mbgd:
      if (cfg.domain.r % 2 != 0) {
        throw Error(ErrorCode::OddBudget, to_string(cfg.algo) + " needs an even budget r");
      }
      break;
    case Algo::Mbeg:
      if (cfg.domain.r != 2) throw Error(ErrorCode::BudgetNotTwo, "mbeg needs r = 2");
      break;
    case Algo::Pca:
      break;
  }
}

struct TrialRecord {
  std::string algo;
  int d = 0;
  int k = 0;
  int r = 0;
  double G = 0.0;
  int m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double excess_loss = 0.0;
  double loss = 0.0;
  double wall_ms = 0.0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

/// Trial seed from (base_seed, m, trial_index); adding m values never
/// changes the seeds of existing cells.
inline std::uint64_t trial_seed(std::uint64_t base_seed, int m, int trial_index) {
  return mix64(base_seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial_index));
}

namespace detail {

struct Evaluation {
  Moments moments;
  double optimal_loss = 0.0;
};

inline Evaluation prepare_evaluation(const ExperimentConfig& cfg) {
  Evaluation ev{exact_moments(*cfg.distribution), 0.0};
  ev.optimal_loss = optimal_projection(ev.moments, cfg.domain.k).second;
  return ev;
}

inline ProjectionMatrix run_learner(const ExperimentConfig& cfg, int m, std::uint64_t seed) {
  Oracle oracle(*cfg.distribution);
  LearnerConfig lc{cfg.domain, m, cfg.eta, cfg.alpha, seed};
  switch (cfg.algo) {
    case Algo::BanditPca: return bandit_pca(oracle, lc);
    case Algo::Mbgd: return mbgd(oracle, lc);
    case Algo::Mbeg: return mbeg(oracle, lc);
    case Algo::Pca: {
      // Full information: every coordinate of each draw is observed.
      std::vector<int> all(cfg.domain.d);
      std::iota(all.begin(), all.end(), 0);
      CounterRng rng = CounterRng(seed).split(1);
      std::vector<Instance> samples;
      samples.reserve(m);
      for (int i = 0; i < m; ++i) {
        const auto obs = oracle.observe(all, rng);
        samples.push_back(
            Instance{Eigen::Map<const Vector>(obs.values.data(), cfg.domain.d)});
      }
      return full_info_pca(samples, cfg.domain.k);
    }
  }
  throw Error(ErrorCode::BadConfig, "unknown algo");
}

inline TrialRecord run_trial(const ExperimentConfig& cfg, const Evaluation& ev, int m,
                             int trial_index) {
  TrialRecord rec;
  rec.algo = to_string(cfg.algo);
  rec.d = cfg.domain.d;
  rec.k = cfg.domain.k;
  rec.r = cfg.domain.r;
  rec.G = cfg.domain.G;
  rec.m = m;
  rec.trial = trial_index;
  rec.seed = trial_seed(cfg.base_seed, m, trial_index);
  const auto start = std::chrono::steady_clock::now();
  try {
    const ProjectionMatrix pi = run_learner(cfg, m, rec.seed);
    rec.loss = loss(pi, ev.moments);
    rec.excess_loss = rec.loss - ev.optimal_loss;
    if (rec.excess_loss < 0.0 && rec.excess_loss >= -1e-9) rec.excess_loss = 0.0;
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.loss = rec.excess_loss = std::numeric_limits<double>::quiet_NaN();
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
  return rec;
}

}  // namespace detail

/// One (m, trial) cell: learner run from the derived seed, scored against
/// the exact moments. Learner errors become a failed record.
inline TrialRecord run_trial(const ExperimentConfig& cfg, int m, int trial_index) {
  validate_config(cfg);
  return detail::run_trial(cfg, detail::prepare_evaluation(cfg), m, trial_index);
}

/// All |m_values| x trials cells, sorted by (m, trial) whatever the
/// execution order. Trials run on `cfg.threads` workers.
inline std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const detail::Evaluation ev = detail::prepare_evaluation(cfg);
  std::vector<std::pair<int, int>> cells;
  for (int m : cfg.m_values) {
    for (int t = 0; t < cfg.trials; ++t) cells.emplace_back(m, t);
  }
  std::vector<TrialRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      records[i] = detail::run_trial(cfg, ev, cells[i].first, cells[i].second);
    }
  };
  const int n_threads = std::min<int>(cfg.threads, static_cast<int>(cells.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::stable_sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return a.m != b.m ? a.m < b.m : a.trial < b.trial;
  });
  return records;
}

inline constexpr const char* kCsvHeader = "algo,d,k,r,G,m,trial,seed,excess_loss,loss,wall_ms";

namespace detail {
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline void write_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.algo << ',' << r.d << ',' << r.k << ',' << r.r << ',' << detail::format_real(r.G)
        << ',' << r.m << ',' << r.trial << ',' << r.seed << ',' << detail::format_real(r.excess_loss)
        << ',' << detail::format_real(r.loss) << ',' << detail::format_real(r.wall_ms) << '\n';
  }
}

inline void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

/// Reads back a file produced by emit_csv. Failure reasons are not stored
/// in the CSV, so failed rows come back with error = "failed".
inline std::vector<TrialRecord> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorCode::Io, "'" + path + "' does not start with the expected header");
  }
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 11) throw Error(ErrorCode::Io, "malformed row in '" + path + "': " + line);
    TrialRecord r;
    r.algo = f[0];
    r.d = std::stoi(f[1]);
    r.k = std::stoi(f[2]);
    r.r = std::stoi(f[3]);
    r.G = std::strtod(f[4].c_str(), nullptr);
    r.m = std::stoi(f[5]);
    r.trial = std::stoi(f[6]);
    r.seed = std::stoull(f[7]);
    r.excess_loss = std::strtod(f[8].c_str(), nullptr);
    r.loss = std::strtod(f[9].c_str(), nullptr);
    r.wall_ms = std::strtod(f[10].c_str(), nullptr);
    if (std::isnan(r.excess_loss)) r.error = "failed";
    out.push_back(std::move(r));
  }
  return out;
}

// Distribution strings: "name:key=value,key=value". Planted indices are 1-based.
//   dyadic:s=3,eps=0.25,c=4      impossibility:s=1
//   coin:alpha=0.4,b=+-          point:i=1          file:PATH
inline std::shared_ptr<const DistributionSpec> parse_distribution(const std::string& text,
                                                                  const DomainSpec& domain);

inline std::shared_ptr<const DistributionSpec> load_distribution_file(const std::string& path,
                                                                      double G) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadConfig, "cannot open distribution file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadConfig, "'" + path + "': " + e.what());
  }
  return std::make_shared<const DistributionSpec>(distribution_from_json(j, G));
}

namespace detail {

struct KeyValues {
  std::vector<std::pair<std::string, std::string>> items;

  std::optional<std::string> get(const std::string& key) const {
    for (const auto& [k, v] : items) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  double number(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    char* end = nullptr;
    const double x = std::strtod(v->c_str(), &end);
    if (end == v->c_str() || *end != '\0') {
      throw Error(ErrorCode::BadConfig, "'" + key + "' is not a number: " + *v);
    }
    return x;
  }

  int index(const std::string& key, int fallback) const {
    const double x = number(key, fallback);
    if (x != std::floor(x)) throw Error(ErrorCode::BadConfig, "'" + key + "' must be an integer");
    return static_cast<int>(x);
  }

  void require_known(std::initializer_list<const char*> known) const {
    for (const auto& [k, v] : items) {
      if (std::none_of(known.begin(), known.end(), [&](const char* s) { return k == s; })) {
        throw Error(ErrorCode::BadConfig, "unknown distribution parameter '" + k + "'");
      }
    }
  }
};

inline KeyValues parse_key_values(const std::string& s) {
  KeyValues kv;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadConfig, "expected key=value: " + item);
    kv.items.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return kv;
}

}  // namespace detail

inline std::shared_ptr<const DistributionSpec> parse_distribution(const std::string& text,
                                                                  const DomainSpec& domain) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (name == "file") return load_distribution_file(rest, domain.G);
  if (rest.empty() && text.size() > 5 && text.ends_with(".json")) {
    return load_distribution_file(text, domain.G);
  }
  const auto kv = detail::parse_key_values(rest);
  auto planted = [&](const char* key) {
    const int s = kv.index(key, 1);
    if (s < 1 || s > domain.d) {
      throw Error(ErrorCode::BadIndex, std::string(key) + " must be in [1, d]");
    }
    return s - 1;
  };
  if (name == "dyadic") {
    kv.require_known({"s", "eps", "c"});
    return std::make_shared<const DistributionSpec>(
        dyadic_fixture(domain.d, planted("s"), kv.number("eps", 0.05), kv.number("c", 4.0)));
  }
  if (name == "impossibility") {
    kv.require_known({"s", "G"});
    return std::make_shared<const DistributionSpec>(
        impossibility_fixture(domain.d, kv.number("G", domain.G), planted("s")));
  }
  if (name == "coin") {
    kv.require_known({"alpha", "b", "G"});
    const double G = kv.number("G", domain.G);
    std::vector<int> signs(domain.k, 1);
    if (const auto b = kv.get("b")) {
      if (static_cast<int>(b->size()) != domain.k) {
        throw Error(ErrorCode::BadConfig, "coin signs 'b' must have k characters");
      }
      for (int j = 0; j < domain.k; ++j) {
        const char c = (*b)[j];
        if (c != '+' && c != '-') throw Error(ErrorCode::BadConfig, "coin signs must be + or -");
        signs[j] = c == '+' ? 1 : -1;
      }
    }
    return std::make_shared<const DistributionSpec>(
        coin_fixture(domain.d, domain.k, G, kv.number("alpha", 0.4), signs,
                     default_coin_basis(domain.d, domain.k, G)));
  }
  if (name == "point") {
    kv.require_known({"i"});
    Vector x = Vector::Zero(domain.d);
    x[planted("i")] = 1.0;
    return std::make_shared<const DistributionSpec>(point_mass(x, domain.G));
  }
  throw Error(ErrorCode::BadConfig, "unknown distribution '" + name + "'");
}

/// Builds a config from a JSON document mirroring ExperimentConfig:
/// {"domain": {"d","k","r","G"}, "distribution": "dyadic:s=3" | {...},
///  "algo", "m_values", "trials", "base_seed", "overrides": {"eta","alpha"},
///  "output_path", "threads"}
/// k, r and G default to 1, 2 and 1; trials to 1, base_seed to 0.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    const auto& dom = j.at("domain");
    cfg.domain.d = dom.at("d").get<int>();
    cfg.domain.k = dom.value("k", 1);
    cfg.domain.r = dom.value("r", 2);
    cfg.domain.G = dom.value("G", 1.0);
    cfg.domain.validate();
    const auto& dist = j.at("distribution");
    cfg.distribution = dist.is_string()
                           ? parse_distribution(dist.get<std::string>(), cfg.domain)
                           : std::make_shared<const DistributionSpec>(
                                 distribution_from_json(dist, cfg.domain.G));
    cfg.algo = parse_algo(j.at("algo").get<std::string>());
    cfg.m_values = j.at("m_values").get<std::vector<int>>();
    cfg.trials = j.value("trials", 1);
    cfg.base_seed = j.value("base_seed", std::uint64_t{0});
    if (j.contains("overrides")) {
      const auto& o = j.at("overrides");
      if (o.contains("eta") && !o.at("eta").is_null()) cfg.eta = o.at("eta").get<double>();
      if (o.contains("alpha") && !o.at("alpha").is_null()) cfg.alpha = o.at("alpha").get<double>();
    }
    cfg.output_path = j.value("output_path", std::string());
    cfg.threads = j.value("threads", 1);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("config JSON: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

}  // namespace bandit_subspace
