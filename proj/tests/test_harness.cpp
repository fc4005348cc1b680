#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "test_util.hpp"
#include "bandit_subspace/cli.hpp"

namespace bandit_subspace {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("bandit_subspace_test_" + name);
}

ExperimentConfig dyadic_config(Algo algo, std::vector<int> ms, int trials, int threads = 1) {
  ExperimentConfig cfg;
  cfg.domain = DomainSpec{10, 1, 2, 1.0};
  cfg.distribution = std::make_shared<const DistributionSpec>(dyadic_fixture(10, 2, 0.25, 4.0));
  cfg.algo = algo;
  cfg.m_values = std::move(ms);
  cfg.trials = trials;
  cfg.base_seed = 99;
  cfg.threads = threads;
  return cfg;
}

std::vector<double> excess_column(const std::vector<TrialRecord>& recs) {
  std::vector<double> out;
  for (const auto& r : recs) out.push_back(r.excess_loss);
  return out;
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "bandit-subspace");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int rc = cli_main(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return rc;
}

TEST(RunTrial, PcaOnPointMassIsExact) {
  ExperimentConfig cfg;
  cfg.domain = DomainSpec{3, 1, 2, 1.0};
  cfg.distribution =
      std::make_shared<const DistributionSpec>(point_mass((Vector(3) << 1, 0, 0).finished(), 1.0));
  cfg.algo = Algo::Pca;
  cfg.m_values = {1};
  const TrialRecord rec = run_trial(cfg, 1, 0);
  EXPECT_TRUE(rec.ok());
  EXPECT_EQ(rec.excess_loss, 0.0);
  EXPECT_EQ(rec.algo, "pca");
}

TEST(RunTrial, ConfigRejectedUpFront) {
  ExperimentConfig cfg = dyadic_config(Algo::Mbeg, {100}, 1);
  cfg.domain.r = 4;
  try {
    validate_config(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetNotTwo);
  }
  EXPECT_THROW(run_sweep(cfg), Error);
  cfg = dyadic_config(Algo::Mbgd, {100}, 1);
  cfg.domain.r = 3;
  EXPECT_THROW(validate_config(cfg), Error);
  cfg = dyadic_config(Algo::Mbgd, {}, 1);
  EXPECT_THROW(validate_config(cfg), Error);
}

TEST(RunTrial, ReplayIsBitIdentical) {
  for (Algo algo : {Algo::BanditPca, Algo::Mbgd, Algo::Mbeg, Algo::Pca}) {
    const int m = algo == Algo::Mbeg ? 2500 : 400;  // MBEG needs alpha <= 1/2
    const ExperimentConfig cfg = dyadic_config(algo, {m}, 1);
    const TrialRecord a = run_trial(cfg, m, 3);
    const TrialRecord b = run_trial(cfg, m, 3);
    EXPECT_TRUE(a.ok()) << a.error;
    EXPECT_EQ(a.seed, b.seed);
    EXPECT_EQ(std::memcmp(&a.excess_loss, &b.excess_loss, sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&a.loss, &b.loss, sizeof(double)), 0);
    EXPECT_GE(a.excess_loss, 0.0);
  }
}

TEST(RunTrial, LearnerFailureBecomesRecord) {
  ExperimentConfig cfg = dyadic_config(Algo::Mbeg, {5}, 1);  // default alpha > 1/2
  const TrialRecord rec = run_trial(cfg, 5, 0);
  EXPECT_FALSE(rec.ok());
  EXPECT_NE(rec.error.find("AlphaTooLarge"), std::string::npos) << rec.error;
  const auto recs = run_sweep(cfg);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_FALSE(recs[0].ok());
}

TEST(TrialSeed, DependsOnlyOnItsCell) {
  EXPECT_EQ(trial_seed(1, 100, 2), trial_seed(1, 100, 2));
  EXPECT_NE(trial_seed(1, 100, 2), trial_seed(1, 100, 3));
  EXPECT_NE(trial_seed(1, 100, 2), trial_seed(1, 200, 2));
  EXPECT_NE(trial_seed(1, 100, 2), trial_seed(2, 100, 2));
  // Adding m-values does not perturb existing cells.
  const auto small = run_sweep(dyadic_config(Algo::Mbgd, {100}, 2));
  const auto big = run_sweep(dyadic_config(Algo::Mbgd, {50, 100}, 2));
  EXPECT_EQ(small[0].excess_loss, big[2].excess_loss);
  EXPECT_EQ(small[1].excess_loss, big[3].excess_loss);
}

TEST(RunSweep, CountsAndOrdering) {
  const auto recs = run_sweep(dyadic_config(Algo::Mbgd, {200, 100}, 3, 3));
  ASSERT_EQ(recs.size(), 6u);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].m, i < 3 ? 100 : 200);
    EXPECT_EQ(recs[i].trial, static_cast<int>(i % 3));
  }
}

TEST(RunSweep, SerialAndParallelAgree) {
  for (Algo algo : {Algo::Mbgd, Algo::Mbeg}) {
    const std::vector<int> ms = algo == Algo::Mbeg ? std::vector<int>{2400, 3000}
                                                   : std::vector<int>{300, 600};
    const auto serial = run_sweep(dyadic_config(algo, ms, 8, 1));
    const auto parallel = run_sweep(dyadic_config(algo, ms, 8, 4));
    for (const auto& r : serial) EXPECT_TRUE(r.ok()) << r.error;
    EXPECT_EQ(excess_column(serial), excess_column(parallel));
  }
}

TEST(RunSweep, MedianExcessDecreasesWithM) {
  const std::vector<int> ms{50, 200, 800, 3200};
  const auto recs = run_sweep(dyadic_config(Algo::Mbgd, ms, 40, 2));
  std::vector<double> medians;
  for (int m : ms) {
    std::vector<double> col;
    for (const auto& r : recs)
      if (r.m == m) col.push_back(r.excess_loss);
    std::sort(col.begin(), col.end());
    medians.push_back(0.5 * (col[col.size() / 2 - 1] + col[col.size() / 2]));
  }
  int inversions = 0;
  for (std::size_t i = 1; i < medians.size(); ++i) inversions += medians[i] > medians[i - 1];
  EXPECT_LE(inversions, 1);
}

TEST(Csv, HeaderOnlyAndSingleRecord) {
  const fs::path p = temp_path("empty.csv");
  emit_csv({}, p.string());
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "algo,d,k,r,G,m,trial,seed,excess_loss,loss,wall_ms");
  EXPECT_FALSE(std::getline(in, line));

  const auto recs = run_sweep(dyadic_config(Algo::Mbgd, {100}, 1));
  emit_csv(recs, p.string());
  std::ifstream in2(p);
  int lines = 0;
  while (std::getline(in2, line)) ++lines;
  EXPECT_EQ(lines, 2);
  fs::remove(p);
}

TEST(Csv, RoundTripExact) {
  const fs::path p = temp_path("round.csv");
  auto recs = run_sweep(dyadic_config(Algo::Mbeg, {2400, 2800}, 3));
  recs[0].excess_loss = 0.1 + 0.2;  // a value that needs all 17 digits
  emit_csv(recs, p.string());
  const auto back = parse_csv(p.string());
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].algo, recs[i].algo);
    EXPECT_EQ(back[i].d, recs[i].d);
    EXPECT_EQ(back[i].k, recs[i].k);
    EXPECT_EQ(back[i].r, recs[i].r);
    EXPECT_EQ(back[i].G, recs[i].G);
    EXPECT_EQ(back[i].m, recs[i].m);
    EXPECT_EQ(back[i].trial, recs[i].trial);
    EXPECT_EQ(back[i].seed, recs[i].seed);
    EXPECT_EQ(back[i].excess_loss, recs[i].excess_loss);
    EXPECT_EQ(back[i].loss, recs[i].loss);
    EXPECT_EQ(back[i].wall_ms, recs[i].wall_ms);
  }
  fs::remove(p);
}

TEST(Csv, UnwritablePathIsIoError) {
  try {
    emit_csv({}, "/nonexistent-dir/x.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
  }
}

TEST(ParseDistribution, Strings) {
  const DomainSpec dom{6, 1, 2, 1.0};
  EXPECT_EQ(parse_distribution("dyadic:s=3,eps=0.25,c=4", dom)->support().size(), 2u);
  const auto pm = parse_distribution("point:i=2", dom);
  EXPECT_EQ(pm->support()[0].x[1], 1.0);
  EXPECT_TRUE(parse_distribution("coin:alpha=0.4,b=+-", DomainSpec{6, 2, 2, 1.0})->coin());
  EXPECT_EQ(parse_distribution("impossibility:s=1", dom)->dim(), 6);
  EXPECT_THROW(parse_distribution("dyadic:s=3,bogus=1", dom), Error);
  EXPECT_THROW(parse_distribution("nope", dom), Error);
}

TEST(ParseDistribution, JsonFileRoundTrip) {
  const fs::path p = temp_path("fixture.json");
  {
    std::ofstream f(p);
    f << to_json(impossibility_fixture(4, 1.0, 0)).dump(2);
  }
  const auto dist = parse_distribution("file:" + p.string(), DomainSpec{4, 1, 2, 1.0});
  EXPECT_EQ(dist->support().size(), 2u);
  EXPECT_EQ(dist->support()[0].x, impossibility_fixture(4, 1.0, 0).support()[0].x);
  fs::remove(p);
}

TEST(Cli, RunWritesCsvRows) {
  const fs::path p = temp_path("cli.csv");
  std::string out, err;
  const int rc = run_cli({"run", "--algo", "mbgd", "--d", "10", "--k", "1", "--r", "2", "--G", "1",
                          "--m", "800", "--trials", "5", "--seed", "7", "--dist",
                          "dyadic:s=3,eps=0.25,c=4", "--out", p.string()},
                         &out, &err);
  EXPECT_EQ(rc, 0) << err;
  const auto recs = parse_csv(p.string());
  EXPECT_EQ(recs.size(), 5u);
  EXPECT_NE(err.find("mean_excess"), std::string::npos);
  fs::remove(p);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const fs::path cfg = temp_path("cfg.json");
  {
    std::ofstream f(cfg);
    f << R"({"domain": {"d": 8, "k": 1, "r": 2, "G": 1},
             "distribution": "dyadic:s=1,eps=0.25,c=4",
             "algo": "mbeg", "m_values": [1100], "trials": 2, "base_seed": 3})";
  }
  std::string out, err;
  EXPECT_EQ(run_cli({"run", "--config", cfg.string(), "--trials", "3"}, &out, &err), 0) << err;
  std::istringstream lines(out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) ++n;
  EXPECT_EQ(n, 4);  // header + 3 rows
  fs::remove(cfg);
}

TEST(Cli, FixturesEmitsJson) {
  std::string out;
  EXPECT_EQ(run_cli({"fixtures", "impossibility", "--d", "4", "--G", "1", "--s", "1"}, &out), 0);
  const auto j = nlohmann::json::parse(out);
  EXPECT_EQ(j.at("d"), 4);
  EXPECT_EQ(j.at("support").size(), 2u);
}

TEST(Cli, ExitCodes) {
  std::string err;
  EXPECT_EQ(run_cli({"run", "--bogus", "1"}, nullptr, &err), 2);
  EXPECT_EQ(run_cli({"frobnicate"}), 2);
  EXPECT_EQ(run_cli({}), 2);
  EXPECT_EQ(run_cli({"run", "--algo", "mbeg", "--d", "8", "--k", "1", "--r", "4", "--m", "100",
                     "--dist", "dyadic:s=1,eps=0.25"},
                    nullptr, &err),
            2);
  EXPECT_NE(err.find("BudgetNotTwo"), std::string::npos) << err;
  EXPECT_EQ(run_cli({"run", "--config", "/nonexistent.json"}), 2);
  EXPECT_EQ(run_cli({"run", "--algo", "mbgd", "--d", "4", "--m", "10", "--dist", "point:i=1",
                     "--out", "/nonexistent-dir/x.csv"}),
            1);
}

TEST(Cli, DemoLowerBounds) {
  std::string out;
  EXPECT_EQ(run_cli({"demo-lower-bounds", "--trials", "50", "--draws", "10000"}, &out), 0);
  EXPECT_NE(out.find("identical for all s (exact): yes"), std::string::npos) << out;
}

}  // namespace
}  // namespace bandit_subspace
