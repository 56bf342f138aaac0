#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "lakelet/cli.hpp"
#include "lakelet/fixtures.hpp"
#include "lakelet/tweets.hpp"
#include "test_support.hpp"

namespace lakelet {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run lake(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

TEST(Cli, ExitCodesFollowErrorOrdinals) {
  EXPECT_EQ(cli::exit_code_for(ErrorCode::kInvalidArgument), 10);
  EXPECT_EQ(cli::exit_code_for(ErrorCode::kUnknownDataset), 21);
  EXPECT_EQ(cli::exit_code_for(ErrorCode::kFlowFailed), 29);
  EXPECT_EQ(cli::exit_code_for(ErrorCode::kNotALake), 35);
}

TEST(Cli, HelpAndUsage) {
  auto help = lake({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE((help.out + help.err).find("import"), std::string::npos);
  EXPECT_EQ(lake({}).code, cli::kExitUsage);
  EXPECT_EQ(lake({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(lake({"import", "--splits", "many"}).code, cli::kExitUsage);
}

TEST(Cli, InitIsIdempotentAndRefusesStrangers) {
  TempDir dir;
  auto root = (dir / "lake").string();
  auto first = lake({"init", root});
  EXPECT_EQ(first.code, 0) << first.err;
  EXPECT_NE(first.out.find("initialized"), std::string::npos);
  for (const char* d : {"zones", "manifests", "provenance", "checkpoints", "lexicons"}) {
    EXPECT_TRUE(fs::is_directory(fs::path(root) / d)) << d;
  }
  EXPECT_TRUE(fs::exists(fs::path(root) / "lexicons/brands.txt"));
  EXPECT_TRUE(fs::exists(fs::path(root) / "catalog.json"));
  auto second = lake({"init", root});
  EXPECT_EQ(second.code, 0);
  EXPECT_NE(second.out.find("already a lake"), std::string::npos);

  testing::spit(dir / "stray/file.txt", "x");
  EXPECT_EQ(lake({"init", (dir / "stray").string()}).code, cli::exit_code_for(ErrorCode::kNotALake));
  EXPECT_EQ(lake({"--lake", (dir / "stray").string(), "datasets", "ls"}).code,
            cli::exit_code_for(ErrorCode::kNotALake));
}

TEST(Cli, ConfigRoundTrip) {
  TempDir dir;
  cli::LakeConfig cfg{dir.path(), 7, true};
  cfg.save();
  EXPECT_EQ(cli::LakeConfig::load(dir.path()), cfg);
  EXPECT_EQ(cli::LakeConfig::from_json(cfg.to_json()), cfg);
  testing::spit(cli::config_path(dir.path()), "{nope");
  try {
    cli::LakeConfig::load(dir.path());
    FAIL();
  } catch (const LakeError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotALake);
  }
}

TEST(Cli, DatasetsLsEmptyAndUnknownDataset) {
  TempDir dir;
  auto root = dir.path().string();
  ASSERT_EQ(lake({"init", root}).code, 0);
  auto ls = lake({"--lake", root, "--out", "json", "datasets", "ls"});
  EXPECT_EQ(ls.code, 0);
  EXPECT_EQ(json::parse(ls.out), json::array());
  auto bad = lake({"--lake", root, "schema", "infer", "--dataset", "raw/nothing"});
  EXPECT_EQ(bad.code, 21);
  EXPECT_NE(bad.err.find("UnknownDataset"), std::string::npos);
  EXPECT_EQ(lake({"--lake", root, "lineage", "dataset:raw/nothing"}).code, 21);
  EXPECT_EQ(lake({"--lake", root, "provenance", "zzz"}).code, 10);
}

TEST(Cli, ImportInferLineageAndReports) {
  TempDir dir;
  auto root = (dir / "lake").string();
  ASSERT_EQ(lake({"init", root}).code, 0);
  auto paths = write_fixtures(dir / "src", {3, 300, 40, 4});
  for (const auto& [name, path] : paths) {
    auto r = lake({"--lake", root, "--out", "json", "import", "--table", path.string(), "--name", name, "--splits", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out).at("dataset"), "raw/" + name);
  }
  auto again = lake({"--lake", root, "import", "--table", paths["stock"].string(), "--name", "stock"});
  EXPECT_EQ(again.code, 0);
  EXPECT_NE(again.err.find("already imported"), std::string::npos);

  auto ls = lake({"--lake", root, "--out", "json", "datasets", "ls"});
  EXPECT_EQ(json::parse(ls.out).size(), 5u);

  auto schema = lake({"--lake", root, "--out", "csv", "schema", "infer", "--dataset", "raw/sales"});
  ASSERT_EQ(schema.code, 0) << schema.err;
  EXPECT_EQ(schema.out.substr(0, schema.out.find('\n')), "name,dtype,nullable");
  EXPECT_NE(schema.out.find("quantity,int,false"), std::string::npos);

  auto lin = lake({"--lake", root, "--out", "csv", "lineage", "dataset:raw/sales"});
  EXPECT_EQ(lin.code, 0);
  EXPECT_NE(lin.out.find("source:sales.csv@"), std::string::npos);

  // A registered but empty tweet dataset still yields a full report.
  std::string tweets;
  for (const auto& t : generate_tweets(1, 50, uniform_brand_weights())) tweets += to_json_line(t) + "\n";
  testing::spit(dir / "t.jsonl", tweets);
  testing::spit(dir / "flow.json", json{{"name", "cli-test"},
                                        {"processors",
                                         {{{"name", "f"}, {"kind", "file_source"}, {"params", {{"path", (dir / "t.jsonl").string()}}}},
                                          {{"name", "s"}, {"kind", "micro_batch_sink"}, {"params", {{"dataset", "raw/tweets"}}}}}},
                                        {"connections", {{{"from", "f"}, {"to", "s"}}}}}
                                       .dump());
  auto fr = lake({"--lake", root, "--out", "json", "flow", "run", "--spec", (dir / "flow.json").string()});
  ASSERT_EQ(fr.code, 0) << fr.err;
  EXPECT_EQ(json::parse(fr.out).at("records_out"), 50);

  auto top = lake({"--lake", root, "--out", "csv", "report", "top-brands", "--k", "3"});
  ASSERT_EQ(top.code, 0) << top.err;
  EXPECT_EQ(std::count(top.out.begin(), top.out.end(), '\n'), 4);
  auto senti = lake({"--lake", root, "--out", "json", "report", "sentiment", "--tweets", "raw/tweets"});
  ASSERT_EQ(senti.code, 0) << senti.err;
  EXPECT_EQ(json::parse(senti.out).size(), 10u);
}

TEST(Cli, DemoNeedsFreshLakeAndPrintsReport) {
  TempDir dir;
  auto root = (dir / "demo").string();
  auto r = lake({"--lake", root, "--out", "csv", "demo", "--seed", "42", "--tweets", "500", "--sales-rows", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "brand,sales_rank,sales_metric,mentions");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 11);
  EXPECT_NE(lake({"--lake", root, "demo"}).code, 0);
}

}  // namespace
}  // namespace lakelet
