#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "cli/commands.hpp"
#include "gen/generator.hpp"
#include "json.hpp"
#include "support/tmpdir.hpp"
#include "support/toy_corpus.hpp"

using namespace qagen;
using qagen::testsupport::TmpDir;
using qagen::testsupport::ToyCorpus;
namespace fs = std::filesystem;

namespace {

struct CliFixture {
  TmpDir tmp;
  std::string data_path;

  CliFixture() {
    ToyCorpus::Options opt;
    opt.contexts = 3;
    opt.seed = 51;
    data_path = tmp.write("toy.json", ToyCorpus::make_json(opt));
  }

  int run(std::vector<std::string> args) { return cli::cli_main(std::move(args)); }

  std::string train_tiny(const std::string& out_dir, uint64_t seed = 7) {
    int rc = run({"train", "--data", data_path, "--out", out_dir, "--seed",
                  std::to_string(seed), "--epochs", "1", "--max-steps", "2", "--batch-size",
                  "4"});
    REQUIRE(rc == 0);
    return out_dir + "/model.ckpt";
  }
};

}  // namespace

TEST_CASE("cli: exit codes for usage and missing files") {
  CliFixture fx;
  CHECK(cli::cli_main({"train", "--data", fx.data_path, "--definitely-not-a-flag"}) == 2);
  CHECK(cli::cli_main({"no-such-command"}) == 2);
  CHECK(cli::cli_main({"train", "--data", fx.tmp.file("missing.json"), "--out",
                       fx.tmp.file("out")}) == 1);
  CHECK(cli::cli_main({"--help"}) == 0);
}

TEST_CASE("cli: train writes checkpoint, metrics, and provenance") {
  CliFixture fx;
  std::string out = fx.tmp.file("run1");
  std::string ckpt = fx.train_tiny(out);
  CHECK(fs::exists(ckpt));
  CHECK(fs::exists(ckpt + ".json"));
  CHECK(fs::exists(out + "/metrics.jsonl"));
  REQUIRE(fs::exists(out + "/train.provenance.json"));
  auto prov = nlohmann::json::parse(qagen::testsupport::slurp(out + "/train.provenance.json"));
  CHECK(prov.contains("config_hash"));
  CHECK(prov.at("config").at("seed") == 7);
  CHECK(!prov.at("checkpoint_hash").get<std::string>().empty());
}

TEST_CASE("cli: generate twice with the same seed is byte-identical") {
  CliFixture fx;
  std::string ckpt = fx.train_tiny(fx.tmp.file("run2"));
  std::string g1 = fx.tmp.file("gen1"), g2 = fx.tmp.file("gen2");
  REQUIRE(cli::cli_main({"generate", "--checkpoint", ckpt, "--data", fx.data_path, "--k", "5",
                         "--seed", "11", "--out", g1}) == 0);
  REQUIRE(cli::cli_main({"generate", "--checkpoint", ckpt, "--data", fx.data_path, "--k", "5",
                         "--seed", "11", "--out", g2}) == 0);
  CHECK(qagen::testsupport::slurp(g1 + "/pairs.jsonl") ==
        qagen::testsupport::slurp(g2 + "/pairs.jsonl"));
  CHECK(!qagen::testsupport::slurp(g1 + "/pairs.jsonl").empty());
}

TEST_CASE("cli: refine reports a replacement count; eval and semi-sup produce reports") {
  CliFixture fx;
  std::string ckpt = fx.train_tiny(fx.tmp.file("run3"));
  std::string gen_dir = fx.tmp.file("gen");
  REQUIRE(cli::cli_main({"generate", "--checkpoint", ckpt, "--data", fx.data_path, "--k", "3",
                         "--seed", "3", "--out", gen_dir}) == 0);
  std::string pairs = gen_dir + "/pairs.jsonl";
  REQUIRE(fs::exists(pairs));

  std::string refine_dir = fx.tmp.file("refine");
  REQUIRE(cli::cli_main({"refine", "--synthetic", pairs, "--contexts", fx.data_path, "--train",
                         fx.data_path, "--threshold", "40", "--qa-epochs", "2", "--out",
                         refine_dir}) == 0);
  auto report = nlohmann::json::parse(
      qagen::testsupport::slurp(refine_dir + "/refine_report.json"));
  CHECK(report.contains("replaced"));
  CHECK(report.at("threshold") == 40.0);
  CHECK(fs::exists(refine_dir + "/refined.jsonl"));

  std::string qae_dir = fx.tmp.file("qae");
  REQUIRE(cli::cli_main({"eval-qae", "--synthetic", pairs, "--contexts", fx.data_path, "--test",
                         fx.data_path, "--qa-epochs", "1", "--out", qae_dir}) == 0);
  auto qae = nlohmann::json::parse(qagen::testsupport::slurp(qae_dir + "/qae_report.json"));
  CHECK(qae.at("qae").contains("em"));

  std::string rqae_dir = fx.tmp.file("rqae");
  REQUIRE(cli::cli_main({"eval-rqae", "--synthetic", pairs, "--contexts", fx.data_path,
                         "--train", fx.data_path, "--qa-epochs", "1", "--out", rqae_dir}) == 0);
  CHECK(fs::exists(rqae_dir + "/rqae_report.json"));

  std::string semi_dir = fx.tmp.file("semi");
  REQUIRE(cli::cli_main({"semi-sup", "--train", fx.data_path, "--test", fx.data_path,
                         "--synthetic", pairs, "--contexts", fx.data_path, "--qa-epochs", "1",
                         "--out", semi_dir}) == 0);
  auto semi = nlohmann::json::parse(
      qagen::testsupport::slurp(semi_dir + "/semi_sup_report.json"));
  CHECK(semi.contains("baseline"));
  CHECK(semi.contains("augmented"));
  CHECK(semi.contains("qa_config_hash"));
}

TEST_CASE("cli: interpolate emits the requested number of steps") {
  CliFixture fx;
  std::string ckpt = fx.train_tiny(fx.tmp.file("run4"));
  std::string out = fx.tmp.file("interp");
  REQUIRE(cli::cli_main({"interpolate", "--checkpoint", ckpt, "--data", fx.data_path,
                         "--interpolate-steps", "3", "--seed", "2", "--out", out}) == 0);
  auto pairs = gen::load_pairs(out + "/interpolation.jsonl");
  CHECK(pairs.size() == 3);
}

TEST_CASE("cli: config file sits between defaults and flags") {
  CliFixture fx;
  std::string cfg_path = fx.tmp.write("cfg.json", R"({"seed": 5, "epochs": 1, "max_steps": 1,
    "batch_size": 4})");

  std::string out1 = fx.tmp.file("cfg_run1");
  REQUIRE(cli::cli_main({"train", "--config", cfg_path, "--data", fx.data_path, "--out",
                         out1}) == 0);
  auto prov1 = nlohmann::json::parse(
      qagen::testsupport::slurp(out1 + "/train.provenance.json"));
  CHECK(prov1.at("config").at("seed") == 5);  // file overrides the default 0

  std::string out2 = fx.tmp.file("cfg_run2");
  REQUIRE(cli::cli_main({"train", "--config", cfg_path, "--data", fx.data_path, "--seed", "9",
                         "--out", out2}) == 0);
  auto prov2 = nlohmann::json::parse(
      qagen::testsupport::slurp(out2 + "/train.provenance.json"));
  CHECK(prov2.at("config").at("seed") == 9);  // flag overrides the file
}
