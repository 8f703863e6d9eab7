#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "eventpulse/cli.hpp"
#include "eventpulse/replay_server.hpp"
#include "support/collector_fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace eventpulse;

namespace {

const std::filesystem::path kFixtures = EVENTPULSE_FIXTURES_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args, std::stop_token stop = {}) {
  args.insert(args.begin(), "eventpulse");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err, stop);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (kFixtures / name).string(); }

}  // namespace

TEST(Cli, HistogramOfThreeRecordsHasTwoHourLines) {
  fixtures::TempDir dir;
  auto out = dir.path() / "out.dat";
  auto r = run_cli({"histogram", fixture("three.jsonl"), out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(fixtures::TempDir::read(out), "2015-03-19T18:00:00Z\t2\n2015-03-19T19:00:00Z\t1\n");
}

TEST(Cli, HistogramWithOffsetAndDays) {
  fixtures::TempDir dir;
  auto out = dir.path() / "out.dat";
  auto r = run_cli({"--tz", "360", "histogram", fixture("three.jsonl"), out.string(), "--granularity", "day"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(fixtures::TempDir::read(out), "2015-03-20T00:00:00+06:00\t3\n");
}

TEST(Cli, StatsOfEmptyArchive) {
  auto r = run_cli({"stats", fixture("empty.jsonl")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("0 tweets\n", 0), 0u);
}

TEST(Cli, StatsOfThreeRecords) {
  auto r = run_cli({"stats", fixture("three.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("3 tweets\n"), std::string::npos);
  EXPECT_NE(r.out.find("retweets 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("replies 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("geotagged 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("span 2015-03-19T18:05:00Z .. 2015-03-19T19:10:00Z\n"), std::string::npos);
}

TEST(Cli, TopUsersTableAndCsv) {
  auto table = run_cli({"top-users", "-f", fixture("three.jsonl"), "--by", "retweets", "-k", "3"});
  ASSERT_EQ(table.code, 0) << table.err;
  EXPECT_EQ(table.out, "@idorrokia 1\n");
  auto csv = run_cli({"--format", "csv", "top-users", "-f", fixture("three.jsonl"), "--by", "activity"});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(csv.out, "key,score\nEuskalakariAEK,1\nidorrokia,1\nMeriLing1,1\n");
}

TEST(Cli, TopTweetsCsv) {
  auto r = run_cli({"--format", "csv", "top-tweets", "-f", fixture("three.jsonl"), "-k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "key,score\n1,1\n");
}

TEST(Cli, CoordinatesCsv) {
  fixtures::TempDir dir;
  auto out = dir.path() / "coords.csv";
  auto r = run_cli({"coordinates", fixture("three.jsonl"), out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(fixtures::TempDir::read(out), "id,latitude,longitude\n1,43.26,-2.93\n");
}

TEST(Cli, InteractionsWithCommunitiesAndGexf) {
  fixtures::TempDir dir;
  auto csv = dir.path() / "edges.csv";
  auto gexf = dir.path() / "graph.gexf";
  auto r = run_cli({"--format", "csv", "interactions", fixture("three.jsonl"), csv.string(), "--communities",
                    "--gexf", gexf.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(fixtures::TempDir::read(csv),
            "Source,Target,Weight,Kind\nEuskalakariAEK,idorrokia,1,reply\nMeriLing1,idorrokia,1,retweet\n");
  EXPECT_NE(r.out.find("node,community\n"), std::string::npos);
  EXPECT_NE(fixtures::TempDir::read(gexf).find("<gexf"), std::string::npos);
}

TEST(Cli, OutputsAreByteIdenticalAcrossRuns) {
  fixtures::TempDir a, b;
  for (auto* d : {&a, &b}) {
    ASSERT_EQ(run_cli({"histogram", fixture("three.jsonl"), (d->path() / "h.dat").string()}).code, 0);
    ASSERT_EQ(run_cli({"interactions", fixture("three.jsonl"), (d->path() / "e.csv").string(), "--gexf",
                       (d->path() / "g.gexf").string()})
                  .code,
              0);
  }
  for (const char* f : {"h.dat", "e.csv", "g.gexf"})
    EXPECT_EQ(fixtures::TempDir::read(a.path() / f), fixtures::TempDir::read(b.path() / f)) << f;
  EXPECT_EQ(run_cli({"top-users", "-f", fixture("three.jsonl"), "--by", "activity"}).out,
            run_cli({"top-users", "-f", fixture("three.jsonl"), "--by", "activity"}).out);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({"no-such-command"}).code, 2);
  EXPECT_EQ(run_cli({"histogram"}).code, 2);
  EXPECT_EQ(run_cli({"--tz", "900", "stats", fixture("three.jsonl")}).code, 2);
  EXPECT_EQ(run_cli({"top-users", "-f", fixture("three.jsonl"), "--by", "likes"}).code, 2);
  auto missing = run_cli({"stats", "/nonexistent/archive.jsonl"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(missing.err.rfind("error: ", 0), 0u);
  fixtures::TempDir dir;
  EXPECT_EQ(run_cli({"collect", "stream", "bad/name", "#korrika", "--data-dir", dir.path().string()}).code, 1);
}

TEST(Cli, CollectNeedsCredentials) {
  fixtures::TempDir dir;
  auto r = run_cli({"--credentials", (dir.path() / "none.ini").string(), "--data-dir", dir.path().string(),
                    "collect", "stream", "korrika15", "#korrika"});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, ConfigEnvironmentVariableSelectsCredentials) {
  fixtures::TempDir dir;
  auto incomplete = dir.write("partial.ini", "consumer_key=ck\n");
  ::setenv(cli::kConfigEnv, incomplete.c_str(), 1);
  auto r = run_cli({"--data-dir", dir.path().string(), "collect", "search-recent", "korrika15", "#korrika",
                    "--endpoint", "http://127.0.0.1:1/search"});
  ::unsetenv(cli::kConfigEnv);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("consumer_secret"), std::string::npos);
}

TEST(Cli, CollectFromReplayFile) {
  fixtures::TempDir dir;
  auto r = run_cli({"--data-dir", dir.path().string(), "collect", "stream", "korrika15", "#korrika", "--replay",
                    fixture("three.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("received 3\nmatched 2\nwritten 2\n"), std::string::npos);
}

TEST(Cli, CollectSearchAgainstReplayServer) {
  fixtures::TempDir dir;
  auto corpus = fixtures::track_corpus(12, 8);
  ReplayServer::Options so;
  so.lines = corpus.lines;
  so.page_size = 5;
  ReplayServer server(so);
  server.start();
  auto r = run_cli({"--credentials", fixture("credentials.ini"), "--data-dir", dir.path().string(), "collect",
                    "search-recent", "korrika15", "#korrika", "--endpoint", server.base_url() + "/search"});
  server.stop();
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("written 8\n"), std::string::npos);
  EXPECT_EQ(server.search_requests(), 3u);
}

TEST(GexfSchema, CliOutputValidatesAndTamperedFileDoesNot) {
  const std::string python = EVENTPULSE_PYTHON;
  if (python.empty()) GTEST_SKIP() << "no Python interpreter";
  fixtures::TempDir dir;
  auto gexf = dir.path() / "g.gexf";
  ASSERT_EQ(run_cli({"interactions", fixture("three.jsonl"), (dir.path() / "e.csv").string(), "--gexf", gexf.string()})
                .code,
            0);
  auto validate = [&](const std::filesystem::path& p) {
    auto cmd = "\"" + python + "\" \"" EVENTPULSE_GEXF_VALIDATOR "\" \"" + p.string() + "\" > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  EXPECT_EQ(validate(gexf), 0);
  auto text = fixtures::TempDir::read(gexf);
  auto pos = text.find("target=\"idorrokia\"");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 18, "target=\"nobody\"");
  EXPECT_NE(validate(dir.write("bad.gexf", text)), 0);
}
