#pragma once

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stop_token>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eventpulse/analytics.hpp"
#include "eventpulse/collector.hpp"
#include "eventpulse/credentials.hpp"
#include "eventpulse/graph.hpp"
#include "eventpulse/sources.hpp"
#include "eventpulse/tweet.hpp"

namespace eventpulse::cli {

enum class OutputFormat { table, csv };

struct GlobalConfig {
  std::filesystem::path credentials_path = "./twitter.ini";
  std::filesystem::path data_dir = "./data";
  OutputFormat format = OutputFormat::table;
  int tz_offset_minutes = 0;
  std::uint64_t seed = 42;
};

inline constexpr const char* kConfigEnv = "EVENTPULSE_CONFIG";
inline constexpr const char* kStreamUrl = "https://stream.twitter.com/1.1/statuses/filter.json";
inline constexpr const char* kSearchUrl = "https://api.twitter.com/1.1/search/tweets.json";

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

namespace detail {

inline std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  return s;
}

inline void print_user_ranking(std::ostream& out, const std::vector<RankedEntry<std::string>>& rows,
                               OutputFormat format) {
  if (format == OutputFormat::csv) {
    out << "key,score\n";
    for (const auto& r : rows) out << eventpulse::detail::csv_field(r.key) << ',' << r.score << '\n';
    return;
  }
  std::size_t name_w = 0, score_w = 0;
  for (const auto& r : rows) {
    name_w = std::max(name_w, r.key.size() + 1);
    score_w = std::max(score_w, std::to_string(r.score).size());
  }
  for (const auto& r : rows)
    out << std::left << std::setw(static_cast<int>(name_w)) << ('@' + r.key) << ' ' << std::right
        << std::setw(static_cast<int>(score_w)) << r.score << '\n';
}

inline void print_tweet_ranking(std::ostream& out, const std::vector<TopTweet>& rows, OutputFormat format) {
  if (format == OutputFormat::csv) {
    out << "key,score\n";
    for (const auto& r : rows) out << r.entry.key << ',' << r.entry.score << '\n';
    return;
  }
  std::size_t name_w = 0, score_w = 0, id_w = 0;
  for (const auto& r : rows) {
    name_w = std::max(name_w, r.author.size() + 1);
    score_w = std::max(score_w, std::to_string(r.entry.score).size());
    id_w = std::max(id_w, std::to_string(r.entry.key).size());
  }
  for (const auto& r : rows)
    out << std::left << std::setw(static_cast<int>(name_w)) << ('@' + r.author) << ' ' << std::right
        << std::setw(static_cast<int>(score_w)) << r.entry.score << ' ' << std::setw(static_cast<int>(id_w))
        << r.entry.key << "  " << one_line(r.text) << '\n';
}

inline Corpus load(const std::string& archive) { return read_archive(archive, /*dedupe=*/true); }

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  fn(out);
  if (!out.flush()) throw std::runtime_error("write failed on " + path);
}

}  // namespace detail

/// Runs one subcommand. Returns 0 on success, 1 on operational failure (message on `err`),
/// 2 on usage errors. `stop` interrupts long-running collection.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::stop_token stop = {}) {
  GlobalConfig cfg;
  if (const char* env = std::getenv(kConfigEnv); env && *env) cfg.credentials_path = env;

  CLI::App app{"Collect keyword-filtered social-media posts and analyze an event's footprint.", "eventpulse"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "table";
  app.add_option("--credentials", cfg.credentials_path, "Credentials file (default ./twitter.ini or $EVENTPULSE_CONFIG)");
  app.add_option("--data-dir", cfg.data_dir, "Root directory for collected archives")->capture_default_str();
  app.add_option("--format", format, "Output format for rankings")->check(CLI::IsMember({"table", "csv"}))->capture_default_str();
  app.add_option("--tz", cfg.tz_offset_minutes, "Timezone offset in minutes east of UTC")
      ->check(CLI::Range(-kMaxTzOffsetMinutes, kMaxTzOffsetMinutes))
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for community detection")->capture_default_str();

  // collect
  auto* collect = app.add_subcommand("collect", "Collect matching posts into data-dir/<event-name>/");
  std::string mode_name, event_name, endpoint, replay;
  std::vector<std::string> terms;
  bool no_auth = false;
  std::size_t max_pages = 180;
  collect->add_option("mode", mode_name, "stream | search-recent | search-popular")
      ->required()
      ->check(CLI::IsMember({"stream", "search-recent", "search-popular"}));
  collect->add_option("event-name", event_name, "Directory-safe event name")->required();
  collect->add_option("terms", terms, "Track terms")->required();
  collect->add_option("--endpoint", endpoint, "Source URL (defaults to the platform endpoint for the mode)");
  collect->add_option("--replay", replay, "Replay a local archive instead of connecting (stream mode)");
  collect->add_flag("--no-auth", no_auth, "Connect without signing requests (local replay servers)");
  collect->add_option("--max-pages", max_pages, "Page limit for search modes")->capture_default_str();

  // histogram
  auto* hist = app.add_subcommand("histogram", "Posts per time bucket as a .dat file");
  std::string hist_in, hist_out, granularity = "hour";
  hist->add_option("archive", hist_in)->required();
  hist->add_option("out", hist_out, "Output .dat path")->required();
  hist->add_option("--granularity", granularity)->check(CLI::IsMember({"hour", "day", "h", "d"}))->capture_default_str();

  // top-tweets
  auto* top_tweets = app.add_subcommand("top-tweets", "Most retweeted posts");
  std::string tt_file, count_source = "observed";
  std::size_t tt_k = 10;
  top_tweets->add_option("-f,--file", tt_file)->required();
  top_tweets->add_option("-k", tt_k)->check(CLI::PositiveNumber)->capture_default_str();
  top_tweets->add_option("--count-source", count_source)->check(CLI::IsMember({"observed", "embedded"}))->capture_default_str();

  // top-users
  auto* top_users = app.add_subcommand("top-users", "Most active or most retweeted users");
  std::string tu_file, by;
  std::size_t tu_k = 10;
  top_users->add_option("-f,--file", tu_file)->required();
  top_users->add_option("-k", tu_k)->check(CLI::PositiveNumber)->capture_default_str();
  top_users->add_option("--by", by)->required()->check(CLI::IsMember({"activity", "retweets"}));

  // coordinates
  auto* coords = app.add_subcommand("coordinates", "Geotagged posts as id,latitude,longitude CSV");
  std::string co_in, co_out;
  coords->add_option("archive", co_in)->required();
  coords->add_option("out", co_out)->required();

  // interactions
  auto* inter = app.add_subcommand("interactions", "Retweet/reply graph as edge CSV (and GEXF)");
  std::string in_archive, in_out, gexf_out;
  bool merge_kinds = false, communities = false;
  std::size_t top_n = 0, max_iters = 100;
  inter->add_option("archive", in_archive)->required();
  inter->add_option("out", in_out, "Edge CSV path")->required();
  inter->add_flag("--merge-kinds", merge_kinds, "Merge retweet and reply edges");
  inter->add_option("--top", top_n, "Keep the N users of highest weighted degree (50 when N omitted)")
      ->expected(0, 1)
      ->default_str("50")
      ->check(CLI::PositiveNumber);
  inter->add_flag("--communities", communities, "Print the community of each node");
  inter->add_option("--gexf", gexf_out, "Also write a GEXF file with community attributes");
  inter->add_option("--max-iters", max_iters, "Label propagation sweep limit")->check(CLI::PositiveNumber)->capture_default_str();

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Parse statistics and corpus summary");
  std::string st_in;
  stats_cmd->add_option("archive", st_in)->required();

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }
  cfg.format = format == "csv" ? OutputFormat::csv : OutputFormat::table;

  try {
    if (collect->parsed()) {
      CollectionJob job;
      job.mode = *parse_mode(mode_name);
      job.event_name = event_name;
      job.track_terms = terms;
      job.archive_dir = cfg.data_dir;
      job.max_pages = max_pages;
      job.validate();
      std::optional<Credentials> creds;
      if (replay.empty() && !no_auth) creds = load_credentials(cfg.credentials_path);
      CollectionStats s;
      if (job.mode == CollectionMode::stream) {
        if (!replay.empty()) {
          FileReplaySource source(replay);
          s = collect_stream(job, source, stop);
        } else {
          HttpStreamSource source(endpoint.empty() ? kStreamUrl : endpoint, creds);
          s = collect_stream(job, source, stop);
        }
      } else {
        if (!replay.empty()) throw std::invalid_argument("--replay applies to stream mode only");
        HttpQuerySource source(endpoint.empty() ? kSearchUrl : endpoint, creds);
        s = collect_search(job, source, stop);
      }
      out << "received " << s.received << "\nmatched " << s.matched << "\nwritten " << s.written
          << "\nmalformed " << s.malformed << "\nduplicates " << s.duplicates << "\nreconnects " << s.reconnects
          << "\narchive " << (job.archive_dir / job.event_name).string() << '\n';
    } else if (hist->parsed()) {
      auto corpus = detail::load(hist_in);
      auto buckets = histogram(corpus.tweets, *parse_granularity(granularity), cfg.tz_offset_minutes);
      detail::write_file(hist_out, [&](std::ostream& f) { write_histogram_dat(f, buckets, cfg.tz_offset_minutes); });
      out << buckets.size() << " buckets written to " << hist_out << '\n';
    } else if (top_tweets->parsed()) {
      auto corpus = detail::load(tt_file);
      auto src = count_source == "embedded" ? CountSource::embedded : CountSource::observed;
      detail::print_tweet_ranking(out, top_tweets_by_retweets(corpus.tweets, tt_k, src), cfg.format);
    } else if (top_users->parsed()) {
      auto corpus = detail::load(tu_file);
      auto rows = by == "activity" ? top_users_by_activity(corpus.tweets, tu_k)
                                   : top_users_by_received_retweets(corpus.tweets, tu_k);
      detail::print_user_ranking(out, rows, cfg.format);
    } else if (coords->parsed()) {
      auto corpus = detail::load(co_in);
      auto rows = extract_coordinates(corpus.tweets);
      detail::write_file(co_out, [&](std::ostream& f) { write_coordinates_csv(f, rows); });
      out << rows.size() << " geotagged posts written to " << co_out << '\n';
    } else if (inter->parsed()) {
      auto corpus = detail::load(in_archive);
      auto edges = extract_interactions(corpus.tweets);
      auto g = aggregate(edges, merge_kinds);
      if (inter->get_option("--top")->count() > 0) g = notable_subgraph(g, top_n ? top_n : 50);
      export_edges_csv(g, in_out);
      out << edges.size() << " interactions, " << g.nodes.size() << " users, " << g.edges.size()
          << " weighted edges written to " << in_out << '\n';
      if (communities || !gexf_out.empty()) {
        auto assignment = label_propagation(g, cfg.seed, max_iters);
        if (!gexf_out.empty()) export_gexf(g, assignment, gexf_out);
        if (communities) {
          if (cfg.format == OutputFormat::csv) out << "node,community\n";
          for (const auto& [node, label] : assignment)
            out << (cfg.format == OutputFormat::csv ? eventpulse::detail::csv_field(node) : '@' + node)
                << (cfg.format == OutputFormat::csv ? "," : " ") << label << '\n';
        }
      }
    } else if (stats_cmd->parsed()) {
      auto corpus = detail::load(st_in);
      auto s = summarize(corpus.tweets);
      out << s.tweets << " tweets\n"
          << "lines " << corpus.stats.total_lines << "\nparsed " << corpus.stats.parsed << "\nskipped_malformed "
          << corpus.stats.skipped_malformed << "\nduplicates_dropped " << corpus.stats.duplicates_dropped
          << "\nretweets " << s.retweets << "\nreplies " << s.replies << "\ngeotagged " << s.geotagged
          << "\ndistinct_users " << s.distinct_users << '\n';
      if (s.first)
        out << "span " << format_iso8601(*s.first, cfg.tz_offset_minutes) << " .. "
            << format_iso8601(*s.last, cfg.tz_offset_minutes) << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace eventpulse::cli
