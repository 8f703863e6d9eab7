#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <stop_token>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <openssl/evp.h>

#include "eventpulse/sources.hpp"
#include "support/corpus_gen.hpp"

namespace eventpulse::fixtures {

/// `total` records of which the first-`matching` (interleaved) carry #korrika; the rest are off-topic.
/// Returns the lines and the set of matching ones.
struct TrackCorpus {
  std::vector<std::string> lines;
  std::vector<std::string> matching;
};

inline TrackCorpus track_corpus(std::size_t total, std::size_t matching, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::vector<bool> is_match(total, false);
  for (std::size_t i = 0; i < matching; ++i) is_match[i] = true;
  std::shuffle(is_match.begin(), is_match.end(), rng);
  TrackCorpus c;
  for (std::size_t i = 0; i < total; ++i) {
    Tweet t;
    t.id = 5000 + i;
    t.created_at = Timestamp{std::chrono::seconds{1426788000 + static_cast<std::int64_t>(i) * 7}};
    t.author = "user" + std::to_string(i % 37);
    if (is_match[i]) {
      t.text = i % 3 == 0 ? "Gora #Korrika! " + std::to_string(i) : "KORRIKA hasi da " + std::to_string(i);
      if (i % 3 == 0) t.hashtags = {"korrika"};
    } else {
      t.text = "korrikalaria naiz " + std::to_string(i);
    }
    auto line = to_record(t);
    c.lines.push_back(line);
    if (is_match[i]) c.matching.push_back(line);
  }
  return c;
}

inline std::string sha256_hex(std::string_view s) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

/// Hash -> occurrence count over every archive line under `dir`.
inline std::map<std::string, int> archive_line_hashes(const std::filesystem::path& dir) {
  std::map<std::string, int> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    for (std::string line; std::getline(in, line);) ++out[sha256_hex(line)];
  }
  return out;
}

/// In-memory stream: connection n delivers lines[sessions[n].first, sessions[n].second) and
/// disconnects; the last scripted connection (and any later one) holds until stop.
class ScriptedStream final : public StreamSource {
 public:
  ScriptedStream(std::vector<std::string> lines, std::vector<std::pair<std::size_t, std::size_t>> sessions,
                 std::function<void(std::size_t)> on_connect = {})
      : lines_(std::move(lines)), sessions_(std::move(sessions)), on_connect_(std::move(on_connect)) {}

  StreamEnd run(std::span<const std::string>, const LineSink& sink, std::stop_token stop) override {
    auto n = connections_++;
    if (on_connect_) on_connect_(n);
    if (n < sessions_.size()) {
      for (auto i = sessions_[n].first; i < sessions_[n].second; ++i) {
        if (stop.stop_requested()) return StreamEnd::stopped;
        if (!sink(lines_[i])) return StreamEnd::stopped;
        if (i % 50 == 0 && !sink("")) return StreamEnd::stopped;  // keep-alive
      }
      if (n + 1 < sessions_.size()) return StreamEnd::disconnected;
    }
    while (!stop.stop_requested()) std::this_thread::sleep_for(std::chrono::milliseconds{1});
    return StreamEnd::stopped;
  }

  std::size_t connections() const { return connections_; }

 private:
  std::vector<std::string> lines_;
  std::vector<std::pair<std::size_t, std::size_t>> sessions_;
  std::function<void(std::size_t)> on_connect_;
  std::size_t connections_ = 0;
};

/// Pages of `page_size` from `lines`; ordinals in `rate_limited` answer rate_limited first.
class ScriptedSearch final : public QuerySource {
 public:
  ScriptedSearch(std::vector<std::string> lines, std::size_t page_size, std::set<std::size_t> rate_limited = {},
                 Timestamp reset_at = {})
      : lines_(std::move(lines)), page_size_(page_size), rate_limited_(std::move(rate_limited)), reset_at_(reset_at) {}

  SearchPage fetch(const SearchRequest& req) override {
    requests.push_back(req);
    auto n = calls_++;
    SearchPage page;
    if (rate_limited_.count(n)) {
      page.status = SearchPage::Status::rate_limited;
      page.reset_at = reset_at_;
      return page;
    }
    std::size_t offset = req.cursor ? std::stoul(*req.cursor) : 0;
    auto end = std::min(lines_.size(), offset + page_size_);
    page.records.assign(lines_.begin() + static_cast<std::ptrdiff_t>(offset), lines_.begin() + static_cast<std::ptrdiff_t>(end));
    if (end < lines_.size()) page.next_cursor = std::to_string(end);
    return page;
  }

  std::vector<SearchRequest> requests;

 private:
  std::vector<std::string> lines_;
  std::size_t page_size_;
  std::set<std::size_t> rate_limited_;
  Timestamp reset_at_;
  std::size_t calls_ = 0;
};

}  // namespace eventpulse::fixtures
