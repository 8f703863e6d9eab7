#include <csignal>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eventpulse/replay_server.hpp"

// Serves a local archive on /stream and /search for trying out `eventpulse collect` offline.
int main(int argc, char** argv) {
  CLI::App app{"Replay an archive over the streaming and search protocols", "eventpulse-replay-server"};
  std::string archive;
  int port = 8080;
  std::vector<std::size_t> drops;
  std::size_t page_size = 100, keepalive_every = 0;
  int delay_ms = 0;
  app.add_option("archive", archive, "Line-delimited archive to replay")->required()->check(CLI::ExistingFile);
  app.add_option("--port", port)->capture_default_str();
  app.add_option("--drop-at", drops, "Line indices at which stream connections are dropped")->delimiter(',');
  app.add_option("--page-size", page_size)->capture_default_str();
  app.add_option("--keepalive-every", keepalive_every, "Blank line after every N records")->capture_default_str();
  app.add_option("--delay-ms", delay_ms, "Delay between streamed records")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  eventpulse::ReplayServer::Options opts;
  std::ifstream in(archive, std::ios::binary);
  for (std::string line; std::getline(in, line);) opts.lines.push_back(line);
  std::size_t begin = 0;
  for (auto d : drops) {
    if (d < begin || d > opts.lines.size()) {
      std::cerr << "error: --drop-at indices must be ascending and within the archive\n";
      return 2;
    }
    opts.sessions.push_back({begin, d, false, false});
    begin = d;
  }
  opts.sessions.push_back({begin, opts.lines.size(), true, false});
  opts.page_size = page_size;
  opts.keepalive_every = keepalive_every;
  opts.line_delay = std::chrono::milliseconds{delay_ms};

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  eventpulse::ReplayServer server(std::move(opts));
  server.start(port);
  std::cout << "serving " << archive << " on " << server.base_url() << " (/stream, /search)" << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  return 0;
}
