#include <csignal>
#include <iostream>
#include <stop_token>
#include <thread>

#include <pthread.h>

#include "eventpulse/cli.hpp"

// SIGINT/SIGTERM become a stop request so `collect` can flush and close its archive.
int main(int argc, char** argv) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::stop_source stop;
  std::jthread watcher([&](std::stop_token done) {
    timespec tick{0, 200'000'000};
    while (!done.stop_requested()) {
      if (sigtimedwait(&signals, nullptr, &tick) > 0) {
        stop.request_stop();
        return;
      }
    }
  });

  int code = eventpulse::cli::run(argc, argv, std::cout, std::cerr, stop.get_token());
  watcher.request_stop();
  return code;
}
