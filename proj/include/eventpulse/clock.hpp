#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <stop_token>
#include <vector>

#include "eventpulse/time.hpp"

namespace eventpulse {

using Millis = std::chrono::milliseconds;

/// Time source for the collector. Backoff and rate-limit waits go through sleep_for so tests
/// can substitute a virtual clock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::system_clock::time_point now() = 0;
  /// Returns false if `stop` was requested before the delay elapsed.
  virtual bool sleep_for(Millis delay, std::stop_token stop) = 0;

  Timestamp now_seconds() { return std::chrono::floor<std::chrono::seconds>(now()); }
};

class SystemClock final : public Clock {
 public:
  std::chrono::system_clock::time_point now() override { return std::chrono::system_clock::now(); }

  bool sleep_for(Millis delay, std::stop_token stop) override {
    std::mutex m;
    std::condition_variable_any cv;
    std::unique_lock lock(m);
    return !cv.wait_for(lock, stop, delay, [] { return false; }) && !stop.stop_requested();
  }
};

/// Advances instantly on sleep and records every requested delay.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(std::chrono::system_clock::time_point start =
                            std::chrono::system_clock::time_point{std::chrono::seconds{1426788000}})
      : now_(start) {}

  std::chrono::system_clock::time_point now() override {
    std::lock_guard lock(mutex_);
    return now_;
  }

  bool sleep_for(Millis delay, std::stop_token stop) override {
    std::lock_guard lock(mutex_);
    sleeps_.push_back(delay);
    now_ += delay;
    return !stop.stop_requested();
  }

  void advance(Millis d) {
    std::lock_guard lock(mutex_);
    now_ += d;
  }

  std::vector<Millis> sleeps() const {
    std::lock_guard lock(mutex_);
    return sleeps_;
  }

 private:
  mutable std::mutex mutex_;
  std::chrono::system_clock::time_point now_;
  std::vector<Millis> sleeps_;
};

/// Exponential reconnect delays: initial, ×factor per failure, capped.
class Backoff {
 public:
  static constexpr Millis kInitial{1000};
  static constexpr Millis kCap{320'000};
  static constexpr Millis kHealthyAfter{60'000};

  explicit Backoff(Millis initial = kInitial, unsigned factor = 2, Millis cap = kCap)
      : initial_(initial), factor_(factor), cap_(cap), next_(initial) {}

  Millis next() {
    auto d = next_;
    next_ = next_ * factor_ > cap_ ? cap_ : next_ * factor_;
    return d;
  }

  void reset() { next_ = initial_; }

 private:
  Millis initial_;
  unsigned factor_;
  Millis cap_;
  Millis next_;
};

}  // namespace eventpulse
