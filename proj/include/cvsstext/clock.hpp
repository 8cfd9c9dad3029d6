#pragma once

#include <chrono>
#include <mutex>

namespace cvsstext::scrape {

using Seconds = std::chrono::duration<double>;

/// Time source for politeness scheduling. Times are seconds since an
/// arbitrary epoch and never decrease.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Seconds now() const = 0;
  virtual void sleep_until(Seconds t) = 0;
};

class SteadyClock final : public Clock {
 public:
  SteadyClock() : start_(std::chrono::steady_clock::now()) {}
  Seconds now() const override {
    return std::chrono::duration_cast<Seconds>(std::chrono::steady_clock::now() - start_);
  }
  void sleep_until(Seconds t) override;

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Virtual time: sleeping jumps the clock forward instead of blocking.
/// Shared by all threads; the clock is global and monotone.
class SimulatedClock final : public Clock {
 public:
  Seconds now() const override {
    std::lock_guard lock(mu_);
    return now_;
  }
  void sleep_until(Seconds t) override {
    std::lock_guard lock(mu_);
    if (t > now_) now_ = t;
  }
  void advance(Seconds d) {
    std::lock_guard lock(mu_);
    now_ += d;
  }

 private:
  mutable std::mutex mu_;
  Seconds now_{0.0};
};

}  // namespace cvsstext::scrape
