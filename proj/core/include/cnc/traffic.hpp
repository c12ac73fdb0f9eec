#pragma once

// Exogenous arrivals and the fading-memory arrival estimate.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cnc/lifetime_table.hpp"
#include "cnc/model.hpp"

namespace cnc {

struct ArrivalEntry {
  int commodity = 0;  // index into the scenario's commodity list
  NodeId node = 0;
  int lifetime = 1;
  double rate = 0.0;          // packets per slot before the outage
  double rate_after = 0.0;    // packets per slot from the outage slot on
};

enum class ArrivalKind : std::uint8_t { Poisson };

class ArrivalProcess {
 public:
  ArrivalProcess() = default;
  explicit ArrivalProcess(std::vector<ArrivalEntry> entries, ArrivalKind kind = ArrivalKind::Poisson);

  std::span<const ArrivalEntry> entries() const { return entries_; }
  ArrivalKind kind() const { return kind_; }

  void switch_to_post_outage() { post_outage_ = true; }
  bool post_outage() const { return post_outage_; }
  double current_rate(const ArrivalEntry& e) const { return post_outage_ ? e.rate_after : e.rate; }

 private:
  std::vector<ArrivalEntry> entries_;
  ArrivalKind kind_ = ArrivalKind::Poisson;
  bool post_outage_ = false;
};

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t trial_seed, std::uint64_t stream);

// One generator per commodity so adding a commodity never perturbs the
// draws of another.
class ArrivalStreams {
 public:
  ArrivalStreams(std::uint64_t trial_seed, std::size_t num_commodities);
  std::mt19937_64& stream(std::size_t commodity) { return engines_[commodity]; }

 private:
  std::vector<std::mt19937_64> engines_;
};

// Draws one slot of arrivals; the result is aligned with process.entries().
std::vector<double> sample_arrivals(const ArrivalProcess& process, ArrivalStreams& streams);

// Empirical arrival rate with fading memory, one value per (row, lifetime).
class FadingAverage {
 public:
  FadingAverage() = default;
  FadingAverage(std::size_t rows, int max_lifetime, std::int64_t forget_window);

  // a(t) for slot t; the estimate before slot 0 is zero.
  void update(const LifetimeTable& arrivals, std::int64_t t);

  const LifetimeTable& values() const { return avg_; }
  LifetimeTable& values() { return avg_; }
  std::int64_t forget_window() const { return window_; }

 private:
  LifetimeTable avg_;
  std::int64_t window_ = 1;
};

}  // namespace cnc
