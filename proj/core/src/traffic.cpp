#include "cnc/traffic.hpp"

namespace cnc {

ArrivalProcess::ArrivalProcess(std::vector<ArrivalEntry> entries, ArrivalKind kind)
    : entries_(std::move(entries)), kind_(kind) {
  for (const auto& e : entries_) {
    if (e.rate < 0.0 || e.rate_after < 0.0) throw ConfigError("arrival rates must be non-negative");
    if (e.lifetime < 1) throw ConfigError("arrival lifetime must be at least 1");
  }
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t trial_seed, std::uint64_t stream) {
  return mix_seed(mix_seed(trial_seed) ^ mix_seed(stream + 0x51ED270B0E5A3C1DULL));
}

ArrivalStreams::ArrivalStreams(std::uint64_t trial_seed, std::size_t num_commodities) {
  engines_.reserve(num_commodities);
  for (std::size_t c = 0; c < num_commodities; ++c) engines_.emplace_back(stream_seed(trial_seed, c));
}

std::vector<double> sample_arrivals(const ArrivalProcess& process, ArrivalStreams& streams) {
  std::vector<double> out;
  out.reserve(process.entries().size());
  for (const auto& e : process.entries()) {
    const double mean = process.current_rate(e);
    if (mean <= 0.0) {
      out.push_back(0.0);
      continue;
    }
    std::poisson_distribution<long long> dist(mean);
    out.push_back(static_cast<double>(dist(streams.stream(static_cast<std::size_t>(e.commodity)))));
  }
  return out;
}

FadingAverage::FadingAverage(std::size_t rows, int max_lifetime, std::int64_t forget_window)
    : avg_(rows, max_lifetime), window_(forget_window) {
  if (forget_window < 1) throw ConfigError("fading-memory window must be at least 1");
}

void FadingAverage::update(const LifetimeTable& arrivals, std::int64_t t) {
  auto dst = avg_.raw();
  auto src = arrivals.raw();
  if (t >= window_) {
    const double keep = static_cast<double>(window_ - 1);
    const double inv = 1.0 / static_cast<double>(window_);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (keep * dst[i] + src[i]) * inv;
  } else {
    const double keep = static_cast<double>(t);
    const double inv = 1.0 / static_cast<double>(t + 1);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (keep * dst[i] + src[i]) * inv;
  }
}

}  // namespace cnc
