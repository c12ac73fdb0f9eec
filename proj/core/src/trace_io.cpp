#include "cnc/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace cnc {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("trace csv: bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void write_trace_csv(std::ostream& os, const TrialTrace& trace, std::uint64_t seed) {
  const std::size_t C = trace.commodities;
  os << "# trace v1\n# seed," << seed << "\n# outage_time," << trace.outage_time << "\n# final_scaling";
  for (double xi : trace.final_scaling) os << ',' << format_double(xi);
  os << "\nt";
  for (std::size_t c = 1; c <= C; ++c) {
    os << ",arrivals_c" << c << ",deliveries_c" << c << ",expired_c" << c << ",cost_c" << c;
  }
  os << ",virtual_queue_total,request_norm,backlog\n";
  std::string row;
  for (std::int64_t t = 0; t < trace.slots; ++t) {
    row = std::to_string(t);
    for (std::size_t c = 0; c < C; ++c) {
      for (const auto* s : {&trace.arrivals, &trace.deliveries, &trace.expired, &trace.cost}) {
        row += ',';
        row += format_double(trace.at(*s, t, c));
      }
    }
    const auto k = static_cast<std::size_t>(t);
    for (const auto* s : {&trace.virtual_queue_total, &trace.request_norm, &trace.backlog}) {
      row += ',';
      row += format_double((*s)[k]);
    }
    row += '\n';
    os << row;
  }
}

TrialTrace read_trace_csv(std::istream& is) {
  TrialTrace tr;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto f = split(std::string_view(line).substr(2));
      if (f[0] == "outage_time" && f.size() == 2) tr.outage_time = std::stoll(std::string(f[1]));
      if (f[0] == "final_scaling") {
        for (std::size_t i = 1; i < f.size(); ++i) tr.final_scaling.push_back(parse_double(f[i]));
      }
      continue;
    }
    const auto f = split(line);
    if (!header) {
      if (f.size() < 4 || (f.size() - 4) % 4 != 0) throw IoError("trace csv: unexpected header");
      tr.commodities = (f.size() - 4) / 4;
      if (tr.final_scaling.size() != tr.commodities) throw IoError("trace csv: final_scaling does not match columns");
      header = true;
      continue;
    }
    if (f.size() != 4 + 4 * tr.commodities) throw IoError("trace csv: row " + std::to_string(tr.slots) + " has wrong width");
    if (parse_double(f[0]) != static_cast<double>(tr.slots)) throw IoError("trace csv: rows out of order");
    std::size_t i = 1;
    for (std::size_t c = 0; c < tr.commodities; ++c) {
      for (auto* s : {&tr.arrivals, &tr.deliveries, &tr.expired, &tr.cost}) s->push_back(parse_double(f[i++]));
    }
    for (auto* s : {&tr.virtual_queue_total, &tr.request_norm, &tr.backlog}) s->push_back(parse_double(f[i++]));
    ++tr.slots;
  }
  if (!header) throw IoError("trace csv: missing header");
  return tr;
}

void save_trace_csv(const std::filesystem::path& path, const TrialTrace& trace, std::uint64_t seed) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_trace_csv(os, trace, seed);
  if (!os) throw IoError("write failed: " + path.string());
}

TrialTrace load_trace_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_trace_csv(is);
}

}  // namespace cnc
