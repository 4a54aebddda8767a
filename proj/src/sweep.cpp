#include "slar/sweep.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace slar::sweep {

namespace {

std::vector<double> range(double first, double last, double step) {
  std::vector<double> v;
  for (double x = first; x <= last + 1e-9; x += step) v.push_back(x);
  return v;
}

std::string format_number(double v) { return fmt::format("{}", v); }

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_int(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument(fmt::format("bad integer '{}'", s));
  }
  return v;
}

double parse_double(std::string_view s) {
  try {
    std::size_t used = 0;
    const std::string text(s);
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(fmt::format("bad number '{}'", s));
  }
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Density: return "density";
    case Family::Malicious: return "malicious";
    case Family::Speed: return "speed";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view name) {
  for (auto f : {Family::Density, Family::Malicious, Family::Speed}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

SweepSpec make_spec(Family family, const engine::Scenario& base,
                    std::vector<routing::Protocol> protocols, int seeds) {
  SweepSpec spec;
  spec.family = family;
  spec.base = base;
  spec.protocols = std::move(protocols);
  spec.seeds = seeds;
  switch (family) {
    case Family::Density: spec.values = range(10, 100, 10); break;
    case Family::Malicious: spec.values = range(2, 12, 2); break;
    case Family::Speed: spec.values = range(5, 40, 5); break;
  }
  return spec;
}

engine::Scenario scenario_for(const SweepSpec& spec, double value, routing::Protocol protocol,
                              std::uint64_t seed) {
  engine::Scenario s = spec.base;
  s.protocol = protocol;
  s.seed = seed;
  switch (spec.family) {
    case Family::Density:
      s.nodes = static_cast<int>(value);
      s.mobility.speed_min = s.mobility.speed_max = 5.0;
      s.malicious_count.reset();
      s.malicious_fraction = 0.1;
      break;
    case Family::Malicious:
      s.nodes = 40;
      s.mobility.speed_min = s.mobility.speed_max = 5.0;
      s.malicious_count = static_cast<int>(value);
      break;
    case Family::Speed:
      s.nodes = 40;
      s.mobility.speed_min = s.mobility.speed_max = value;
      s.malicious_count.reset();
      s.malicious_fraction = 0.1;
      break;
  }
  return s;
}

std::string_view csv_header() {
  return "family,sweep_value,protocol,seed,nodes,malicious,speed,sent,delivered,delivery_pct,"
         "avg_delay_ms,mitm_detections,rediscoveries";
}

std::string to_csv_line(const CsvRow& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}", r.family,
                     format_number(r.sweep_value), r.protocol, r.seed, r.nodes, r.malicious,
                     r.speed, r.sent, r.delivered, format_number(r.delivery_pct),
                     r.avg_delay_ms ? format_number(*r.avg_delay_ms) : std::string("na"),
                     r.mitm_detections, r.rediscoveries);
}

CsvRow parse_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto f = split(line, ',');
  if (f.size() != 13) {
    throw std::invalid_argument(fmt::format("expected 13 columns, got {}", f.size()));
  }
  CsvRow r;
  r.family = std::string(f[0]);
  r.sweep_value = parse_double(f[1]);
  r.protocol = std::string(f[2]);
  r.seed = parse_int<std::uint64_t>(f[3]);
  r.nodes = parse_int<int>(f[4]);
  r.malicious = parse_int<int>(f[5]);
  r.speed = std::string(f[6]);
  r.sent = parse_int<std::uint64_t>(f[7]);
  r.delivered = parse_int<std::uint64_t>(f[8]);
  r.delivery_pct = parse_double(f[9]);
  if (f[10] != "na") r.avg_delay_ms = parse_double(f[10]);
  r.mitm_detections = parse_int<std::uint64_t>(f[11]);
  r.rediscoveries = parse_int<std::uint64_t>(f[12]);
  return r;
}

CsvRow make_row(const SweepSpec& spec, double value, const engine::Scenario& s,
                const engine::MetricsReport& report) {
  CsvRow r;
  r.family = std::string(to_string(spec.family));
  r.sweep_value = value;
  r.protocol = std::string(routing::to_string(s.protocol));
  r.seed = s.seed;
  r.nodes = s.nodes;
  r.malicious = s.resolved_malicious();
  r.speed = s.mobility.speed_min == s.mobility.speed_max
                ? format_number(s.mobility.speed_min)
                : fmt::format("{}:{}", format_number(s.mobility.speed_min),
                              format_number(s.mobility.speed_max));
  r.sent = report.packets_sent;
  r.delivered = report.packets_delivered;
  r.delivery_pct = report.delivery_pct;
  if (report.avg_total_delay) r.avg_delay_ms = *report.avg_total_delay * 1000.0;
  r.mitm_detections = report.mitm_detections;
  r.rediscoveries = report.route_rediscoveries;
  return r;
}

std::vector<CsvRow> run_sweep(const SweepSpec& spec) {
  if (spec.seeds <= 0) throw engine::ConfigError("seeds must be positive");
  if (spec.protocols.empty()) throw engine::ConfigError("no protocols selected");

  struct Job {
    double value;
    routing::Protocol protocol;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double v : spec.values) {
    for (auto p : spec.protocols) {
      for (int i = 0; i < spec.seeds; ++i) {
        jobs.push_back({v, p, spec.first_seed + static_cast<std::uint64_t>(i)});
      }
    }
  }
  // Validate up front so a bad config fails before any work starts.
  for (const auto& j : jobs) scenario_for(spec, j.value, j.protocol, j.seed).validate();

  std::vector<CsvRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto s = scenario_for(spec, jobs[i].value, jobs[i].protocol, jobs[i].seed);
        rows[i] = make_row(spec, jobs[i].value, s, engine::run(s));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned workers = spec.workers ? spec.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<CsvRow>& rows) {
  struct Acc {
    int n = 0;
    double delivery = 0.0;
    double delay = 0.0;
    int delay_n = 0;
    double mitm = 0.0;
    double redisc = 0.0;
  };
  // Keep first-seen order of (value, protocol).
  std::vector<std::pair<double, std::string>> order;
  std::map<std::pair<double, std::string>, Acc> acc;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.sweep_value, r.protocol);
    auto [it, inserted] = acc.try_emplace(key);
    if (inserted) order.push_back(key);
    auto& a = it->second;
    ++a.n;
    a.delivery += r.delivery_pct;
    if (r.avg_delay_ms) {
      a.delay += *r.avg_delay_ms;
      ++a.delay_n;
    }
    a.mitm += static_cast<double>(r.mitm_detections);
    a.redisc += static_cast<double>(r.rediscoveries);
  }
  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    const auto& a = acc.at(key);
    SummaryRow s;
    s.sweep_value = key.first;
    s.protocol = key.second;
    s.seeds = a.n;
    s.delivery_pct = a.delivery / a.n;
    if (a.delay_n > 0) s.avg_delay_ms = a.delay / a.delay_n;
    s.mitm_detections = a.mitm / a.n;
    s.rediscoveries = a.redisc / a.n;
    out.push_back(s);
  }
  return out;
}

std::string format_summary(const std::vector<SummaryRow>& summary) {
  std::string out = fmt::format("{:>8}  {:<12} {:>5} {:>12} {:>12} {:>8} {:>8}\n", "value",
                                "protocol", "seeds", "delivery_%", "delay_ms", "mitm", "redisc");
  for (const auto& s : summary) {
    out += fmt::format("{:>8}  {:<12} {:>5} {:>12.2f} {:>12} {:>8.1f} {:>8.1f}\n",
                       format_number(s.sweep_value), s.protocol, s.seeds, s.delivery_pct,
                       s.avg_delay_ms ? fmt::format("{:.3f}", *s.avg_delay_ms) : "na",
                       s.mitm_detections, s.rediscoveries);
  }
  return out;
}

}  // namespace slar::sweep
