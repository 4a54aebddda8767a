#pragma once

// Experiment sweeps over node density, malicious count and node speed.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slar/engine.hpp"
#include "slar/routing.hpp"

namespace slar::sweep {

enum class Family { Density, Malicious, Speed };

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view name);

struct SweepSpec {
  Family family = Family::Density;
  std::vector<double> values;
  engine::Scenario base;
  std::vector<routing::Protocol> protocols;
  int seeds = 10;
  std::uint64_t first_seed = 1;
  unsigned workers = 0;  // 0 = hardware concurrency
};

/// Density: N = 10..100 step 10, speed 5, 10% malicious.
/// Malicious: 2..12 step 2 attackers, N = 40, speed 5.
/// Speed: 5..40 step 5, N = 40, 10% malicious.
SweepSpec make_spec(Family family, const engine::Scenario& base,
                    std::vector<routing::Protocol> protocols, int seeds);

/// Scenario for one sweep point.
engine::Scenario scenario_for(const SweepSpec& spec, double value, routing::Protocol protocol,
                              std::uint64_t seed);

struct CsvRow {
  std::string family;
  double sweep_value = 0.0;
  std::string protocol;
  std::uint64_t seed = 0;
  int nodes = 0;
  int malicious = 0;
  std::string speed;  // fixed value, or "min:max" for a speed range
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  double delivery_pct = 0.0;
  std::optional<double> avg_delay_ms;  // written as "na" when absent
  std::uint64_t mitm_detections = 0;
  std::uint64_t rediscoveries = 0;

  friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

std::string_view csv_header();
std::string to_csv_line(const CsvRow& row);
/// Throws std::invalid_argument on a malformed line.
CsvRow parse_csv_line(std::string_view line);

CsvRow make_row(const SweepSpec& spec, double value, const engine::Scenario& scenario,
                const engine::MetricsReport& report);

/// One row per (value, protocol, seed), in that order regardless of which
/// worker finished first.
std::vector<CsvRow> run_sweep(const SweepSpec& spec);

struct SummaryRow {
  double sweep_value = 0.0;
  std::string protocol;
  int seeds = 0;
  double delivery_pct = 0.0;           // mean over seeds
  std::optional<double> avg_delay_ms;  // mean over seeds that delivered anything
  double mitm_detections = 0.0;
  double rediscoveries = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<CsvRow>& rows);
std::string format_summary(const std::vector<SummaryRow>& summary);

}  // namespace slar::sweep
