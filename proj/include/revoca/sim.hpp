#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "revoca/ahibe.hpp"
#include "revoca/canonical.hpp"
#include "revoca/tables.hpp"

// Seeded multi-day scenarios: one Issuer, a holder population, one Verifier
// on the in-process transport, and a ground-truth revocation ledger.
namespace revoca::sim {

struct ScenarioConfig {
  std::uint64_t holders = 200;
  std::uint64_t vcs_per_holder = 2;
  std::uint64_t days = 10;
  double daily_revocation_rate = 0.05;
  std::uint64_t presentations_per_day = 100;
  double past_auth_probability = 0.2;
  double future_auth_probability = 0.1;
  std::uint64_t rng_seed = 42;
  tables::TableParams params;
  ahibe::SecurityLevel scheme = ahibe::SecurityLevel::test;
  // Forged presentations per day, cycling through the four forgery kinds.
  std::uint64_t forgeries_per_day = 0;
  DayIndex first_day{1};

  // Throws Error(parameter).
  void validate() const;
  canonical::Value to_value() const;
  static ScenarioConfig from_value(const canonical::Value& v);
};

struct Counts {
  std::uint64_t presentations = 0;
  std::uint64_t checks = 0;  // authorizations given a verdict
  std::uint64_t revoked_verdicts = 0;
  std::uint64_t true_positives = 0;
  std::uint64_t true_negatives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t false_negatives = 0;
  std::uint64_t document_mismatches = 0;  // revoked, but not exactly the published documents
  std::uint64_t deferred = 0;
  std::uint64_t deferred_resolved = 0;
  std::map<std::string, std::uint64_t> rejections;  // honest presentations, by error class
  std::uint64_t forged = 0;
  std::uint64_t forged_rejected = 0;
  std::uint64_t forged_wrong_class = 0;
  std::uint64_t segment_bytes = 0;
  std::uint64_t table_bytes = 0;
  std::uint64_t holder_bytes = 0;
  std::uint64_t holder_bytes_max = 0;

  void add(const Counts& other);
  canonical::Value to_value() const;
};

struct DayReport {
  DayIndex day;
  std::uint64_t revocations_published = 0;
  std::uint64_t active_credentials = 0;
  Counts counts;
  std::uint64_t table_size = 0;  // d
  std::uint64_t overflow_entries = 0;
  std::uint64_t overflow_max = 0;
  std::uint64_t check_table_bytes = 0;
  std::uint64_t revocation_table_bytes = 0;
  double rebuild_ms = 0;  // wall time; text table only

  canonical::Value to_value() const;
};

struct ScenarioReport {
  ScenarioConfig config;
  std::vector<DayReport> days;
  Counts total;
  std::uint64_t deferred_unresolved = 0;

  // Canonical form. Excludes wall-time so that it is a function of the config.
  canonical::Value to_value() const;
  Bytes encode() const;
  std::string text_table() const;
};

ScenarioReport run(const ScenarioConfig& config);

// Fixed-point rendering used for ratios in canonical documents.
std::string ratio_text(std::uint64_t num, std::uint64_t den);

}  // namespace revoca::sim
