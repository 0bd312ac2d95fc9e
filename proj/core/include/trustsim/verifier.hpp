#pragma once

// The auditor. Decides whether a committed digital entity is trustworthy:
// every signature verifies, every sensed event became available on chain
// within delta of being sensed, and no two consecutive commits are further
// apart than delta-hat unless the later block carries a correctly tiled
// backlog of recovered records.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trustsim/crypto.hpp"
#include "trustsim/types.hpp"

namespace trustsim {

struct TimingParams {
  double eps1_max_ms = 0.0;
  double eps2_max_ms = 0.0;
  double eps_s_abs_ms = 0.0;
  double delta_gst_max_ms = 0.0;
  double L_ms = 0.0;
  double delta_t_ms = 0.0;
  std::size_t max_fd = 0;
  // Spread of eps1 + eps2 between two records. Zero when both are constant.
  double processing_jitter_ms = 0.0;

  // Throws ConfigError.
  void validate() const;
};

// eps1 + eps2 + dGST + L + |eps_s|
double delta_bound(const TimingParams& p);
// dt + dGST + L + |eps_s| (+ jitter)
double delta_hat_bound(const TimingParams& p);

struct TruthVerdict {
  bool ok = true;
  std::vector<std::size_t> failing;
};

struct ConsistencyVerdict {
  bool ok = true;
  double max_latency_ms = 0.0;  // over records that were not recovered
  double bound_ms = 0.0;
  std::vector<std::size_t> late;            // T - t above the bound
  std::vector<std::size_t> recovered;       // exempt from the bound
  std::vector<std::size_t> spacing_errors;  // recovered but not at dt spacing
};

struct ExcusedGap {
  std::size_t index = 0;  // gap between index-1 and index
  double gap_ms = 0.0;
  std::size_t backlog = 0;
};

struct ContinuityVerdict {
  bool ok = true;
  double max_gap_ms = 0.0;  // largest gap that was not excused
  double bound_ms = 0.0;
  std::vector<ExcusedGap> excused;
  std::vector<std::size_t> violations;  // index of the later record of the gap
  std::optional<double> trailing_gap_ms;
  bool cutoff = false;  // the trailing gap exceeds the bound
};

struct AuditReport {
  std::size_t records = 0;
  TruthVerdict truthful;
  ConsistencyVerdict consistent;
  ContinuityVerdict continuous;

  bool trustworthy() const { return truthful.ok && consistent.ok && continuous.ok; }
};

// Pure. Throws AuditError on an empty entity.
AuditReport audit(const DigitalEntity& entity, const PublicKey& device_pk, const TimingParams& p);

// Human-readable, one verdict per line.
std::string format_report(const AuditReport& report);
void to_json(nlohmann::json& j, const AuditReport& report);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> values);

struct LatencyStats {
  Summary eps1;  // send - sense
  Summary eps2;  // arrival - send
  Summary eps3;  // BCT - arrival
  double max_latency_ms = 0.0;  // T - t
};

// Over committed records that were not recovered.
LatencyStats latency_stats(std::span<const RecordLifecycle> lifecycle);

}  // namespace trustsim
