#include "trustsim/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trustsim/device.hpp"
#include "trustsim/errors.hpp"

namespace trustsim {
namespace {

std::string ms(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << v;
  return out.str();
}

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out;
}

double latency_ms(const CommittedRecord& r) {
  return to_ms(r.commit_time) - static_cast<double>(r.record.timestamp_ms);
}

}  // namespace

void TimingParams::validate() const {
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!nonneg(eps1_max_ms) || !nonneg(eps2_max_ms) || !nonneg(eps_s_abs_ms) || !nonneg(L_ms) ||
      !nonneg(delta_t_ms) || !nonneg(processing_jitter_ms)) {
    throw ConfigError("timing parameters must be finite and non-negative");
  }
  if (!(std::isfinite(delta_gst_max_ms) && delta_gst_max_ms > 0.0)) throw ConfigError("GST bound must be positive");
}

double delta_bound(const TimingParams& p) {
  return p.eps1_max_ms + p.eps2_max_ms + p.delta_gst_max_ms + p.L_ms + p.eps_s_abs_ms;
}

double delta_hat_bound(const TimingParams& p) {
  return p.delta_t_ms + p.delta_gst_max_ms + p.L_ms + p.eps_s_abs_ms + p.processing_jitter_ms;
}

AuditReport audit(const DigitalEntity& entity, const PublicKey& device_pk, const TimingParams& p) {
  if (entity.empty()) throw AuditError("entity has no committed records");
  p.validate();

  const auto& recs = entity.records();
  const std::size_t n = recs.size();
  AuditReport report;
  report.records = n;

  for (std::size_t i = 0; i < n; ++i) {
    if (!verify_record(recs[i].record, device_pk)) report.truthful.failing.push_back(i);
  }
  report.truthful.ok = report.truthful.failing.empty();

  // A record that is not the newest of its block was carried as backlog.
  std::vector<bool> recovered(n, false);
  for (std::size_t i = 0; i + 1 < n; ++i) recovered[i] = recs[i].depth == recs[i + 1].depth;

  const auto dt = static_cast<std::uint64_t>(std::llround(p.delta_t_ms));
  auto& cons = report.consistent;
  cons.bound_ms = delta_bound(p);
  for (std::size_t i = 0; i < n; ++i) {
    if (recovered[i]) {
      cons.recovered.push_back(i);
      if (recs[i + 1].record.timestamp_ms - recs[i].record.timestamp_ms != dt) cons.spacing_errors.push_back(i);
      continue;
    }
    double lat = latency_ms(recs[i]);
    cons.max_latency_ms = std::max(cons.max_latency_ms, lat);
    if (lat > cons.bound_ms) cons.late.push_back(i);
  }
  cons.ok = cons.late.empty() && cons.spacing_errors.empty();

  auto& cont = report.continuous;
  cont.bound_ms = delta_hat_bound(p);
  for (std::size_t i = 1; i < n; ++i) {
    double gap = to_ms(recs[i].commit_time - recs[i - 1].commit_time);
    if (gap <= cont.bound_ms) {
      cont.max_gap_ms = std::max(cont.max_gap_ms, gap);
      continue;
    }
    bool excused = false;
    std::size_t backlog = 0;
    if (recovered[i] && recs[i].record.timestamp_ms - recs[i - 1].record.timestamp_ms == dt) {
      std::size_t j = i;
      while (j + 1 < n && recs[j + 1].depth == recs[i].depth) {
        if (recs[j + 1].record.timestamp_ms - recs[j].record.timestamp_ms != dt) break;
        ++j;
      }
      bool tiled = j + 1 == n || recs[j + 1].depth != recs[i].depth;
      backlog = j - i;  // the last record of the block is the fresh one
      excused = tiled && backlog >= 1 && backlog <= p.max_fd;
    }
    if (excused) {
      cont.excused.push_back({i, gap, backlog});
    } else {
      cont.max_gap_ms = std::max(cont.max_gap_ms, gap);
      cont.violations.push_back(i);
    }
  }
  if (auto as_of = entity.as_of()) {
    double trailing = to_ms(*as_of - recs.back().commit_time);
    cont.trailing_gap_ms = trailing;
    cont.cutoff = trailing > cont.bound_ms;
  }
  cont.ok = cont.violations.empty() && !cont.cutoff;
  return report;
}

std::string format_report(const AuditReport& r) {
  std::ostringstream out;
  out << "records: " << r.records << "\n";

  if (r.truthful.ok) {
    out << "truthfulness: PASS\n";
  } else {
    out << "truthfulness: FAIL at index " << join(r.truthful.failing) << "\n";
  }

  const auto& c = r.consistent;
  out << "consistency: " << (c.ok ? "PASS" : "FAIL") << " (max T-t " << ms(c.max_latency_ms) << " ms, bound "
      << ms(c.bound_ms) << " ms, " << c.recovered.size() << " recovered)\n";
  if (!c.late.empty()) out << "  late at index " << join(c.late) << "\n";
  if (!c.spacing_errors.empty()) out << "  recovered off the sensing grid at index " << join(c.spacing_errors) << "\n";

  const auto& g = r.continuous;
  out << "continuity: " << (g.ok ? "PASS" : "FAIL") << " (max gap " << ms(g.max_gap_ms) << " ms, bound "
      << ms(g.bound_ms) << " ms, " << g.excused.size() << " excused)\n";
  for (const auto& e : g.excused) {
    out << "  excused gap before index " << e.index << ": " << ms(e.gap_ms) << " ms, " << e.backlog
        << " backlog records\n";
  }
  if (!g.violations.empty()) out << "  gap too long before index " << join(g.violations) << "\n";
  if (g.cutoff) out << "  FAIL at cutoff: no commit for " << ms(*g.trailing_gap_ms) << " ms after the last record\n";

  out << "verdict: " << (r.trustworthy() ? "trustworthy" : "untrustworthy") << "\n";
  return out.str();
}

void to_json(nlohmann::json& j, const AuditReport& r) {
  nlohmann::json excused = nlohmann::json::array();
  for (const auto& e : r.continuous.excused) {
    excused.push_back({{"index", e.index}, {"gap_ms", e.gap_ms}, {"backlog", e.backlog}});
  }
  j = {
      {"records", r.records},
      {"trustworthy", r.trustworthy()},
      {"truthful", {{"ok", r.truthful.ok}, {"failing", r.truthful.failing}}},
      {"consistent",
       {{"ok", r.consistent.ok},
        {"max_latency_ms", r.consistent.max_latency_ms},
        {"bound_ms", r.consistent.bound_ms},
        {"late", r.consistent.late},
        {"recovered", r.consistent.recovered},
        {"spacing_errors", r.consistent.spacing_errors}}},
      {"continuous",
       {{"ok", r.continuous.ok},
        {"max_gap_ms", r.continuous.max_gap_ms},
        {"bound_ms", r.continuous.bound_ms},
        {"excused", excused},
        {"violations", r.continuous.violations},
        {"cutoff", r.continuous.cutoff}}},
  };
  if (r.continuous.trailing_gap_ms) j["continuous"]["trailing_gap_ms"] = *r.continuous.trailing_gap_ms;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  // Shifted by the first value: a constant series gets an exact mean and zero variance.
  const double shift = values.front();
  double sum = 0.0;
  double sq = 0.0;
  s.min = s.max = shift;
  for (double v : values) {
    sum += v - shift;
    sq += (v - shift) * (v - shift);
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  double n = static_cast<double>(values.size());
  double d = sum / n;
  s.mean = shift + d;
  s.variance = std::max(0.0, sq / n - d * d);
  return s;
}

LatencyStats latency_stats(std::span<const RecordLifecycle> lifecycle) {
  std::vector<double> e1, e2, e3;
  double max_latency = 0.0;
  for (const auto& r : lifecycle) {
    if (!r.committed() || r.recovered || !r.sent_at || !r.arrived_at) continue;
    e1.push_back(to_ms(*r.sent_at - r.sensed_at));
    e2.push_back(to_ms(*r.arrived_at - *r.sent_at));
    e3.push_back(to_ms(*r.committed_at - *r.arrived_at));
    max_latency = std::max(max_latency, to_ms(*r.committed_at) - static_cast<double>(r.timestamp_ms));
  }
  return {summarize(e1), summarize(e2), summarize(e3), max_latency};
}

}  // namespace trustsim
