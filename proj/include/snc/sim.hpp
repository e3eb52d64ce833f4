#pragma once

#include "snc/analysis.hpp"
#include "snc/channel.hpp"
#include "snc/codec.hpp"
#include "snc/design.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace snc {

struct KRepScheme {
  int repetitions = 3;
};

struct SncScheme {
  SncDesign design;
};

/// Block RLNC over consecutive batches of the session's packets; each batch
/// of B packets is sent as B*K coded packets and decoded once.
struct BlockNcScheme {
  int repetitions = 3;        ///< K, coded packets per data packet
  std::uint64_t batch = 0;    ///< B; 0 means the whole session
  unsigned field_size = 2;
  bool exclude_zero = false;
};

using Scheme = std::variant<KRepScheme, SncScheme, BlockNcScheme>;

/// Short scheme label used in tables: "krep", "snc:<design name>", "block_nc".
std::string scheme_label(const Scheme& scheme);
/// K, D and q columns for a scheme (D = 0 and q = 0 where they do not apply).
struct SchemeShape {
  int slots = 0;
  int delay = 0;
  unsigned field_size = 0;
};
SchemeShape scheme_shape(const Scheme& scheme);

struct SimConfig {
  Scheme scheme = KRepScheme{};
  ChannelModel channel = ChannelModel::fixed(0.0);
  std::uint64_t packets = 100;  ///< M, data packets per session
  std::uint64_t sessions = 1;
  std::size_t payload_len = 8;
  std::uint64_t master_seed = 1;
  DecoderMode decoder = DecoderMode::FullGaussian;
  unsigned threads = 1;  ///< 0 picks the hardware concurrency
  bool trace = false;    ///< keep per-deadline failure flags
};

/// Throws ParameterError for an invalid configuration.
void validate(const SimConfig& cfg);

struct SessionStats {
  std::uint64_t deadlines = 0;
  std::uint64_t failures = 0;
  std::uint64_t retransmissions = 0;
  std::vector<std::uint8_t> trace;  ///< failure flag per deadline, when enabled
};

/// Runs one session; a pure function of (cfg, session_index).
SessionStats run_session(const SimConfig& cfg, std::uint64_t session_index);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t n = 0;
  std::uint64_t events = 0;
};

/// Bernoulli estimate from `events` out of `n` trials: normal 95% interval,
/// or the exact one-sided upper limit when no event was observed.
Estimate make_estimate(std::uint64_t events, std::uint64_t n);

/// Order-independent totals over all sessions of a configuration.
struct Aggregate {
  std::uint64_t sessions = 0;
  std::uint64_t deadlines = 0;
  std::uint64_t failures = 0;
  std::uint64_t failed_sessions = 0;  ///< sessions with at least one failure
  std::map<std::uint64_t, std::uint64_t> retransmission_counts;  ///< count -> sessions
  std::vector<std::uint64_t> failures_by_deadline;               ///< with cfg.trace

  void merge(const Aggregate& other);
};

/// Runs all sessions, split into contiguous chunks over cfg.threads workers.
Aggregate run_sessions(const SimConfig& cfg);

Estimate estimate_error_rate(const SimConfig& cfg);
Estimate estimate_error_rate(const Aggregate& agg);
/// Probability that a session needs at least one retransmission.
Estimate estimate_session_failure(const Aggregate& agg);
std::map<std::uint64_t, double> retx_histogram(const SimConfig& cfg);
std::map<std::uint64_t, double> retx_histogram(const Aggregate& agg);
/// Pooled failure rate per deadline position; empty unless cfg.trace was set.
std::vector<double> error_trace(const Aggregate& agg);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxisKind { Epsilon, Slots };

struct SweepAxis {
  SweepAxisKind kind = SweepAxisKind::Epsilon;
  std::vector<double> values;
};

struct KRepFamily {
  int repetitions = 3;
};
struct SncSimpleFamily {
  int slots = 3;
};
struct SncMinDelayFamily {
  int slots = 3;
  unsigned field_size = 2;
};
struct SncFixedFamily {
  SncDesign design;
};
struct BlockNcFamily {
  int repetitions = 3;
  std::uint64_t batch = 0;
  unsigned field_size = 2;
  bool exclude_zero = false;
};

using SchemeFamily = std::variant<KRepFamily, SncSimpleFamily, SncMinDelayFamily, SncFixedFamily, BlockNcFamily>;

/// Concrete scheme for a family at K (ignored when the family has no K
/// parameter; a Slots axis over a fixed design throws ParameterError).
Scheme instantiate(const SchemeFamily& family, std::optional<int> slots);

/// Closed-form counterpart of one simulated point.
struct AnalyticValue {
  std::optional<double> exact;
  std::optional<double> leading;
  bool is_upper_bound = false;
  /// True when the value is a per-session failure probability (block RLNC)
  /// rather than a per-deadline rate.
  bool per_session = false;
};

AnalyticValue analytic_for(const Scheme& scheme, double epsilon, std::uint64_t packets);

struct SweepRow {
  Scheme scheme;
  double epsilon = 0.0;
  Estimate deadline_rate;
  Estimate session_failure;
  std::uint64_t deadlines = 0;
  std::uint64_t failures = 0;
  AnalyticValue analytic;
};

/// Epsilon axis: the template channel is replaced by a fixed erasure model.
std::vector<SweepRow> sweep(const SimConfig& base, const SweepAxis& axis, const std::vector<SchemeFamily>& schemes);

}  // namespace snc
