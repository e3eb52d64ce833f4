#include "snc/sim.hpp"

#include "snc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

namespace snc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t batch_size(const BlockNcScheme& s, std::uint64_t packets) {
  return s.batch == 0 ? packets : s.batch;
}

bool same_payload(std::span<const Symbol> a, std::span<const Symbol> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

void record(SessionStats& stats, bool failed, bool trace) {
  ++stats.deadlines;
  if (failed) {
    ++stats.failures;
    ++stats.retransmissions;
  }
  if (trace) stats.trace.push_back(failed ? 1 : 0);
}

SessionStats run_krep(const SimConfig& cfg, const KRepScheme& scheme, std::uint64_t index) {
  auto payload_rng = RandomStream::for_session(cfg.master_seed, index, StreamPurpose::Payload);
  auto channel_rng = RandomStream::for_session(cfg.master_seed, index, StreamPurpose::Channel);
  const double eps = cfg.channel.epsilon();
  const std::size_t len = cfg.payload_len;

  std::vector<Symbol> data(cfg.packets * len);
  payload_rng.fill_bits(std::span<Symbol>(data), 8);

  SessionStats stats;
  std::vector<ReceivedPacket> received;
  for (std::uint64_t i = 0; i < cfg.packets; ++i) {
    const std::span<const Symbol> x(data.data() + i * len, len);
    const auto block = static_cast<DataIndex>(i + 1);
    received.clear();
    for (auto& p : krep_encode(scheme.repetitions, block, x)) {
      if (draw_erasure(eps, channel_rng)) {
        received.push_back(ReceivedPacket::lost(p.block, p.slot));
      } else {
        received.push_back(ReceivedPacket::intact(std::move(p)));
      }
    }
    const DecodeOutcome out = krep_decode(received);
    if (out.decoded() && !same_payload(*out.payload, x)) {
      throw ContractViolation("repetition decoder returned a wrong payload for X_" + std::to_string(block));
    }
    record(stats, !out.decoded(), cfg.trace);
  }
  return stats;
}

SessionStats run_snc(const SimConfig& cfg, const SncDesign& design, std::uint64_t index) {
  auto payload_rng = RandomStream::for_session(cfg.master_seed, index, StreamPurpose::Payload);
  auto channel_rng = RandomStream::for_session(cfg.master_seed, index, StreamPurpose::Channel);
  const double eps = cfg.channel.epsilon();
  const std::size_t len = cfg.payload_len;
  const auto M = static_cast<DataIndex>(cfg.packets);
  const int K = design.slots();
  const int D = design.delay();

  std::vector<Symbol> data(cfg.packets * len);
  payload_rng.fill_bits(std::span<Symbol>(data), design.field().degree());
  const std::vector<Symbol> zeros(len, 0);
  const PayloadAccessor source = [&](DataIndex j) -> std::span<const Symbol> {
    if (j < 1 || j > M) return zeros;
    return {data.data() + static_cast<std::size_t>(j - 1) * len, len};
  };

  SncReceiver rx(design, len, cfg.decoder, source, M);
  std::vector<CodedPacket> sent;
  std::vector<ReceivedPacket> received(static_cast<std::size_t>(K));
  SessionStats stats;
  for (DataIndex b = 1; b <= M + D; ++b) {
    snc_encode_block_into(design, b, source, len, sent);
    for (int k = 0; k < K; ++k) {
      auto& rp = received[static_cast<std::size_t>(k)];
      rp.block = b;
      rp.slot = k + 1;
      if (draw_erasure(eps, channel_rng)) {
        rp.packet.reset();
      } else if (rp.packet) {
        *rp.packet = sent[static_cast<std::size_t>(k)];
      } else {
        rp.packet = sent[static_cast<std::size_t>(k)];
      }
    }
    rx.ingest(received);
    if (b <= D) continue;
    const DataIndex t = b - D;
    const bool ok = rx.decode_deadline_status(t) == DecodeStatus::Decoded;
    if (ok && !same_payload(*rx.known_payload(t), source(t))) {
      throw ContractViolation("sliding decoder returned a wrong payload for X_" + std::to_string(t));
    }
    record(stats, !ok, cfg.trace);
  }
  return stats;
}

SessionStats run_block_nc(const SimConfig& cfg, const BlockNcScheme& scheme, std::uint64_t index) {
  auto payload_rng = RandomStream::for_session(cfg.master_seed, index, StreamPurpose::Payload);
  auto channel_rng = RandomStream::for_session(cfg.master_seed, index, StreamPurpose::Channel);
  auto coding_rng = RandomStream::for_session(cfg.master_seed, index, StreamPurpose::Coding);
  const Field& field = Field::of_size(scheme.field_size);
  const double eps = cfg.channel.epsilon();
  const std::uint64_t B = batch_size(scheme, cfg.packets);

  SessionStats stats;
  std::vector<Payload> data;
  std::vector<ReceivedPacket> received;
  for (std::uint64_t start = 0; start < cfg.packets; start += B) {
    const std::uint64_t count = std::min(B, cfg.packets - start);
    data.assign(count, Payload(cfg.payload_len));
    for (auto& x : data) payload_rng.fill_bits(std::span<Symbol>(x), field.degree());
    const auto first = static_cast<DataIndex>(start + 1);
    const auto coded = count * static_cast<std::uint64_t>(scheme.repetitions);
    received.clear();
    for (auto& p : rlnc_encode(data, coded, field, coding_rng, scheme.exclude_zero, first)) {
      if (draw_erasure(eps, channel_rng)) {
        received.push_back(ReceivedPacket::lost(p.block, p.slot));
      } else {
        received.push_back(ReceivedPacket::intact(std::move(p)));
      }
    }
    const RlncDecodeResult result = rlnc_decode(received, count, field, first);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto& got = result.payloads[i];
      if (got && !same_payload(*got, data[i])) {
        throw ContractViolation("block decoder returned a wrong payload for X_" + std::to_string(first + i));
      }
      record(stats, !got.has_value(), cfg.trace);
    }
  }
  return stats;
}

unsigned worker_count(const SimConfig& cfg) {
  unsigned n = cfg.threads;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(n, cfg.sessions));
}

void add_session(Aggregate& agg, const SessionStats& s) {
  ++agg.sessions;
  agg.deadlines += s.deadlines;
  agg.failures += s.failures;
  if (s.retransmissions > 0) ++agg.failed_sessions;
  ++agg.retransmission_counts[s.retransmissions];
  if (!s.trace.empty()) {
    if (agg.failures_by_deadline.size() < s.trace.size()) agg.failures_by_deadline.resize(s.trace.size(), 0);
    for (std::size_t i = 0; i < s.trace.size(); ++i) agg.failures_by_deadline[i] += s.trace[i];
  }
}

}  // namespace

std::string scheme_label(const Scheme& scheme) {
  return std::visit(overloaded{
                        [](const KRepScheme&) { return std::string("krep"); },
                        [](const SncScheme& s) { return "snc:" + s.design.name(); },
                        [](const BlockNcScheme&) { return std::string("block_nc"); },
                    },
                    scheme);
}

SchemeShape scheme_shape(const Scheme& scheme) {
  return std::visit(overloaded{
                        [](const KRepScheme& s) { return SchemeShape{s.repetitions, 0, 0}; },
                        [](const SncScheme& s) {
                          return SchemeShape{s.design.slots(), s.design.delay(), s.design.field_size()};
                        },
                        [](const BlockNcScheme& s) { return SchemeShape{s.repetitions, 0, s.field_size}; },
                    },
                    scheme);
}

void validate(const SimConfig& cfg) {
  if (cfg.sessions < 1) throw ParameterError("sessions must be >= 1");
  if (cfg.packets < 1) throw ParameterError("packets (M) must be >= 1");
  if (cfg.payload_len < 1) throw ParameterError("payload_len must be >= 1");
  std::visit(overloaded{
                 [](const KRepScheme& s) {
                   if (s.repetitions < 1) throw ParameterError("scheme.K must be >= 1 for krep");
                 },
                 [](const SncScheme&) {},
                 [&](const BlockNcScheme& s) {
                   if (s.repetitions < 1) throw ParameterError("scheme.K must be >= 1 for block_nc");
                   if (s.batch > cfg.packets) throw ParameterError("scheme.batch must not exceed packets (M)");
                   Field::of_size(s.field_size);
                 },
             },
             cfg.scheme);
}

SessionStats run_session(const SimConfig& cfg, std::uint64_t session_index) {
  validate(cfg);
  return std::visit(overloaded{
                        [&](const KRepScheme& s) { return run_krep(cfg, s, session_index); },
                        [&](const SncScheme& s) { return run_snc(cfg, s.design, session_index); },
                        [&](const BlockNcScheme& s) { return run_block_nc(cfg, s, session_index); },
                    },
                    cfg.scheme);
}

Estimate make_estimate(std::uint64_t events, std::uint64_t n) {
  if (n == 0) throw ParameterError("estimate needs at least one trial");
  if (events > n) throw ParameterError("events exceed trials");
  Estimate e;
  e.n = n;
  e.events = events;
  const double dn = static_cast<double>(n);
  e.mean = static_cast<double>(events) / dn;
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / dn);
  if (events == 0) {
    e.ci_low = 0.0;
    e.ci_high = 1.0 - std::pow(0.025, 1.0 / dn);
  } else if (events == n) {
    e.ci_low = std::pow(0.025, 1.0 / dn);
    e.ci_high = 1.0;
  } else {
    e.ci_low = std::max(0.0, e.mean - 1.96 * e.std_error);
    e.ci_high = std::min(1.0, e.mean + 1.96 * e.std_error);
  }
  return e;
}

void Aggregate::merge(const Aggregate& other) {
  sessions += other.sessions;
  deadlines += other.deadlines;
  failures += other.failures;
  failed_sessions += other.failed_sessions;
  for (const auto& [k, v] : other.retransmission_counts) retransmission_counts[k] += v;
  if (failures_by_deadline.size() < other.failures_by_deadline.size()) {
    failures_by_deadline.resize(other.failures_by_deadline.size(), 0);
  }
  for (std::size_t i = 0; i < other.failures_by_deadline.size(); ++i) {
    failures_by_deadline[i] += other.failures_by_deadline[i];
  }
}

Aggregate run_sessions(const SimConfig& cfg) {
  validate(cfg);
  const unsigned workers = worker_count(cfg);
  std::vector<Aggregate> parts(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    const std::uint64_t begin = cfg.sessions * w / workers;
    const std::uint64_t end = cfg.sessions * (w + 1) / workers;
    try {
      for (std::uint64_t i = begin; i < end; ++i) add_session(parts[w], run_session(cfg, i));
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Aggregate total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

Estimate estimate_error_rate(const Aggregate& agg) { return make_estimate(agg.failures, agg.deadlines); }

Estimate estimate_error_rate(const SimConfig& cfg) { return estimate_error_rate(run_sessions(cfg)); }

Estimate estimate_session_failure(const Aggregate& agg) { return make_estimate(agg.failed_sessions, agg.sessions); }

std::map<std::uint64_t, double> retx_histogram(const Aggregate& agg) {
  std::map<std::uint64_t, double> out;
  if (agg.sessions == 0) return out;
  const double n = static_cast<double>(agg.sessions);
  for (const auto& [k, v] : agg.retransmission_counts) out[k] = static_cast<double>(v) / n;
  return out;
}

std::map<std::uint64_t, double> retx_histogram(const SimConfig& cfg) { return retx_histogram(run_sessions(cfg)); }

std::vector<double> error_trace(const Aggregate& agg) {
  std::vector<double> out(agg.failures_by_deadline.size());
  if (agg.sessions == 0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(agg.failures_by_deadline[i]) / static_cast<double>(agg.sessions);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

Scheme instantiate(const SchemeFamily& family, std::optional<int> slots) {
  return std::visit(overloaded{
                        [&](const KRepFamily& f) -> Scheme { return KRepScheme{slots.value_or(f.repetitions)}; },
                        [&](const SncSimpleFamily& f) -> Scheme {
                          return SncScheme{builtin("simple:" + std::to_string(slots.value_or(f.slots)))};
                        },
                        [&](const SncMinDelayFamily& f) -> Scheme {
                          return SncScheme{generate_min_delay(slots.value_or(f.slots), f.field_size)};
                        },
                        [&](const SncFixedFamily& f) -> Scheme {
                          if (slots) throw ParameterError("a fixed SNC design cannot be swept over K");
                          return SncScheme{f.design};
                        },
                        [&](const BlockNcFamily& f) -> Scheme {
                          return BlockNcScheme{slots.value_or(f.repetitions), f.batch, f.field_size, f.exclude_zero};
                        },
                    },
                    family);
}

AnalyticValue analytic_for(const Scheme& scheme, double epsilon, std::uint64_t packets) {
  return std::visit(
      overloaded{
          [&](const KRepScheme& s) {
            const ErrorEstimate e = krep_error(epsilon, s.repetitions);
            return AnalyticValue{e.exact, e.leading, false, false};
          },
          [&](const SncScheme& s) {
            if (is_simple_design(s.design)) {
              const ErrorEstimate e = snc_simple_error(epsilon, s.design.slots());
              return AnalyticValue{e.exact, e.leading, true, false};
            }
            if (check_diag_condition(s.design)) {
              const ErrorEstimate e = snc_lemma3_bound(epsilon, s.design);
              return AnalyticValue{std::nullopt, e.leading, true, false};
            }
            return AnalyticValue{};
          },
          [&](const BlockNcScheme& s) {
            const std::uint64_t B = batch_size(s, packets);
            const auto K = static_cast<std::uint64_t>(s.repetitions);
            const std::uint64_t full = packets / B;
            const std::uint64_t rest = packets % B;
            double success = std::pow(rlnc_all_success(B * K, B, epsilon, s.field_size), static_cast<double>(full));
            if (rest > 0) success *= rlnc_all_success(rest * K, rest, epsilon, s.field_size);
            double failure = 1.0 - success;
            if (full == 1 && rest == 0) failure = rlnc_all_failure(B * K, B, epsilon, s.field_size);
            return AnalyticValue{failure, std::nullopt, false, true};
          },
      },
      scheme);
}

std::vector<SweepRow> sweep(const SimConfig& base, const SweepAxis& axis, const std::vector<SchemeFamily>& schemes) {
  std::vector<SweepRow> rows;
  for (const auto& family : schemes) {
    for (const double v : axis.values) {
      SimConfig cfg = base;
      if (axis.kind == SweepAxisKind::Epsilon) {
        cfg.channel = ChannelModel::fixed(v);
        cfg.scheme = instantiate(family, std::nullopt);
      } else {
        if (v != std::floor(v) || v < 1 || v > 64) throw ParameterError("K axis values must be integers in [1, 64]");
        cfg.scheme = instantiate(family, static_cast<int>(v));
      }
      const Aggregate agg = run_sessions(cfg);
      SweepRow row;
      row.scheme = cfg.scheme;
      row.epsilon = cfg.channel.epsilon();
      row.deadline_rate = estimate_error_rate(agg);
      row.session_failure = estimate_session_failure(agg);
      row.deadlines = agg.deadlines;
      row.failures = agg.failures;
      row.analytic = analytic_for(cfg.scheme, row.epsilon, cfg.packets);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace snc
