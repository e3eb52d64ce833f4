#pragma once

#include "snc/design.hpp"
#include "snc/gf.hpp"
#include "snc/linalg.hpp"
#include "snc/rng.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace snc {

/// One transmitted packet: its symbolic content and the evaluated payload.
struct CodedPacket {
  SymbolicCombo combo;
  Payload payload;
  DataIndex block = 0;
  int slot = 1;
};

/// A packet as seen by the receiver. An erasure drops combo and payload
/// together; block and slot stay known from the slot timing.
struct ReceivedPacket {
  DataIndex block = 0;
  int slot = 1;
  std::optional<CodedPacket> packet;

  bool erased() const noexcept { return !packet.has_value(); }
  static ReceivedPacket lost(DataIndex block, int slot) { return {block, slot, std::nullopt}; }
  static ReceivedPacket intact(CodedPacket p) {
    const DataIndex b = p.block;
    const int s = p.slot;
    return {b, s, std::move(p)};
  }
};

enum class DecodeStatus { Decoded, Failed };

struct DecodeOutcome {
  DataIndex index = 0;
  DecodeStatus status = DecodeStatus::Failed;
  std::optional<Payload> payload;  ///< present iff Decoded
  bool used_genie = false;

  bool decoded() const noexcept { return status == DecodeStatus::Decoded; }
};

/// Returns the payload of X_j, or an empty span when it cannot be resolved.
using PayloadAccessor = std::function<std::span<const Symbol>(DataIndex)>;

// ---------------------------------------------------------------------------
// Sliding network code

/// Encodes block m. Virtual indices <= 0 are zero and never queried; any
/// other index in the block's combos must resolve through `history` to a
/// payload of `payload_len` symbols (flush indices past the message end
/// should return zeros).
std::vector<CodedPacket> snc_encode_block(const SncDesign& design, DataIndex block, const PayloadAccessor& history,
                                          std::size_t payload_len);
/// Same as above, overwriting `out` in place.
void snc_encode_block_into(const SncDesign& design, DataIndex block, const PayloadAccessor& history,
                           std::size_t payload_len, std::vector<CodedPacket>& out);

enum class DecoderMode {
  /// Gaussian elimination over every windowed packet plus earlier
  /// by-product recoveries.
  FullGaussian,
  /// Only single packets whose other unknowns are each covered by a
  /// received slot-1 copy; reproduces the pairwise counting argument.
  PaperRule,
};

/// Sliding-window SNC receiver.
///
/// Blocks are ingested in order. At the end of block t + D the caller asks
/// for X_t. Packets older than D blocks before the newest block are dropped.
/// Data packets before the next deadline are fully decoded (FD); when a
/// deadline fails, the retransmission source supplies the true payload so
/// that later decoding sees correct FD packets.
class SncReceiver {
 public:
  SncReceiver(SncDesign design, std::size_t payload_len, DecoderMode mode, PayloadAccessor retransmission,
              std::optional<DataIndex> message_length = std::nullopt);

  void ingest(std::span<const ReceivedPacket> block);
  DecodeOutcome decode_deadline(DataIndex index);

  /// Decodes and reports only the status, skipping the payload copy.
  DecodeStatus decode_deadline_status(DataIndex index) { return decode_next(index, nullptr); }

  const SncDesign& design() const noexcept { return design_; }
  DataIndex next_deadline() const noexcept { return next_deadline_; }
  DataIndex newest_block() const noexcept { return newest_block_; }
  /// Number of non-erased packets currently held.
  std::size_t window_size() const noexcept;
  /// True when X_j is known without being an outstanding unknown.
  bool is_known(DataIndex index) const noexcept;
  bool is_recovered_nfd(DataIndex index) const noexcept;
  /// Payload of an FD packet (index < next_deadline) or a recovered NFD packet.
  std::optional<std::span<const Symbol>> known_payload(DataIndex index) const;

 private:
  struct Slot {
    bool present = false;
    DataIndex block = 0;
    std::vector<Symbol> coeffs;  // D+1 entries over X_{block-D} .. X_block
    Payload payload;
  };

  bool is_virtual(DataIndex index) const noexcept;
  std::span<const Symbol> known_span(DataIndex index) const;
  Slot& slot_at(DataIndex block, int slot);
  const Slot& slot_at(DataIndex block, int slot) const;
  void store_recovered(DataIndex index, std::span<const Symbol> payload);
  DecodeStatus decode_next(DataIndex index, Payload* payload_out);
  bool decode_full(DataIndex index);
  bool decode_paper_rule(DataIndex index);

  SncDesign design_;
  const Field* field_;
  std::size_t payload_len_;
  DecoderMode mode_;
  PayloadAccessor retransmission_;
  std::optional<DataIndex> message_length_;
  int slots_;
  int delay_;
  DataIndex newest_block_ = 0;
  DataIndex next_deadline_ = 1;

  std::vector<Slot> window_;                 // (D+1) * K ring keyed by block
  std::vector<Symbol> fd_payloads_;          // X_1 .. X_{next_deadline-1}
  std::vector<char> recovered_flags_;        // ring of D+1 keyed by index
  std::vector<Symbol> recovered_payloads_;
  std::vector<Symbol> zeros_;
  std::vector<Symbol> scratch_;
  LinearSystem system_;
  std::vector<DataIndex> unknown_index_;
  std::vector<int> column_of_;
};

// ---------------------------------------------------------------------------
// K-repetition

std::vector<CodedPacket> krep_encode(int repetitions, DataIndex block, std::span<const Symbol> payload);
/// Decoded iff at least one copy survived.
DecodeOutcome krep_decode(std::span<const ReceivedPacket> block);

// ---------------------------------------------------------------------------
// Block random linear network coding

/// N packets, each a uniformly random combination of the M = data.size()
/// payloads (indices first_index .. first_index + M - 1). With exclude_zero,
/// all-zero coefficient vectors are redrawn.
std::vector<CodedPacket> rlnc_encode(std::span<const Payload> data, std::size_t coded_count, const Field& field,
                                     RandomStream& rng, bool exclude_zero, DataIndex first_index = 1);

struct RlncDecodeResult {
  bool success = false;  ///< rank == M
  std::size_t rank = 0;
  bool consistent = true;
  /// Uniquely determined payloads, by position in the batch.
  std::vector<std::optional<Payload>> payloads;
};

RlncDecodeResult rlnc_decode(std::span<const ReceivedPacket> received, std::size_t packet_count, const Field& field,
                             DataIndex first_index = 1);

}  // namespace snc
