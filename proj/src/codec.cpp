#include "snc/codec.hpp"

#include "snc/errors.hpp"

#include <algorithm>
#include <string>

namespace snc {

// ---------------------------------------------------------------------------
// Encoder

void snc_encode_block_into(const SncDesign& design, DataIndex block, const PayloadAccessor& history,
                           std::size_t payload_len, std::vector<CodedPacket>& out) {
  const Field& field = design.field();
  out.resize(static_cast<std::size_t>(design.slots()));
  for (int k = 1; k <= design.slots(); ++k) {
    auto& packet = out[static_cast<std::size_t>(k - 1)];
    packet.block = block;
    packet.slot = k;
    expand_slot_into(design, block, k, packet.combo);
    packet.payload.assign(payload_len, 0);
    for (const Term& term : packet.combo.terms()) {
      const auto x = history(term.index);
      if (x.size() != payload_len) {
        throw ContractViolation("encoder history cannot resolve X_" + std::to_string(term.index));
      }
      field.axpy_inplace(term.coeff, x, packet.payload);
    }
  }
}

std::vector<CodedPacket> snc_encode_block(const SncDesign& design, DataIndex block, const PayloadAccessor& history,
                                          std::size_t payload_len) {
  std::vector<CodedPacket> out;
  snc_encode_block_into(design, block, history, payload_len, out);
  return out;
}

// ---------------------------------------------------------------------------
// Receiver

SncReceiver::SncReceiver(SncDesign design, std::size_t payload_len, DecoderMode mode, PayloadAccessor retransmission,
                         std::optional<DataIndex> message_length)
    : design_(std::move(design)),
      field_(&design_.field()),
      payload_len_(payload_len),
      mode_(mode),
      retransmission_(std::move(retransmission)),
      message_length_(message_length),
      slots_(design_.slots()),
      delay_(design_.delay()),
      system_(*field_) {
  const auto width = static_cast<std::size_t>(delay_ + 1);
  window_.resize(width * static_cast<std::size_t>(slots_));
  for (auto& s : window_) {
    s.coeffs.assign(width, 0);
    s.payload.assign(payload_len_, 0);
  }
  recovered_flags_.assign(width, 0);
  recovered_payloads_.assign(width * payload_len_, 0);
  zeros_.assign(payload_len_, 0);
  scratch_.assign(payload_len_, 0);
  unknown_index_.reserve(width);
  column_of_.assign(width, -1);
}

bool SncReceiver::is_virtual(DataIndex index) const noexcept {
  return index <= 0 || (message_length_ && index > *message_length_);
}

bool SncReceiver::is_recovered_nfd(DataIndex index) const noexcept {
  if (index < next_deadline_ || index > next_deadline_ + delay_) return false;
  return recovered_flags_[static_cast<std::size_t>(index % (delay_ + 1))] != 0;
}

bool SncReceiver::is_known(DataIndex index) const noexcept {
  return is_virtual(index) || index < next_deadline_ || is_recovered_nfd(index);
}

std::span<const Symbol> SncReceiver::known_span(DataIndex index) const {
  if (is_virtual(index)) return zeros_;
  if (index < next_deadline_) {
    return {fd_payloads_.data() + static_cast<std::size_t>(index - 1) * payload_len_, payload_len_};
  }
  const auto pos = static_cast<std::size_t>(index % (delay_ + 1));
  return {recovered_payloads_.data() + pos * payload_len_, payload_len_};
}

std::optional<std::span<const Symbol>> SncReceiver::known_payload(DataIndex index) const {
  if (!is_known(index)) return std::nullopt;
  return known_span(index);
}

std::size_t SncReceiver::window_size() const noexcept {
  return static_cast<std::size_t>(std::count_if(window_.begin(), window_.end(), [](const Slot& s) { return s.present; }));
}

SncReceiver::Slot& SncReceiver::slot_at(DataIndex block, int slot) {
  const auto row = static_cast<std::size_t>(block % (delay_ + 1));
  return window_[row * static_cast<std::size_t>(slots_) + static_cast<std::size_t>(slot - 1)];
}

const SncReceiver::Slot& SncReceiver::slot_at(DataIndex block, int slot) const {
  const auto row = static_cast<std::size_t>(block % (delay_ + 1));
  return window_[row * static_cast<std::size_t>(slots_) + static_cast<std::size_t>(slot - 1)];
}

void SncReceiver::store_recovered(DataIndex index, std::span<const Symbol> payload) {
  if (is_known(index)) return;
  const auto pos = static_cast<std::size_t>(index % (delay_ + 1));
  recovered_flags_[pos] = 1;
  std::copy(payload.begin(), payload.end(), recovered_payloads_.begin() + static_cast<std::ptrdiff_t>(pos * payload_len_));
}

void SncReceiver::ingest(std::span<const ReceivedPacket> block) {
  const DataIndex b = newest_block_ + 1;
  if (block.size() != static_cast<std::size_t>(slots_)) {
    throw ContractViolation("block must carry " + std::to_string(slots_) + " packets, got " +
                            std::to_string(block.size()));
  }
  if (b - delay_ > next_deadline_) {
    throw ContractViolation("X_" + std::to_string(next_deadline_) + " must be decoded before ingesting block " +
                            std::to_string(b));
  }
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (block[i].block != b) {
      throw ContractViolation("out-of-order block: expected " + std::to_string(b) + ", got " +
                              std::to_string(block[i].block));
    }
    if (block[i].slot != static_cast<int>(i) + 1) throw ContractViolation("slots must be listed in order");
  }

  const DataIndex lowest = b - delay_;
  for (int k = 1; k <= slots_; ++k) {
    Slot& slot = slot_at(b, k);  // overwrites block b - D - 1
    const auto& rp = block[static_cast<std::size_t>(k - 1)];
    slot.present = !rp.erased();
    slot.block = b;
    if (!slot.present) continue;
    const CodedPacket& p = *rp.packet;
    if (p.payload.size() != payload_len_) throw ContractViolation("payload length mismatch");
    std::fill(slot.coeffs.begin(), slot.coeffs.end(), Symbol{0});
    for (const Term& t : p.combo.terms()) {
      if (t.index > b || t.index < lowest) {
        throw ContractViolation("packet in block " + std::to_string(b) + " references X_" + std::to_string(t.index) +
                                " outside the window");
      }
      slot.coeffs[static_cast<std::size_t>(t.index - lowest)] = t.coeff;
    }
    std::copy(p.payload.begin(), p.payload.end(), slot.payload.begin());
  }
  newest_block_ = b;

  if (mode_ != DecoderMode::FullGaussian) return;
  // Peel packets that reduce to a single unknown.
  for (int k = 1; k <= slots_; ++k) {
    const Slot& slot = slot_at(b, k);
    if (!slot.present) continue;
    DataIndex unknown = 0;
    Symbol unknown_coeff = 0;
    int unknowns = 0;
    for (std::size_t pos = 0; pos < slot.coeffs.size(); ++pos) {
      if (slot.coeffs[pos] == 0) continue;
      const DataIndex j = lowest + static_cast<DataIndex>(pos);
      if (!is_known(j)) {
        ++unknowns;
        unknown = j;
        unknown_coeff = slot.coeffs[pos];
      }
    }
    if (unknowns != 1) continue;
    std::copy(slot.payload.begin(), slot.payload.end(), scratch_.begin());
    for (std::size_t pos = 0; pos < slot.coeffs.size(); ++pos) {
      const DataIndex j = lowest + static_cast<DataIndex>(pos);
      if (slot.coeffs[pos] != 0 && j != unknown) field_->axpy_inplace(slot.coeffs[pos], known_span(j), scratch_);
    }
    field_->scale_inplace(field_->inv(unknown_coeff), scratch_);
    store_recovered(unknown, scratch_);
  }
}

bool SncReceiver::decode_full(DataIndex index) {
  unknown_index_.clear();
  std::fill(column_of_.begin(), column_of_.end(), -1);
  for (DataIndex j = index; j <= index + delay_; ++j) {
    if (!is_known(j)) {
      column_of_[static_cast<std::size_t>(j - index)] = static_cast<int>(unknown_index_.size());
      unknown_index_.push_back(j);
    }
  }
  if (unknown_index_.empty()) return true;

  system_.reset(unknown_index_.size(), payload_len_);
  for (const Slot& slot : window_) {
    if (!slot.present || slot.block < index) continue;
    const DataIndex lowest = slot.block - delay_;
    const std::size_t row = system_.append_zero_row();
    auto coeffs = system_.coeffs(row);
    auto payload = system_.payload(row);
    std::copy(slot.payload.begin(), slot.payload.end(), payload.begin());
    bool touches_unknown = false;
    for (std::size_t pos = 0; pos < slot.coeffs.size(); ++pos) {
      const Symbol c = slot.coeffs[pos];
      if (c == 0) continue;
      const DataIndex j = lowest + static_cast<DataIndex>(pos);
      if (is_known(j)) {
        field_->axpy_inplace(c, known_span(j), payload);
      } else {
        coeffs[static_cast<std::size_t>(column_of_[static_cast<std::size_t>(j - index)])] = c;
        touches_unknown = true;
      }
    }
    if (!touches_unknown) system_.drop_last_row();
  }
  system_.reduce();
  for (std::size_t col = 0; col < unknown_index_.size(); ++col) {
    if (auto row = system_.solved_row(col)) store_recovered(unknown_index_[col], system_.payload(*row));
  }
  return is_known(index);
}

bool SncReceiver::decode_paper_rule(DataIndex index) {
  if (is_known(index)) return true;
  for (const Slot& slot : window_) {
    if (!slot.present || slot.block < index) continue;
    const DataIndex lowest = slot.block - delay_;
    if (index < lowest) continue;
    const auto target_pos = static_cast<std::size_t>(index - lowest);
    if (slot.coeffs[target_pos] == 0) continue;
    bool usable = true;
    for (std::size_t pos = 0; pos < slot.coeffs.size() && usable; ++pos) {
      const DataIndex j = lowest + static_cast<DataIndex>(pos);
      if (slot.coeffs[pos] == 0 || j == index || j < next_deadline_ || is_virtual(j)) continue;
      const Slot& copy = slot_at(j, 1);
      usable = copy.present && copy.block == j;
    }
    if (!usable) continue;
    std::copy(slot.payload.begin(), slot.payload.end(), scratch_.begin());
    for (std::size_t pos = 0; pos < slot.coeffs.size(); ++pos) {
      const Symbol c = slot.coeffs[pos];
      const DataIndex j = lowest + static_cast<DataIndex>(pos);
      if (c == 0 || j == index) continue;
      if (j < next_deadline_ || is_virtual(j)) {
        field_->axpy_inplace(c, known_span(j), scratch_);
      } else {
        // Slot 1 of block j carries a * X_j with a on the newest position.
        const Slot& copy = slot_at(j, 1);
        const Symbol a = copy.coeffs.back();
        field_->axpy_inplace(field_->div(c, a), copy.payload, scratch_);
      }
    }
    field_->scale_inplace(field_->inv(slot.coeffs[target_pos]), scratch_);
    store_recovered(index, scratch_);
    return true;
  }
  return false;
}

DecodeStatus SncReceiver::decode_next(DataIndex index, Payload* payload_out) {
  if (index != next_deadline_) {
    throw ContractViolation("deadline X_" + std::to_string(index) + " requested, next is X_" +
                            std::to_string(next_deadline_));
  }
  if (newest_block_ < index + delay_) {
    throw ContractViolation("X_" + std::to_string(index) + " decodes at the end of block " +
                            std::to_string(index + delay_) + ", newest is " + std::to_string(newest_block_));
  }
  const bool ok = mode_ == DecoderMode::FullGaussian ? decode_full(index) : decode_paper_rule(index);
  std::span<const Symbol> value;
  if (ok) {
    value = known_span(index);
  } else {
    value = retransmission_ ? retransmission_(index) : std::span<const Symbol>{};
    if (value.size() != payload_len_) {
      throw ContractViolation("retransmission source cannot supply X_" + std::to_string(index));
    }
  }
  if (payload_out && ok) payload_out->assign(value.begin(), value.end());
  fd_payloads_.insert(fd_payloads_.end(), value.begin(), value.end());
  recovered_flags_[static_cast<std::size_t>(index % (delay_ + 1))] = 0;
  ++next_deadline_;
  return ok ? DecodeStatus::Decoded : DecodeStatus::Failed;
}

DecodeOutcome SncReceiver::decode_deadline(DataIndex index) {
  DecodeOutcome out;
  out.index = index;
  Payload payload;
  out.status = decode_next(index, &payload);
  out.used_genie = out.status == DecodeStatus::Failed;
  if (out.decoded()) out.payload = std::move(payload);
  return out;
}

// ---------------------------------------------------------------------------
// K-repetition

std::vector<CodedPacket> krep_encode(int repetitions, DataIndex block, std::span<const Symbol> payload) {
  if (repetitions < 1) throw ParameterError("K must be >= 1, got " + std::to_string(repetitions));
  std::vector<CodedPacket> out(static_cast<std::size_t>(repetitions));
  for (int k = 0; k < repetitions; ++k) {
    auto& p = out[static_cast<std::size_t>(k)];
    p.combo.add(block, 1);
    p.payload.assign(payload.begin(), payload.end());
    p.block = block;
    p.slot = k + 1;
  }
  return out;
}

DecodeOutcome krep_decode(std::span<const ReceivedPacket> block) {
  if (block.empty()) throw ParameterError("empty repetition block");
  DecodeOutcome out;
  out.index = block.front().block;
  for (const auto& rp : block) {
    if (!rp.erased()) {
      out.status = DecodeStatus::Decoded;
      out.payload = rp.packet->payload;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Block RLNC

std::vector<CodedPacket> rlnc_encode(std::span<const Payload> data, std::size_t coded_count, const Field& field,
                                     RandomStream& rng, bool exclude_zero, DataIndex first_index) {
  if (data.empty()) throw ParameterError("M must be >= 1");
  if (coded_count == 0) throw ParameterError("N must be >= 1");
  const std::size_t payload_len = data.front().size();
  for (const auto& d : data) {
    if (d.size() != payload_len) throw ParameterError("data payloads differ in length");
  }
  std::vector<CodedPacket> out(coded_count);
  std::vector<Symbol> coeffs(data.size());
  for (std::size_t n = 0; n < coded_count; ++n) {
    do {
      rng.fill_bits(std::span<Symbol>(coeffs), field.degree());
    } while (exclude_zero && std::all_of(coeffs.begin(), coeffs.end(), [](Symbol c) { return c == 0; }));
    auto& p = out[n];
    p.block = static_cast<DataIndex>(n) + 1;
    p.slot = 1;
    p.payload.assign(payload_len, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (coeffs[i] == 0) continue;
      p.combo.add(first_index + static_cast<DataIndex>(i), coeffs[i]);
      field.axpy_inplace(coeffs[i], data[i], p.payload);
    }
  }
  return out;
}

RlncDecodeResult rlnc_decode(std::span<const ReceivedPacket> received, std::size_t packet_count, const Field& field,
                             DataIndex first_index) {
  RlncDecodeResult result;
  result.payloads.resize(packet_count);
  const auto first = std::find_if(received.begin(), received.end(), [](const ReceivedPacket& r) { return !r.erased(); });
  if (first == received.end()) {
    result.success = packet_count == 0;
    return result;
  }
  const std::size_t payload_len = first->packet->payload.size();
  LinearSystem system(field);
  system.reset(packet_count, payload_len);
  for (const auto& rp : received) {
    if (rp.erased()) continue;
    const CodedPacket& p = *rp.packet;
    if (p.payload.size() != payload_len) throw ContractViolation("payload length mismatch");
    const std::size_t row = system.append_zero_row();
    auto coeffs = system.coeffs(row);
    for (const Term& t : p.combo.terms()) {
      const DataIndex col = t.index - first_index;
      if (col < 0 || col >= static_cast<DataIndex>(packet_count)) {
        throw ContractViolation("combo references X_" + std::to_string(t.index) + " outside the batch");
      }
      coeffs[static_cast<std::size_t>(col)] = t.coeff;
    }
    std::copy(p.payload.begin(), p.payload.end(), system.payload(row).begin());
  }
  result.rank = system.reduce();
  result.success = result.rank == packet_count;
  result.consistent = system.consistent();
  for (std::size_t col = 0; col < packet_count; ++col) {
    if (auto row = system.solved_row(col)) {
      const auto pl = system.payload(*row);
      result.payloads[col] = Payload(pl.begin(), pl.end());
    }
  }
  return result;
}

}  // namespace snc
