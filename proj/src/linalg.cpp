#include "snc/linalg.hpp"

#include "snc/errors.hpp"

#include <algorithm>

namespace snc {

void LinearSystem::reset(std::size_t unknowns, std::size_t payload_len) {
  unknowns_ = unknowns;
  payload_len_ = payload_len;
  rows_ = 0;
  rank_ = 0;
  coeffs_.clear();
  payloads_.clear();
  pivot_row_.assign(unknowns, -1);
}

void LinearSystem::add_row(std::span<const Symbol> coeffs, std::span<const Symbol> payload) {
  if (coeffs.size() != unknowns_ || payload.size() != payload_len_) {
    throw ParameterError("row shape does not match the system");
  }
  coeffs_.insert(coeffs_.end(), coeffs.begin(), coeffs.end());
  payloads_.insert(payloads_.end(), payload.begin(), payload.end());
  ++rows_;
}

std::size_t LinearSystem::append_zero_row() {
  coeffs_.resize(coeffs_.size() + unknowns_, 0);
  payloads_.resize(payloads_.size() + payload_len_, 0);
  return rows_++;
}

void LinearSystem::drop_last_row() {
  if (rows_ == 0) return;
  --rows_;
  coeffs_.resize(rows_ * unknowns_);
  payloads_.resize(rows_ * payload_len_);
}

std::span<Symbol> LinearSystem::coeffs(std::size_t row) {
  return {coeffs_.data() + row * unknowns_, unknowns_};
}
std::span<Symbol> LinearSystem::payload(std::size_t row) {
  return {payloads_.data() + row * payload_len_, payload_len_};
}
std::span<const Symbol> LinearSystem::coeffs(std::size_t row) const {
  return {coeffs_.data() + row * unknowns_, unknowns_};
}
std::span<const Symbol> LinearSystem::payload(std::size_t row) const {
  return {payloads_.data() + row * payload_len_, payload_len_};
}

std::size_t LinearSystem::reduce() {
  const Field& f = *field_;
  std::fill(pivot_row_.begin(), pivot_row_.end(), -1);
  std::size_t next = 0;
  for (std::size_t col = 0; col < unknowns_ && next < rows_; ++col) {
    std::size_t pick = next;
    while (pick < rows_ && coeffs(pick)[col] == 0) ++pick;
    if (pick == rows_) continue;
    if (pick != next) {
      std::swap_ranges(coeffs(pick).begin(), coeffs(pick).end(), coeffs(next).begin());
      std::swap_ranges(payload(pick).begin(), payload(pick).end(), payload(next).begin());
    }
    const Symbol scale = f.inv(coeffs(next)[col]);
    f.scale_inplace(scale, coeffs(next));
    f.scale_inplace(scale, payload(next));
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == next) continue;
      const Symbol factor = coeffs(r)[col];
      if (factor == 0) continue;
      f.axpy_inplace(factor, coeffs(next), coeffs(r));
      f.axpy_inplace(factor, payload(next), payload(r));
    }
    pivot_row_[col] = static_cast<std::ptrdiff_t>(next);
    ++next;
  }
  rank_ = next;
  return rank_;
}

std::optional<std::size_t> LinearSystem::solved_row(std::size_t column) const {
  if (column >= unknowns_ || pivot_row_[column] < 0) return std::nullopt;
  const auto row = static_cast<std::size_t>(pivot_row_[column]);
  const auto c = coeffs(row);
  for (std::size_t j = 0; j < unknowns_; ++j) {
    if (j != column && c[j] != 0) return std::nullopt;
  }
  return row;
}

bool LinearSystem::consistent() const {
  for (std::size_t r = rank_; r < rows_; ++r) {
    const auto p = payload(r);
    if (std::any_of(p.begin(), p.end(), [](Symbol s) { return s != 0; })) return false;
  }
  return true;
}

}  // namespace snc
