#pragma once

#include "snc/gf.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace snc {

/// Augmented linear system [A | B] over GF(q): each row is a coefficient
/// vector over `unknowns` columns plus a payload of `payload_len` symbols.
///
/// Storage is flat and reused across `reset` calls so per-deadline decoding
/// does not allocate in steady state.
class LinearSystem {
 public:
  explicit LinearSystem(const Field& field) : field_(&field) {}

  void reset(std::size_t unknowns, std::size_t payload_len);
  void add_row(std::span<const Symbol> coeffs, std::span<const Symbol> payload);
  /// Appends a zeroed row and returns its index for in-place filling.
  std::size_t append_zero_row();
  void drop_last_row();
  std::span<Symbol> coeffs(std::size_t row);
  std::span<Symbol> payload(std::size_t row);
  std::span<const Symbol> coeffs(std::size_t row) const;
  std::span<const Symbol> payload(std::size_t row) const;

  std::size_t rows() const noexcept { return rows_; }
  std::size_t unknowns() const noexcept { return unknowns_; }

  /// Brings the system to reduced row echelon form; returns the rank.
  std::size_t reduce();

  /// After `reduce`: row index holding the unit vector on `column`, if the
  /// unit vector lies in the row span.
  std::optional<std::size_t> solved_row(std::size_t column) const;

  /// After `reduce`: true when every all-zero coefficient row also has a
  /// zero payload.
  bool consistent() const;

 private:
  const Field* field_;
  std::size_t unknowns_ = 0;
  std::size_t payload_len_ = 0;
  std::size_t rows_ = 0;
  std::size_t rank_ = 0;
  std::vector<Symbol> coeffs_;
  std::vector<Symbol> payloads_;
  std::vector<std::ptrdiff_t> pivot_row_;  // per column, -1 when free
};

}  // namespace snc
