#pragma once

#include "snc/gf.hpp"

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace snc {

/// Absolute data-packet index. Indices <= 0 name virtual all-zero packets.
using DataIndex = std::int64_t;

struct Term {
  DataIndex index;
  Symbol coeff;
  friend bool operator==(const Term&, const Term&) = default;
};

/// Symbolic linear combination of data packets, kept sorted by index with
/// no zero coefficients.
class SymbolicCombo {
 public:
  SymbolicCombo() = default;
  SymbolicCombo(std::initializer_list<Term> terms);

  /// Adds coeff * X_index (field addition; a cancelling term is removed).
  void add(DataIndex index, Symbol coeff);
  void clear() noexcept { terms_.clear(); }

  Symbol coefficient(DataIndex index) const;
  std::span<const Term> terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  friend bool operator==(const SymbolicCombo&, const SymbolicCombo&) = default;

 private:
  std::vector<Term> terms_;
};

/// Row-major coefficient matrix with `rows` x `cols` entries.
struct CoefficientMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Symbol> entries;

  Symbol at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
  std::span<const Symbol> row(std::size_t r) const { return {entries.data() + r * cols, cols}; }
  static CoefficientMatrix from_rows(const std::vector<std::vector<unsigned>>& rows);

  friend bool operator==(const CoefficientMatrix&, const CoefficientMatrix&) = default;
};

/// A (K, D, q) sliding network code.
///
/// Block m carries K packets: slot 1 is X_m, and slot k in 2..K is
/// X_{m-D} + sum_d c_{k,d} X_{m-d+1}, with c_{k,d} stored in row k-2 and
/// column d-1 of the coefficient matrix (column d multiplies X_{m-d+1}).
class SncDesign {
 public:
  /// Validates and builds a design; throws ParameterError naming the
  /// violated constraint.
  static SncDesign create(int slots, int delay, unsigned field_size, CoefficientMatrix coefficients,
                          std::string name = "custom");

  int slots() const noexcept { return slots_; }
  int delay() const noexcept { return delay_; }
  unsigned field_size() const noexcept { return field_size_; }
  const Field& field() const { return Field::of_size(field_size_); }
  const CoefficientMatrix& coefficients() const noexcept { return coefficients_; }
  const std::string& name() const noexcept { return name_; }

  /// c_{k,d} for slot k in [2, K] and column d in [1, D].
  Symbol coefficient(int slot, int column) const;

  /// Same code parameters and matrix; the label is ignored.
  bool same_code(const SncDesign& other) const noexcept;
  friend bool operator==(const SncDesign& a, const SncDesign& b) { return a.same_code(b); }

 private:
  SncDesign() = default;
  int slots_ = 0;
  int delay_ = 0;
  unsigned field_size_ = 2;
  CoefficientMatrix coefficients_;
  std::string name_;
};

/// Catalog lookup: "table1", "table2", "table3", "simple:K" (K >= 2) and
/// "mindelay:K:q".
SncDesign builtin(std::string_view name);
/// Representative catalog labels for listings.
std::vector<std::string> catalog_names();

/// Smallest D with q^D >= K.
int min_delay(int slots, unsigned field_size);
/// Minimum-delay design: unit vectors first, then the remaining nonzero
/// vectors of GF(q)^D in ascending order (column 1 is the least significant
/// base-q digit).
SncDesign generate_min_delay(int slots, unsigned field_size);

/// Symbolic content of the K packets of block m (m >= 1); virtual indices
/// <= 0 are dropped.
std::vector<SymbolicCombo> expand_block(const SncDesign& design, DataIndex block);
/// Symbolic content of one slot of block m, written into `out`.
void expand_slot_into(const SncDesign& design, DataIndex block, int slot, SymbolicCombo& out);
/// Writes the expansion into `out` (resized to K), reusing its storage.
void expand_block_into(const SncDesign& design, DataIndex block, std::vector<SymbolicCombo>& out);

/// Number of packets in blocks m-D..m-1 that hold X_{m-D} together with
/// only strictly older packets.
int compute_mu(const SncDesign& design);
/// D <= K-1 and C holds D single-nonzero rows covering all D columns.
bool check_diag_condition(const SncDesign& design);
/// mu + D; throws NotApplicableError when the diagonal condition fails.
int lemma3_exponent(const SncDesign& design);

/// True when the design is the two-packet family with C = I and D = K-1
/// over GF(2).
bool is_simple_design(const SncDesign& design);

/// Human-readable form of slot k of block m, following the coefficient
/// order X_{m-D}, X_m, X_{m-1}, ... (e.g. "X_{m-2} + X_m + X_{m-1}").
std::string describe_slot(const SncDesign& design, int slot);

}  // namespace snc
