#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace snc {

using Symbol = std::uint8_t;
using Payload = std::vector<Symbol>;

/// Finite field GF(2^w) for 1 <= w <= 8 backed by log/antilog tables.
///
/// Elements are the integers [0, q) read as polynomials over GF(2) in the
/// bit basis; addition is XOR. The defining polynomial per degree is fixed
/// (see `default_polynomial`) so encoded payloads are reproducible.
class Field {
 public:
  explicit Field(unsigned degree);

  /// Shared, lazily built instance for q = 2^w. Throws for q not in {2,...,256}.
  static const Field& of_size(unsigned q);

  /// Defining polynomial for degree w, including the x^w bit.
  static unsigned default_polynomial(unsigned degree);

  unsigned degree() const noexcept { return degree_; }
  unsigned size() const noexcept { return size_; }
  unsigned polynomial() const noexcept { return polynomial_; }
  /// Element whose powers enumerate the multiplicative group.
  Symbol generator() const noexcept { return generator_; }

  bool contains(unsigned a) const noexcept { return a < size_; }

  Symbol add(Symbol a, Symbol b) const;
  Symbol sub(Symbol a, Symbol b) const { return add(a, b); }
  Symbol mul(Symbol a, Symbol b) const;
  Symbol inv(Symbol a) const;
  Symbol div(Symbol a, Symbol b) const;

  /// Unchecked product; both operands must already be field elements.
  Symbol mul_unchecked(Symbol a, Symbol b) const noexcept {
    if (a == 0 || b == 0) return 0;
    return antilog_[log_[a] + log_[b]];
  }

  /// y[i] ^= c * x[i], in place.
  void axpy_inplace(Symbol c, std::span<const Symbol> x, std::span<Symbol> y) const;
  /// y[i] = c * y[i], in place.
  void scale_inplace(Symbol c, std::span<Symbol> y) const;

  /// Returns y ^ c*x elementwise.
  Payload axpy(Symbol c, std::span<const Symbol> x, std::span<const Symbol> y) const;

  int log(Symbol a) const;
  Symbol exp(int e) const;

 private:
  unsigned degree_;
  unsigned size_;
  unsigned polynomial_;
  Symbol generator_ = 1;
  std::array<std::uint16_t, 256> log_{};
  // Doubled so a sum of two logs indexes without a modulo.
  std::array<Symbol, 512> antilog_{};
};

/// Schoolbook carry-less product reduced by `polynomial`; the table-free
/// reference used to build and cross-check the tables.
Symbol poly_mul_mod(unsigned a, unsigned b, unsigned polynomial, unsigned degree);

}  // namespace snc
