#include "snc/gf.hpp"

#include "snc/errors.hpp"

#include <memory>
#include <mutex>
#include <string>

namespace snc {

namespace {

// Index = degree. Degree 8 uses x^8+x^4+x^3+x+1, which is irreducible but
// not primitive; the table builder searches for a generator instead of
// assuming x has full order.
constexpr std::array<unsigned, 9> kPolynomials = {
    0,      // unused
    0x3,    // x + 1
    0x7,    // x^2 + x + 1
    0xB,    // x^3 + x + 1
    0x13,   // x^4 + x + 1
    0x25,   // x^5 + x^2 + 1
    0x43,   // x^6 + x + 1
    0x83,   // x^7 + x + 1
    0x11B,  // x^8 + x^4 + x^3 + x + 1
};

unsigned multiplicative_order(Symbol g, unsigned polynomial, unsigned degree) {
  unsigned order = 1;
  unsigned x = g;
  while (x != 1) {
    x = poly_mul_mod(x, g, polynomial, degree);
    ++order;
  }
  return order;
}

}  // namespace

Symbol poly_mul_mod(unsigned a, unsigned b, unsigned polynomial, unsigned degree) {
  unsigned product = 0;
  for (unsigned bit = 0; bit < degree; ++bit) {
    if (b & (1u << bit)) product ^= a << bit;
  }
  for (int bit = 2 * static_cast<int>(degree) - 2; bit >= static_cast<int>(degree); --bit) {
    if (product & (1u << bit)) product ^= polynomial << (bit - static_cast<int>(degree));
  }
  return static_cast<Symbol>(product);
}

unsigned Field::default_polynomial(unsigned degree) {
  if (degree < 1 || degree > 8) {
    throw ParameterError("field degree must be in [1, 8], got " + std::to_string(degree));
  }
  return kPolynomials[degree];
}

Field::Field(unsigned degree)
    : degree_(degree), size_(1u << (degree <= 8 ? degree : 0)), polynomial_(default_polynomial(degree)) {
  const unsigned group = size_ - 1;
  for (unsigned g = 1; g < size_; ++g) {
    if (multiplicative_order(static_cast<Symbol>(g), polynomial_, degree_) == group) {
      generator_ = static_cast<Symbol>(g);
      break;
    }
  }
  unsigned x = 1;
  for (unsigned e = 0; e < group; ++e) {
    antilog_[e] = static_cast<Symbol>(x);
    antilog_[e + group] = static_cast<Symbol>(x);
    log_[x] = static_cast<std::uint16_t>(e);
    x = poly_mul_mod(x, generator_, polynomial_, degree_);
  }
}

const Field& Field::of_size(unsigned q) {
  static std::array<std::unique_ptr<Field>, 9> cache;
  static std::once_flag once;
  std::call_once(once, [] {
    for (unsigned w = 1; w <= 8; ++w) cache[w] = std::make_unique<Field>(w);
  });
  for (unsigned w = 1; w <= 8; ++w) {
    if (q == (1u << w)) return *cache[w];
  }
  throw ParameterError("field size must be 2^w with 1 <= w <= 8, got " + std::to_string(q));
}

Symbol Field::add(Symbol a, Symbol b) const {
  if (!contains(a) || !contains(b)) throw ParameterError("symbol outside field");
  return static_cast<Symbol>(a ^ b);
}

Symbol Field::mul(Symbol a, Symbol b) const {
  if (!contains(a) || !contains(b)) throw ParameterError("symbol outside field");
  return mul_unchecked(a, b);
}

Symbol Field::inv(Symbol a) const {
  if (!contains(a)) throw ParameterError("symbol outside field");
  if (a == 0) throw DivisionByZero("inverse of zero in GF(" + std::to_string(size_) + ")");
  const unsigned group = size_ - 1;
  return antilog_[(group - log_[a]) % group];
}

Symbol Field::div(Symbol a, Symbol b) const { return mul(a, inv(b)); }

int Field::log(Symbol a) const {
  if (a == 0 || !contains(a)) throw ParameterError("log of zero or non-element");
  return log_[a];
}

Symbol Field::exp(int e) const {
  const int group = static_cast<int>(size_ - 1);
  int r = e % group;
  if (r < 0) r += group;
  return antilog_[static_cast<unsigned>(r)];
}

void Field::axpy_inplace(Symbol c, std::span<const Symbol> x, std::span<Symbol> y) const {
  if (x.size() != y.size()) {
    throw ParameterError("axpy length mismatch: " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
  }
  if (c == 0) return;
  if (c == 1) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] ^= x[i];
    return;
  }
  const unsigned log_c = log_[c];
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0) y[i] ^= antilog_[log_c + log_[x[i]]];
  }
}

void Field::scale_inplace(Symbol c, std::span<Symbol> y) const {
  if (c == 1) return;
  if (c == 0) {
    for (auto& v : y) v = 0;
    return;
  }
  const unsigned log_c = log_[c];
  for (auto& v : y) {
    if (v != 0) v = antilog_[log_c + log_[v]];
  }
}

Payload Field::axpy(Symbol c, std::span<const Symbol> x, std::span<const Symbol> y) const {
  if (!contains(c)) throw ParameterError("symbol outside field");
  Payload out(y.begin(), y.end());
  axpy_inplace(c, x, out);
  return out;
}

}  // namespace snc
