#include "snc/design.hpp"

#include "snc/errors.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace snc {

SymbolicCombo::SymbolicCombo(std::initializer_list<Term> terms) {
  for (const auto& t : terms) add(t.index, t.coeff);
}

void SymbolicCombo::add(DataIndex index, Symbol coeff) {
  if (coeff == 0) return;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), index,
                             [](const Term& t, DataIndex i) { return t.index < i; });
  if (it != terms_.end() && it->index == index) {
    it->coeff ^= coeff;
    if (it->coeff == 0) terms_.erase(it);
    return;
  }
  terms_.insert(it, Term{index, coeff});
}

Symbol SymbolicCombo::coefficient(DataIndex index) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), index,
                             [](const Term& t, DataIndex i) { return t.index < i; });
  return (it != terms_.end() && it->index == index) ? it->coeff : Symbol{0};
}

CoefficientMatrix CoefficientMatrix::from_rows(const std::vector<std::vector<unsigned>>& rows) {
  CoefficientMatrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols) {
      throw ParameterError("C: row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                           " entries, expected " + std::to_string(m.cols));
    }
    for (unsigned v : rows[r]) {
      if (v > 255) throw ParameterError("C: entry " + std::to_string(v) + " exceeds 255");
      m.entries.push_back(static_cast<Symbol>(v));
    }
  }
  return m;
}

int min_delay(int slots, unsigned field_size) {
  if (slots < 2) throw ParameterError("K must be >= 2, got " + std::to_string(slots));
  if (field_size < 2) throw ParameterError("q must be >= 2, got " + std::to_string(field_size));
  int d = 0;
  std::uint64_t reach = 1;
  while (reach < static_cast<std::uint64_t>(slots)) {
    reach *= field_size;
    ++d;
  }
  return d;
}

SncDesign SncDesign::create(int slots, int delay, unsigned field_size, CoefficientMatrix coefficients,
                            std::string name) {
  if (slots < 2) throw ParameterError("K must be >= 2, got " + std::to_string(slots));
  if (delay < 1) throw ParameterError("D must be >= 1, got " + std::to_string(delay));
  const Field& field = Field::of_size(field_size);  // throws for a bad q
  if (coefficients.rows != static_cast<std::size_t>(slots - 1) ||
      coefficients.cols != static_cast<std::size_t>(delay)) {
    throw ParameterError("C must be " + std::to_string(slots - 1) + "x" + std::to_string(delay) + ", got " +
                         std::to_string(coefficients.rows) + "x" + std::to_string(coefficients.cols));
  }
  for (Symbol v : coefficients.entries) {
    if (!field.contains(v)) {
      throw ParameterError("C entry " + std::to_string(v) + " is not in GF(" + std::to_string(field_size) + ")");
    }
  }
  const int d_min = min_delay(slots, field_size);
  if (delay < d_min) {
    throw ParameterError("D = " + std::to_string(delay) + " is below the minimum delay " + std::to_string(d_min) +
                         " for K = " + std::to_string(slots) + ", q = " + std::to_string(field_size));
  }
  std::set<std::vector<Symbol>> seen;
  for (std::size_t r = 0; r < coefficients.rows; ++r) {
    auto row = coefficients.row(r);
    if (!seen.emplace(row.begin(), row.end()).second) {
      throw ParameterError("C row " + std::to_string(r + 1) + " duplicates an earlier row");
    }
  }
  SncDesign d;
  d.slots_ = slots;
  d.delay_ = delay;
  d.field_size_ = field_size;
  d.coefficients_ = std::move(coefficients);
  d.name_ = std::move(name);
  return d;
}

Symbol SncDesign::coefficient(int slot, int column) const {
  if (slot < 2 || slot > slots_ || column < 1 || column > delay_) {
    throw ParameterError("coefficient index out of range");
  }
  return coefficients_.at(static_cast<std::size_t>(slot - 2), static_cast<std::size_t>(column - 1));
}

bool SncDesign::same_code(const SncDesign& other) const noexcept {
  return slots_ == other.slots_ && delay_ == other.delay_ && field_size_ == other.field_size_ &&
         coefficients_ == other.coefficients_;
}

namespace {

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParameterError("design label: bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

SncDesign simple_design(int slots) {
  if (slots < 2) throw ParameterError("simple:K requires K >= 2, got " + std::to_string(slots));
  const auto n = static_cast<std::size_t>(slots - 1);
  CoefficientMatrix c{n, n, std::vector<Symbol>(n * n, 0)};
  for (std::size_t i = 0; i < n; ++i) c.entries[i * n + i] = 1;
  return SncDesign::create(slots, slots - 1, 2, std::move(c), "simple:" + std::to_string(slots));
}

}  // namespace

SncDesign builtin(std::string_view name) {
  if (name == "table1") return SncDesign::create(2, 1, 2, CoefficientMatrix{1, 1, {1}}, "table1");
  if (name == "table2") return SncDesign::create(2, 2, 2, CoefficientMatrix{1, 2, {1, 0}}, "table2");
  if (name == "table3") {
    return SncDesign::create(4, 2, 2, CoefficientMatrix::from_rows({{1, 0}, {0, 1}, {1, 1}}), "table3");
  }
  if (name.starts_with("simple:")) return simple_design(parse_int(name.substr(7), "K"));
  if (name.starts_with("mindelay:")) {
    auto rest = name.substr(9);
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ParameterError("design label: expected mindelay:K:q");
    const int k = parse_int(rest.substr(0, colon), "K");
    const int q = parse_int(rest.substr(colon + 1), "q");
    if (k < 2) throw ParameterError("mindelay:K:q requires K >= 2, got " + std::to_string(k));
    if (q < 2) throw ParameterError("mindelay:K:q requires q >= 2, got " + std::to_string(q));
    return generate_min_delay(k, static_cast<unsigned>(q));
  }
  throw ParameterError("unknown design '" + std::string(name) + "'");
}

std::vector<std::string> catalog_names() {
  return {"table1", "table2", "table3", "simple:2", "simple:3", "simple:4", "simple:5", "mindelay:5:2",
          "mindelay:4:4"};
}

SncDesign generate_min_delay(int slots, unsigned field_size) {
  const int delay = min_delay(slots, field_size);
  Field::of_size(field_size);
  const auto d = static_cast<std::size_t>(delay);
  const auto needed = static_cast<std::size_t>(slots - 1);
  std::vector<std::vector<Symbol>> rows;
  for (std::size_t i = 0; i < d && rows.size() < needed; ++i) {
    std::vector<Symbol> unit(d, 0);
    unit[i] = 1;
    rows.push_back(std::move(unit));
  }
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= field_size;
  for (std::uint64_t code = 1; code < total && rows.size() < needed; ++code) {
    std::vector<Symbol> v(d, 0);
    std::uint64_t x = code;
    int nonzero = 0;
    for (std::size_t i = 0; i < d; ++i) {
      v[i] = static_cast<Symbol>(x % field_size);
      x /= field_size;
      if (v[i] != 0) ++nonzero;
    }
    if (nonzero == 1 && std::count(v.begin(), v.end(), Symbol{1}) == 1) continue;  // unit vector
    rows.push_back(std::move(v));
  }
  CoefficientMatrix c{needed, d, {}};
  for (const auto& r : rows) c.entries.insert(c.entries.end(), r.begin(), r.end());
  return SncDesign::create(slots, delay, field_size, std::move(c),
                           "mindelay:" + std::to_string(slots) + ":" + std::to_string(field_size));
}

void expand_slot_into(const SncDesign& design, DataIndex block, int slot, SymbolicCombo& out) {
  if (block < 1) throw ParameterError("block index must be >= 1");
  if (slot < 1 || slot > design.slots()) throw ParameterError("slot out of range");
  out.clear();
  if (slot == 1) {
    out.add(block, 1);
    return;
  }
  const int delay = design.delay();
  if (block - delay >= 1) out.add(block - delay, 1);
  for (int d = 1; d <= delay; ++d) {
    const DataIndex idx = block - d + 1;
    if (idx >= 1) out.add(idx, design.coefficient(slot, d));
  }
}

void expand_block_into(const SncDesign& design, DataIndex block, std::vector<SymbolicCombo>& out) {
  out.resize(static_cast<std::size_t>(design.slots()));
  for (int k = 1; k <= design.slots(); ++k) expand_slot_into(design, block, k, out[static_cast<std::size_t>(k - 1)]);
}

std::vector<SymbolicCombo> expand_block(const SncDesign& design, DataIndex block) {
  std::vector<SymbolicCombo> out;
  expand_block_into(design, block, out);
  return out;
}

int compute_mu(const SncDesign& design) {
  const int delay = design.delay();
  const DataIndex m = 4 * static_cast<DataIndex>(delay) + 4;
  const DataIndex target = m - delay;
  int mu = 0;
  for (DataIndex b = m - delay; b <= m - 1; ++b) {
    for (const auto& combo : expand_block(design, b)) {
      if (combo.coefficient(target) == 0) continue;
      const bool older_only = std::all_of(combo.terms().begin(), combo.terms().end(),
                                          [&](const Term& t) { return t.index <= target; });
      if (older_only) ++mu;
    }
  }
  return mu;
}

bool check_diag_condition(const SncDesign& design) {
  const int delay = design.delay();
  if (delay > design.slots() - 1) return false;
  const auto& c = design.coefficients();
  std::vector<bool> covered(c.cols, false);
  for (std::size_t r = 0; r < c.rows; ++r) {
    std::size_t nonzero = 0;
    std::size_t where = 0;
    for (std::size_t col = 0; col < c.cols; ++col) {
      if (c.at(r, col) != 0) {
        ++nonzero;
        where = col;
      }
    }
    if (nonzero == 1) covered[where] = true;
  }
  return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
}

int lemma3_exponent(const SncDesign& design) {
  if (!check_diag_condition(design)) {
    throw NotApplicableError("design '" + design.name() + "' does not satisfy the diagonal condition");
  }
  return compute_mu(design) + design.delay();
}

bool is_simple_design(const SncDesign& design) {
  if (design.field_size() != 2 || design.delay() != design.slots() - 1) return false;
  const auto& c = design.coefficients();
  for (std::size_t r = 0; r < c.rows; ++r) {
    for (std::size_t col = 0; col < c.cols; ++col) {
      if (c.at(r, col) != (r == col ? 1 : 0)) return false;
    }
  }
  return true;
}

namespace {

std::string index_label(int back) { return back == 0 ? "X_m" : "X_{m-" + std::to_string(back) + "}"; }

}  // namespace

std::string describe_slot(const SncDesign& design, int slot) {
  if (slot == 1) return "X_m";
  std::string out = index_label(design.delay());
  for (int d = 1; d <= design.delay(); ++d) {
    const Symbol c = design.coefficient(slot, d);
    if (c == 0) continue;
    out += " + ";
    if (c != 1) out += std::to_string(c) + "*";
    out += index_label(d - 1);
  }
  return out;
}

}  // namespace snc
