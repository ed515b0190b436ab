#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fuzex {

// The three operator families implemented by the engine. A "combined" token
// library mixes tokens from all three; it is not a fourth semantics.
enum class Semantics { goedel, product, lukasiewicz };

constexpr std::string_view to_string(Semantics s) {
  switch (s) {
    case Semantics::goedel: return "goedel";
    case Semantics::product: return "product";
    case Semantics::lukasiewicz: return "lukasiewicz";
  }
  return "?";
}

inline Semantics semantics_from_string(std::string_view name) {
  if (name == "goedel" || name == "godel" || name == "gd") return Semantics::goedel;
  if (name == "product" || name == "pr") return Semantics::product;
  if (name == "lukasiewicz" || name == "lk") return Semantics::lukasiewicz;
  throw std::invalid_argument("unknown semantics: " + std::string(name));
}

// A membership degree in [0,1]. Construction rejects out-of-range values;
// silently clamping would hide pipeline bugs upstream.
class FuzzyValue {
 public:
  FuzzyValue() : v_(0.0) {}

  explicit FuzzyValue(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::domain_error("FuzzyValue out of [0,1]: " + std::to_string(v));
    }
  }

  // Fast path for operator results that are in range by construction (modulo
  // one rounding step, hence the clamp).
  static FuzzyValue unchecked(double v) {
    FuzzyValue f;
    f.v_ = std::clamp(v, 0.0, 1.0);
    return f;
  }

  double value() const { return v_; }

  friend bool operator==(FuzzyValue a, FuzzyValue b) { return a.v_ == b.v_; }
  friend bool operator<(FuzzyValue a, FuzzyValue b) { return a.v_ < b.v_; }

 private:
  double v_;
};

// Strong negation N(a) = 1 - a.
inline FuzzyValue fuzzy_neg(FuzzyValue a) { return FuzzyValue::unchecked(1.0 - a.value()); }

inline FuzzyValue fuzzy_tnorm(Semantics s, FuzzyValue a, FuzzyValue b) {
  const double x = a.value(), y = b.value();
  switch (s) {
    case Semantics::goedel: return FuzzyValue::unchecked(std::min(x, y));
    case Semantics::product: return FuzzyValue::unchecked(x * y);
    case Semantics::lukasiewicz: return FuzzyValue::unchecked(std::max(x + y - 1.0, 0.0));
  }
  throw std::logic_error("unreachable semantics");
}

inline FuzzyValue fuzzy_tconorm(Semantics s, FuzzyValue a, FuzzyValue b) {
  const double x = a.value(), y = b.value();
  switch (s) {
    case Semantics::goedel: return FuzzyValue::unchecked(std::max(x, y));
    case Semantics::product: return FuzzyValue::unchecked(x + y - x * y);
    case Semantics::lukasiewicz: return FuzzyValue::unchecked(std::min(x + y, 1.0));
  }
  throw std::logic_error("unreachable semantics");
}

// S-implication, i.e. S(N(a), c) for the family's T-conorm.
inline FuzzyValue fuzzy_s_implication(Semantics s, FuzzyValue a, FuzzyValue c) {
  const double x = a.value(), y = c.value();
  switch (s) {
    case Semantics::goedel: return FuzzyValue::unchecked(std::max(1.0 - x, y));
    case Semantics::product: return FuzzyValue::unchecked(1.0 - x + x * y);
    case Semantics::lukasiewicz: return FuzzyValue::unchecked(std::min(1.0 - x + y, 1.0));
  }
  throw std::logic_error("unreachable semantics");
}

// Residuated implication. Part of the operator core but never offered to the
// expression search; see Library.
inline FuzzyValue fuzzy_r_implication(Semantics s, FuzzyValue a, FuzzyValue c) {
  const double x = a.value(), y = c.value();
  switch (s) {
    case Semantics::goedel: return x <= y ? FuzzyValue::unchecked(1.0) : c;
    case Semantics::product:
      // x > y >= 0 on this branch, so x > 0.
      return x <= y ? FuzzyValue::unchecked(1.0) : FuzzyValue::unchecked(y / x);
    case Semantics::lukasiewicz: return FuzzyValue::unchecked(std::min(1.0 - x + y, 1.0));
  }
  throw std::logic_error("unreachable semantics");
}

constexpr Semantics kAllSemantics[] = {Semantics::goedel, Semantics::product,
                                       Semantics::lukasiewicz};

}  // namespace fuzex
