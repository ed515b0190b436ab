#include "fuzex/constraints.hpp"

#include <stdexcept>

namespace fuzex {

void ConstraintConfig::validate(const Library& lib) const {
  if (min_length < 1 || max_length < min_length) {
    throw std::invalid_argument("constraint lengths must satisfy 1 <= min <= max");
  }
  if (constrained_root) {
    if (lib.s_implication_ids().empty()) {
      throw std::invalid_argument("constrained root requires an s-implication in the library");
    }
    if (max_length < 3) {
      throw std::invalid_argument("constrained root needs max_length >= 3");
    }
  }
}

std::vector<bool> valid_token_mask(const Traversal& partial, const Library& lib,
                                   const ConstraintConfig& cfg) {
  const int len = static_cast<int>(partial.size());
  const int open = partial.empty() ? 1 : open_slots(partial.ids, lib);
  if (open <= 0) {
    throw std::invalid_argument("valid_token_mask: partial traversal is not extendable");
  }

  std::vector<bool> mask(static_cast<std::size_t>(lib.size()), false);
  for (const Token& tok : lib.tokens()) {
    // Minimal completion after appending: every open slot costs one token.
    if (len + open + tok.arity > cfg.max_length) continue;
    if (cfg.constrained_root) {
      const bool is_impl = tok.kind == TokenKind::s_implication;
      if (len == 0 && !is_impl) continue;
      if (len > 0 && is_impl) continue;
    }
    mask[static_cast<std::size_t>(tok.id)] = true;
  }

  // Below min_length every all-terminal completion ends too short; steer
  // toward operators when any is still allowed.
  if (len + open < cfg.min_length) {
    bool has_operator = false;
    for (const Token& tok : lib.tokens()) {
      if (!tok.is_terminal() && mask[static_cast<std::size_t>(tok.id)]) {
        has_operator = true;
        break;
      }
    }
    if (has_operator) {
      for (int id : lib.terminal_ids()) mask[static_cast<std::size_t>(id)] = false;
    }
  }
  return mask;
}

Traversal enforce_root_implication(const Traversal& t, const Library& lib, Rng& rng) {
  const auto& impl_ids = lib.s_implication_ids();
  if (impl_ids.empty()) {
    throw std::invalid_argument("enforce_root_implication: library has no s-implication");
  }
  if (!is_complete(t, lib)) {
    throw std::invalid_argument("enforce_root_implication: traversal must be complete");
  }

  Traversal out = t;
  std::size_t first_impl = out.ids.size();
  for (std::size_t i = 0; i < out.ids.size(); ++i) {
    if (lib.token(out.ids[i]).kind == TokenKind::s_implication) {
      first_impl = i;
      break;
    }
  }
  if (first_impl == out.ids.size()) {
    const int pick = impl_ids[static_cast<std::size_t>(rng.next_int(
        static_cast<int>(impl_ids.size())))];
    out.ids.insert(out.ids.begin(), pick);
  } else if (first_impl != 0) {
    std::swap(out.ids[0], out.ids[first_impl]);
  }

  // Re-complete: truncate once the arity counter closes, append terminals if
  // it never does.
  int open = 1;
  std::size_t end = 0;
  for (; end < out.ids.size(); ++end) {
    open += lib.token(out.ids[end]).arity - 1;
    if (open == 0) {
      ++end;
      break;
    }
  }
  out.ids.resize(end);
  const auto& terms = lib.terminal_ids();
  while (open > 0) {
    out.ids.push_back(terms[static_cast<std::size_t>(rng.next_int(
        static_cast<int>(terms.size())))]);
    --open;
  }
  return out;
}

}  // namespace fuzex
