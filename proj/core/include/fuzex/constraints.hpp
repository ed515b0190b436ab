#pragma once

#include <vector>

#include "fuzex/expr.hpp"
#include "fuzex/library.hpp"
#include "fuzex/rng.hpp"

namespace fuzex {

// Sampling constraints. With constrained_root set, position 0 admits only
// S-implication tokens and S-implications are masked everywhere else, so the
// implication is the root and never a child.
struct ConstraintConfig {
  int max_length = 32;
  int min_length = 4;
  bool constrained_root = false;

  void validate(const Library& lib) const;
};

// mask[i] == true iff appending token i keeps the partial traversal
// completable within cfg.max_length (and compatible with the root constraint).
// Terminals are additionally masked while every all-terminal completion would
// end below cfg.min_length, provided some longer completion exists.
std::vector<bool> valid_token_mask(const Traversal& partial, const Library& lib,
                                   const ConstraintConfig& cfg);

// Makes an S-implication the root of a complete traversal: swaps the first
// S-implication occurrence to index 0 (inserting one if absent), then repairs
// arity by appending rng-drawn terminals or truncating the dangling suffix.
Traversal enforce_root_implication(const Traversal& t, const Library& lib, Rng& rng);

}  // namespace fuzex
