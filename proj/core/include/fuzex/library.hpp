#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fuzex/fuzzy.hpp"

namespace fuzex {

enum class TokenKind { tnorm, tconorm, s_implication, negation, terminal };

// One entry of the search alphabet: a fuzzy operator or a dataset feature.
struct Token {
  int id = -1;
  TokenKind kind = TokenKind::terminal;
  Semantics semantics = Semantics::goedel;  // meaningful for binary operators only
  int feature = -1;                         // terminal: index into the library's feature list
  int arity = 0;
  int complexity_weight = 1;
  std::string name;  // "and_lk", "implies_pr", "not", or the feature name

  bool is_terminal() const { return kind == TokenKind::terminal; }
  bool is_binary() const { return arity == 2; }
};

enum class LibraryMode { single, combined };

// The ordered token alphabet the policy samples from. Token ordering is
// deterministic: binary operators grouped by semantics (goedel, product,
// lukasiewicz; tnorm/tconorm/s-implication within a group), then the shared
// negator, then terminals in feature order. R-implications are deliberately
// absent.
class Library {
 public:
  Library(LibraryMode mode, std::optional<Semantics> semantics,
          std::vector<std::string> feature_names);

  const std::vector<Token>& tokens() const { return tokens_; }
  const Token& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(tokens_.size()); }

  LibraryMode mode() const { return mode_; }
  std::optional<Semantics> semantics() const { return semantics_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  const std::vector<int>& s_implication_ids() const { return s_impl_ids_; }
  const std::vector<int>& terminal_ids() const { return terminal_ids_; }

  // Token id by rendered name, -1 when absent.
  int find(const std::string& name) const;

 private:
  LibraryMode mode_;
  std::optional<Semantics> semantics_;
  std::vector<std::string> feature_names_;
  std::vector<Token> tokens_;
  std::vector<int> s_impl_ids_;
  std::vector<int> terminal_ids_;
};

Library build_library(LibraryMode mode, std::optional<Semantics> semantics,
                      std::vector<std::string> feature_names);

// Rendered-name helpers ("and_lk", "or_pr", "implies_gd", "not").
std::string operator_name(TokenKind kind, Semantics s);

}  // namespace fuzex
