#include "fuzex/library.hpp"

#include <stdexcept>

namespace fuzex {

std::string operator_name(TokenKind kind, Semantics s) {
  const char* suffix = "";
  switch (s) {
    case Semantics::goedel: suffix = "_gd"; break;
    case Semantics::product: suffix = "_pr"; break;
    case Semantics::lukasiewicz: suffix = "_lk"; break;
  }
  switch (kind) {
    case TokenKind::tnorm: return std::string("and") + suffix;
    case TokenKind::tconorm: return std::string("or") + suffix;
    case TokenKind::s_implication: return std::string("implies") + suffix;
    case TokenKind::negation: return "not";
    case TokenKind::terminal: break;
  }
  throw std::invalid_argument("operator_name: not an operator kind");
}

Library::Library(LibraryMode mode, std::optional<Semantics> semantics,
                 std::vector<std::string> feature_names)
    : mode_(mode), semantics_(semantics), feature_names_(std::move(feature_names)) {
  if (feature_names_.empty()) {
    throw std::invalid_argument("Library requires at least one feature");
  }
  if (mode_ == LibraryMode::single && !semantics_.has_value()) {
    throw std::invalid_argument("single-semantics library requires a semantics");
  }
  if (mode_ == LibraryMode::combined) semantics_.reset();

  auto add = [this](TokenKind kind, Semantics s, int arity, int weight, std::string name,
                    int feature = -1) {
    Token tok;
    tok.id = static_cast<int>(tokens_.size());
    tok.kind = kind;
    tok.semantics = s;
    tok.feature = feature;
    tok.arity = arity;
    tok.complexity_weight = weight;
    tok.name = std::move(name);
    if (kind == TokenKind::s_implication) s_impl_ids_.push_back(tok.id);
    if (kind == TokenKind::terminal) terminal_ids_.push_back(tok.id);
    tokens_.push_back(std::move(tok));
  };

  const std::vector<Semantics> groups =
      mode_ == LibraryMode::single
          ? std::vector<Semantics>{*semantics_}
          : std::vector<Semantics>{Semantics::goedel, Semantics::product, Semantics::lukasiewicz};
  for (Semantics s : groups) {
    add(TokenKind::tnorm, s, 2, 1, operator_name(TokenKind::tnorm, s));
    add(TokenKind::tconorm, s, 2, 1, operator_name(TokenKind::tconorm, s));
    add(TokenKind::s_implication, s, 2, 2, operator_name(TokenKind::s_implication, s));
  }
  add(TokenKind::negation, Semantics::goedel, 1, 1, "not");
  for (std::size_t i = 0; i < feature_names_.size(); ++i) {
    add(TokenKind::terminal, Semantics::goedel, 0, 1, feature_names_[i], static_cast<int>(i));
  }
}

int Library::find(const std::string& name) const {
  for (const Token& tok : tokens_) {
    if (tok.name == name) return tok.id;
  }
  return -1;
}

Library build_library(LibraryMode mode, std::optional<Semantics> semantics,
                      std::vector<std::string> feature_names) {
  return Library(mode, semantics, std::move(feature_names));
}

}  // namespace fuzex
