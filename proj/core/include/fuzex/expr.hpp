#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fuzex/fuzzy.hpp"
#include "fuzex/library.hpp"

namespace fuzex {

// Pre-order token id sequence. A traversal is complete when the running open
// slot count (1 initially, +arity-1 per token) reaches zero exactly at the
// final token.
struct Traversal {
  std::vector<int> ids;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  friend bool operator==(const Traversal&, const Traversal&) = default;
};

struct IncompleteTraversalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DanglingTokensError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Expression tree stored as a pre-order flat node array; nodes[0] is the root.
class ExprTree {
 public:
  struct Node {
    Token token;
    int child[2] = {-1, -1};
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }
  std::size_t size() const { return nodes_.size(); }

  static ExprTree from_nodes(std::vector<Node> nodes) {
    ExprTree t;
    t.nodes_ = std::move(nodes);
    return t;
  }

 private:
  std::vector<Node> nodes_;
};

// Open slot count after consuming the prefix; returns -1 once the traversal
// has closed before the prefix ended (dangling tokens).
int open_slots(std::span<const int> prefix, const Library& lib);

bool is_complete(const Traversal& t, const Library& lib);

// Throws IncompleteTraversalError / DanglingTokensError.
ExprTree tree_from_traversal(const Traversal& t, const Library& lib);

Traversal traversal_from_tree(const ExprTree& tree);

// row holds one value per library terminal, in terminal order.
FuzzyValue evaluate(const ExprTree& tree, std::span<const FuzzyValue> row);

// Columnar evaluation: columns[i] is the value vector of terminal i. All
// columns must share one length. Elementwise identical to evaluate() per row.
std::vector<FuzzyValue> evaluate_columns(const ExprTree& tree,
                                         std::span<const std::vector<FuzzyValue>* const> columns);

// Sum of token complexity weights over all nodes.
int complexity(const ExprTree& tree);
int complexity(const Traversal& t, const Library& lib);

// Deterministic prefix notation, e.g. "and_lk(NBD, not(OBD))".
std::string render(const ExprTree& tree);

// Unicode operator symbols for humans; not parseable.
std::string render_pretty(const ExprTree& tree);

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inverse of render() for the grammar
//   expr := name '(' expr (',' expr)* ')' | featureName
ExprTree parse(const std::string& text, const Library& lib);

}  // namespace fuzex
