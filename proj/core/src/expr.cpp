#include "fuzex/expr.hpp"

#include <cctype>
#include <utility>

namespace fuzex {

int open_slots(std::span<const int> prefix, const Library& lib) {
  int open = 1;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    open += lib.token(prefix[i]).arity - 1;
    if (open == 0 && i + 1 < prefix.size()) return -1;
  }
  return open;
}

bool is_complete(const Traversal& t, const Library& lib) {
  return !t.empty() && open_slots(t.ids, lib) == 0;
}

ExprTree tree_from_traversal(const Traversal& t, const Library& lib) {
  if (t.empty()) throw IncompleteTraversalError("empty traversal");

  std::vector<ExprTree::Node> nodes;
  nodes.reserve(t.size());
  // Stack of node indices still missing children.
  std::vector<int> pending;
  for (std::size_t pos = 0; pos < t.size(); ++pos) {
    if (pos > 0 && pending.empty()) {
      throw DanglingTokensError("traversal closes before token " + std::to_string(pos));
    }
    const Token& tok = lib.token(t.ids[pos]);
    const int idx = static_cast<int>(nodes.size());
    nodes.push_back(ExprTree::Node{tok, {-1, -1}});
    if (!pending.empty()) {
      ExprTree::Node& parent = nodes[static_cast<std::size_t>(pending.back())];
      if (parent.child[0] == -1) {
        parent.child[0] = idx;
      } else {
        parent.child[1] = idx;
      }
      if (parent.child[parent.token.arity - 1] != -1) pending.pop_back();
    }
    if (tok.arity > 0) pending.push_back(idx);
  }
  if (!pending.empty()) {
    throw IncompleteTraversalError("traversal leaves " +
                                   std::to_string(open_slots(t.ids, lib)) + " open slots");
  }
  return ExprTree::from_nodes(std::move(nodes));
}

Traversal traversal_from_tree(const ExprTree& tree) {
  // Nodes are stored in pre-order already.
  Traversal t;
  t.ids.reserve(tree.size());
  for (const auto& node : tree.nodes()) t.ids.push_back(node.token.id);
  return t;
}

namespace {

FuzzyValue apply_operator(const Token& tok, FuzzyValue a, FuzzyValue b) {
  switch (tok.kind) {
    case TokenKind::tnorm: return fuzzy_tnorm(tok.semantics, a, b);
    case TokenKind::tconorm: return fuzzy_tconorm(tok.semantics, a, b);
    case TokenKind::s_implication: return fuzzy_s_implication(tok.semantics, a, b);
    case TokenKind::negation: return fuzzy_neg(a);
    case TokenKind::terminal: break;
  }
  throw std::logic_error("apply_operator on terminal");
}

}  // namespace

FuzzyValue evaluate(const ExprTree& tree, std::span<const FuzzyValue> row) {
  // Reverse pre-order with a value stack evaluates without recursion.
  std::vector<FuzzyValue> stack;
  const auto& nodes = tree.nodes();
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
    const Token& tok = it->token;
    if (tok.is_terminal()) {
      if (tok.feature < 0 || static_cast<std::size_t>(tok.feature) >= row.size()) {
        throw std::out_of_range("evaluate: feature index " + std::to_string(tok.feature) +
                                " out of bounds for row of size " + std::to_string(row.size()));
      }
      stack.push_back(row[static_cast<std::size_t>(tok.feature)]);
    } else if (tok.arity == 1) {
      stack.back() = apply_operator(tok, stack.back(), FuzzyValue{});
    } else {
      FuzzyValue a = stack.back();
      stack.pop_back();
      FuzzyValue b = stack.back();
      stack.back() = apply_operator(tok, a, b);
    }
  }
  return stack.back();
}

std::vector<FuzzyValue> evaluate_columns(
    const ExprTree& tree, std::span<const std::vector<FuzzyValue>* const> columns) {
  const std::size_t n = columns.empty() ? 0 : columns.front()->size();
  // Column stack mirrors the scalar evaluator; buffers are recycled on pop.
  std::vector<std::vector<FuzzyValue>> stack;
  std::vector<std::vector<FuzzyValue>> spare;
  auto fresh = [&]() {
    if (!spare.empty()) {
      auto buf = std::move(spare.back());
      spare.pop_back();
      return buf;
    }
    return std::vector<FuzzyValue>(n);
  };

  const auto& nodes = tree.nodes();
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
    const Token& tok = it->token;
    if (tok.is_terminal()) {
      if (tok.feature < 0 || static_cast<std::size_t>(tok.feature) >= columns.size()) {
        throw std::out_of_range("evaluate_columns: feature index " + std::to_string(tok.feature) +
                                " out of bounds for " + std::to_string(columns.size()) +
                                " columns");
      }
      auto buf = fresh();
      const auto& col = *columns[static_cast<std::size_t>(tok.feature)];
      buf.assign(col.begin(), col.end());
      stack.push_back(std::move(buf));
    } else if (tok.arity == 1) {
      auto& top = stack.back();
      for (auto& v : top) v = fuzzy_neg(v);
    } else {
      auto a = std::move(stack.back());
      stack.pop_back();
      auto& b = stack.back();
      switch (tok.kind) {
        case TokenKind::tnorm:
          for (std::size_t i = 0; i < n; ++i) b[i] = fuzzy_tnorm(tok.semantics, a[i], b[i]);
          break;
        case TokenKind::tconorm:
          for (std::size_t i = 0; i < n; ++i) b[i] = fuzzy_tconorm(tok.semantics, a[i], b[i]);
          break;
        default:
          for (std::size_t i = 0; i < n; ++i) b[i] = fuzzy_s_implication(tok.semantics, a[i], b[i]);
          break;
      }
      spare.push_back(std::move(a));
    }
  }
  return std::move(stack.back());
}

int complexity(const ExprTree& tree) {
  int sum = 0;
  for (const auto& node : tree.nodes()) sum += node.token.complexity_weight;
  return sum;
}

int complexity(const Traversal& t, const Library& lib) {
  int sum = 0;
  for (int id : t.ids) sum += lib.token(id).complexity_weight;
  return sum;
}

namespace {

void render_node(const ExprTree& tree, int idx, std::string& out, bool pretty) {
  const auto& node = tree.nodes()[static_cast<std::size_t>(idx)];
  const Token& tok = node.token;
  if (tok.is_terminal()) {
    out += tok.name;
    return;
  }
  if (pretty) {
    const char* sym = "";
    switch (tok.kind) {
      case TokenKind::tnorm: sym = "⊗"; break;       // ⊗
      case TokenKind::tconorm: sym = "⊕"; break;     // ⊕
      case TokenKind::s_implication: sym = "→"; break;  // →
      case TokenKind::negation: sym = "¬"; break;    // ¬
      case TokenKind::terminal: break;
    }
    out += sym;
    if (tok.arity == 2) {
      switch (tok.semantics) {
        case Semantics::goedel: out += "_gd"; break;
        case Semantics::product: out += "_pr"; break;
        case Semantics::lukasiewicz: out += "_lk"; break;
      }
    }
  } else {
    out += tok.name;
  }
  out += '(';
  render_node(tree, node.child[0], out, pretty);
  if (tok.arity == 2) {
    out += ", ";
    render_node(tree, node.child[1], out, pretty);
  }
  out += ')';
}

}  // namespace

std::string render(const ExprTree& tree) {
  std::string out;
  render_node(tree, 0, out, false);
  return out;
}

std::string render_pretty(const ExprTree& tree) {
  std::string out;
  render_node(tree, 0, out, true);
  return out;
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, const Library& lib) : text_(text), lib_(lib) {}

  Traversal run() {
    Traversal t;
    parse_expr(t);
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return t;
  }

 private:
  void parse_expr(Traversal& out) {
    skip_ws();
    const std::string name = read_name();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      const int id = lib_.find(name);
      if (id < 0 || lib_.token(id).is_terminal()) fail("unknown operator '" + name + "'");
      out.ids.push_back(id);
      ++pos_;  // '('
      parse_expr(out);
      for (int k = 1; k < lib_.token(id).arity; ++k) {
        skip_ws();
        expect(',');
        parse_expr(out);
      }
      skip_ws();
      expect(')');
    } else {
      const int id = lib_.find(name);
      if (id < 0 || !lib_.token(id).is_terminal()) fail("unknown feature '" + name + "'");
      out.ids.push_back(id);
    }
  }

  std::string read_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a name");
    return text_.substr(start, pos_ - start);
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& why) {
    throw ParseError(why + " at offset " + std::to_string(pos_));
  }

  const std::string& text_;
  const Library& lib_;
  std::size_t pos_ = 0;
};

}  // namespace

ExprTree parse(const std::string& text, const Library& lib) {
  Parser p(text, lib);
  return tree_from_traversal(p.run(), lib);
}

}  // namespace fuzex
