#include <doctest.h>

#include "fuzex/library.hpp"

using namespace fuzex;

TEST_SUITE_BEGIN("library");

TEST_CASE("single-semantics library has six tokens for two features") {
  const Library lib = build_library(LibraryMode::single, Semantics::lukasiewicz, {"NBD", "OBD"});
  REQUIRE(lib.size() == 6);
  CHECK(lib.token(0).name == "and_lk");
  CHECK(lib.token(1).name == "or_lk");
  CHECK(lib.token(2).name == "implies_lk");
  CHECK(lib.token(3).name == "not");
  CHECK(lib.token(4).name == "NBD");
  CHECK(lib.token(5).name == "OBD");
  CHECK(lib.token(2).complexity_weight == 2);
  CHECK(lib.token(0).complexity_weight == 1);
  CHECK(lib.token(4).complexity_weight == 1);
  CHECK(lib.s_implication_ids() == std::vector<int>{2});
  CHECK(lib.terminal_ids() == std::vector<int>{4, 5});
}

TEST_CASE("combined library has eleven tokens for one feature") {
  const Library lib = build_library(LibraryMode::combined, std::nullopt, {"NBD"});
  REQUIRE(lib.size() == 11);
  CHECK(lib.token(0).name == "and_gd");
  CHECK(lib.token(1).name == "or_gd");
  CHECK(lib.token(2).name == "implies_gd");
  CHECK(lib.token(3).name == "and_pr");
  CHECK(lib.token(5).name == "implies_pr");
  CHECK(lib.token(6).name == "and_lk");
  CHECK(lib.token(8).name == "implies_lk");
  CHECK(lib.token(9).name == "not");
  CHECK(lib.token(10).name == "NBD");
  CHECK(lib.s_implication_ids() == std::vector<int>{2, 5, 8});
}

TEST_CASE("empty feature list is rejected") {
  CHECK_THROWS_AS(build_library(LibraryMode::single, Semantics::goedel, {}),
                  std::invalid_argument);
}

TEST_CASE("arities follow token kinds") {
  const Library lib = build_library(LibraryMode::combined, std::nullopt, {"A", "B"});
  for (const Token& tok : lib.tokens()) {
    switch (tok.kind) {
      case TokenKind::tnorm:
      case TokenKind::tconorm:
      case TokenKind::s_implication: CHECK(tok.arity == 2); break;
      case TokenKind::negation: CHECK(tok.arity == 1); break;
      case TokenKind::terminal: CHECK(tok.arity == 0); break;
    }
  }
}

TEST_SUITE_END();
