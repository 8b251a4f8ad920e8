#include "doctest.h"
#include "reconkit/builders.hpp"
#include "reconkit/io.hpp"
#include "support.hpp"

using namespace reconkit;
using rktest::check_error;
using rktest::row_map;
using rktest::running_recipe;

TEST_CASE("polynomial structure enumerates chart monomials below the bound") {
  /* oracle: with bound 2 the only Base symbols are the unit and one first
     order monomial per chart; T+ holds the unit and one coordinate per chart */
  auto s = build_polynomial_structure(1, 2);
  CHECK(s.basis(Space::Base).size() == 5);
  CHECK(s.basis(Space::Plus).size() == 5);
  CHECK(s.plus_generators().size() == 4);

  /* bound 4, one axis: unit + 3 exponents x 4 charts; T+ monomials in 4
     coordinates of degree at most 3: 1 + 4 + 10 + 20 */
  auto s4 = build_polynomial_structure(1, 4);
  CHECK(s4.basis(Space::Base).size() == 13);
  CHECK(s4.basis(Space::Plus).size() == 35);
  CHECK(s4.find(Space::Base, "X_e2^3") != kNoSymbol);
  CHECK(s4.find(Space::Plus, "x_e0^2*x_e3") != kNoSymbol);
  CHECK(s4.find(Space::Base, "X_e0^4") == kNoSymbol);

  CHECK(s4.symbol(s4.require(Space::Base, "X_e1^2")).hom == 2);
  CHECK(validate_assumptions(s4).ok);
}

TEST_CASE("bounded monomial coproduct row is the binomial expansion") {
  auto s = build_polynomial_structure(1, 4);
  SymbolId x3 = s.require(Space::Base, "X_e0^3");
  /* oracle, written against the defining formula with hand coefficients:
     X^3 -> 1 (x) x^3 + 3 X (x) x^2 + 3 X^2 (x) x + X^3 (x) 1 */
  std::map<std::pair<SymbolId, SymbolId>, Rational> expect;
  expect[{s.require(Space::Base, "1"), s.require(Space::Plus, "x_e0^3")}] = 1;
  expect[{s.require(Space::Base, "X_e0"), s.require(Space::Plus, "x_e0^2")}] = 3;
  expect[{s.require(Space::Base, "X_e0^2"), s.require(Space::Plus, "x_e0")}] = 3;
  expect[{x3, s.require(Space::Plus, "1")}] = 1;
  CHECK(row_map(s.delta_row(x3)) == expect);
}

TEST_CASE("two-axis monomials expand axis by axis") {
  auto s = build_polynomial_structure(2, 3);
  SymbolId xy = s.require(Space::Base, "X_e5^(1,1)");
  std::map<std::pair<SymbolId, SymbolId>, Rational> expect;
  expect[{s.require(Space::Base, "1"), s.require(Space::Plus, "x_e5*y_e5")}] = 1;
  expect[{s.require(Space::Base, "X_e5^(1,0)"), s.require(Space::Plus, "y_e5")}] = 1;
  expect[{s.require(Space::Base, "X_e5^(0,1)"), s.require(Space::Plus, "x_e5")}] = 1;
  expect[{xy, s.require(Space::Plus, "1")}] = 1;
  CHECK(row_map(s.delta_row(xy)) == expect);
  CHECK(validate_assumptions(s).ok);
}

TEST_CASE("tree closure reproduces the running example basis") {
  auto s = build_tree_structure(running_recipe());

  const char* names[] = {"1",          "Xi",           "I(Xi)",          "Xi*I(Xi)",
                         "I(Xi)^2",    "I(Xi)^3",      "Xi*I(Xi)^2",     "I(Xi*I(Xi))",
                         "I(I(Xi))",   "I(I(Xi)^2)",   "I(Xi*I(Xi)^2)",  "I(I(Xi*I(Xi)))",
                         "X_e0",       "X_e1",         "X_e2",           "X_e3"};
  CHECK(s.basis(Space::Base).size() == 16);
  for (const char* nm : names) CHECK(s.find(Space::Base, nm) != kNoSymbol);

  CHECK(s.symbol(s.require(Space::Base, "Xi")).hom == rat(-5, 8));
  CHECK(s.symbol(s.require(Space::Base, "Xi*I(Xi)")).hom == rat(-1, 4));
  CHECK(s.symbol(s.require(Space::Base, "Xi*I(Xi)^2")).hom == rat(1, 8));
  CHECK(s.symbol(s.require(Space::Base, "I(I(Xi*I(Xi)))")).hom == rat(7, 4));

  /* decorated integration generators: derivative orders are cut by the
     grade, so the rough noise only carries order zero */
  CHECK(s.plus_generators().size() == 44);
  CHECK(s.find(Space::Plus, "I0+_e0(Xi)") != kNoSymbol);
  CHECK(s.find(Space::Plus, "I1+_e0(Xi)") == kNoSymbol);
  CHECK(s.find(Space::Plus, "I1+_e3(I(Xi))") != kNoSymbol);
  CHECK(s.find(Space::Plus, "I1+_e2(Xi*I(Xi)^2)") != kNoSymbol);
  CHECK(s.find(Space::Plus, "I2+_e0(I(Xi))") == kNoSymbol);

  CHECK(validate_assumptions(s).ok);
}

TEST_CASE("integration row carries chart sums and decorations") {
  auto s = build_tree_structure(running_recipe());
  SymbolId itau = s.require(Space::Base, "I(I(Xi))");
  /* oracle: I applied to the row of I(Xi) keeps only the non-polynomial leg,
     then one decoration column per chart and order */
  std::map<std::pair<SymbolId, SymbolId>, Rational> expect;
  expect[{itau, s.require(Space::Plus, "1")}] = 1;
  for (int e = 0; e < 4; ++e) {
    std::string ch = "e" + std::to_string(e);
    expect[{s.require(Space::Base, "1"), s.require(Space::Plus, "I0+_" + ch + "(I(Xi))")}] = 1;
    expect[{s.require(Space::Base, "X_" + ch), s.require(Space::Plus, "I1+_" + ch + "(I(Xi))")}] = 1;
  }
  CHECK(row_map(s.delta_row(itau)) == expect);
}

TEST_CASE("legs force admission of sub-products") {
  /* with only the cubic rule, the square still enters through the coproduct */
  TreeStructureSpec spec = running_recipe();
  spec.products = {{"I(Xi)", "I(Xi)", "I(Xi)"}};
  auto s = build_tree_structure(spec);
  CHECK(s.find(Space::Base, "I(Xi)^2") != kNoSymbol);
  CHECK(validate_assumptions(s).ok);
}

TEST_CASE("builder rejects malformed recipes") {
  check_error([] { build_polynomial_structure(3, 4); }, Errc::InvalidArgument);
  check_error([] { build_polynomial_structure(1, 0); }, Errc::InvalidArgument);

  TreeStructureSpec bad = running_recipe();
  bad.noises = {{"Xi", rat(-3, 2)}};  // at or below -theta: integration undefined
  check_error([&] { build_tree_structure(bad); }, Errc::InvalidArgument);

  bad = running_recipe();
  bad.noises = {{"1", rat(-5, 8)}};
  check_error([&] { build_tree_structure(bad); }, Errc::InvalidArgument);

  bad = running_recipe();
  bad.products.push_back({"Xi", "NoSuch"});
  check_error([&] { build_tree_structure(bad); }, Errc::NotInBasis);

  bad = running_recipe();
  bad.products.push_back({"I(X_e0)"});
  check_error([&] { build_tree_structure(bad); }, Errc::InvalidArgument);

  bad = running_recipe();
  bad.max_deriv = 0;  // first-order decorations are required for closure
  check_error([&] { build_tree_structure(bad); }, Errc::InvalidArgument);

  bad = running_recipe();
  bad.theta = 0;
  check_error([&] { build_tree_structure(bad); }, Errc::InvalidArgument);
}

TEST_CASE("structure serialization round trips byte for byte") {
  auto s = build_tree_structure(running_recipe());
  std::string j1 = structure_to_json(s);
  auto s2 = structure_from_json(j1);
  std::string j2 = structure_to_json(s2);
  CHECK(j1 == j2);
  CHECK(s.content_hash() == s2.content_hash());
  CHECK(s.basis(Space::Base).size() == s2.basis(Space::Base).size());
  CHECK(s.basis(Space::Plus).size() == s2.basis(Space::Plus).size());
  CHECK(validate_assumptions(s2).ok);

  /* independent rebuilds serialize identically */
  auto s3 = build_tree_structure(running_recipe());
  CHECK(structure_to_json(s3) == j1);
}

TEST_CASE("recipe JSON round trips") {
  TreeStructureSpec spec = running_recipe();
  std::string j = tree_spec_to_json(spec);
  TreeStructureSpec back = tree_spec_from_json(j);
  CHECK(back.dim == spec.dim);
  CHECK(back.theta == spec.theta);
  CHECK(back.cutoff == spec.cutoff);
  CHECK(back.noises == spec.noises);
  CHECK(back.products == spec.products);
  CHECK(back.poly_degree == spec.poly_degree);
  CHECK(back.max_deriv == spec.max_deriv);

  auto s1 = build_tree_structure(spec);
  auto s2 = build_tree_structure(back);
  CHECK(structure_to_json(s1) == structure_to_json(s2));
}

TEST_CASE("quotients read off coproduct columns") {
  auto s = build_tree_structure(running_recipe());
  SymbolId itau = s.require(Space::Base, "I(Xi)");
  SymbolId unit = s.require(Space::Base, "1");

  Vec self = quotient(s, itau, itau);
  CHECK(self == vec_of(Space::Plus, s.require(Space::Plus, "1")));

  Vec jet = quotient(s, itau, unit);
  Vec expect(Space::Plus);
  for (int e = 0; e < 4; ++e)
    expect.add(s.require(Space::Plus, "I0+_e" + std::to_string(e) + "(Xi)"), 1);
  CHECK(jet == expect);

  /* proper quotient of a product: Xi*I(Xi) over Xi collects the integration
     columns of the second factor */
  Vec q = quotient(s, s.require(Space::Base, "Xi*I(Xi)"), s.require(Space::Base, "Xi"));
  CHECK(q == expect);
}
