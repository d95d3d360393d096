#include "mcc/formats.hpp"
#include "mcc/number.hpp"
#include "support/random_cnf.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace mcc;

namespace {

std::string read_data(const std::string& name) {
  std::ifstream in(std::string(MCC_TEST_DATA_DIR) + "/" + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

template <typename Fn>
FormatErrorKind error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const FormatError& e) {
    return e.kind();
  }
  FAIL("no FormatError thrown");
  return FormatErrorKind::MalformedValue;
}

}  // namespace

TEST_CASE("parse_decimal is exact") {
  CHECK(parse_decimal("0.4") == Rational(2, 5));
  CHECK(parse_decimal("-1.25") == Rational(-5, 4));
  CHECK(parse_decimal("+3") == Rational(3));
  CHECK(parse_decimal(".5") == Rational(1, 2));
  CHECK(parse_decimal("5.") == Rational(5));
  CHECK(parse_decimal("1e3") == Rational(1000));
  CHECK(parse_decimal("2.5E-2") == Rational(1, 40));
  CHECK(parse_decimal("000.000") == Rational(0));
  for (const char* bad : {"", ".", "-", "e5", "1e", "inf", "nan", "1.2.3", "0x10", "1 2", "1e+"}) {
    CAPTURE(bad);
    CHECK_FALSE(parse_decimal(bad).has_value());
  }
}

TEST_CASE("parse_integer accepts digits only") {
  CHECK(parse_integer("22") == BigInt(22));
  CHECK(parse_integer("123456789012345678901234567890") == BigInt("123456789012345678901234567890"));
  CHECK_FALSE(parse_integer("-1").has_value());
  CHECK_FALSE(parse_integer("1.0").has_value());
  CHECK_FALSE(parse_integer("").has_value());
}

TEST_CASE("format_fixed rounds half to even") {
  CHECK(format_fixed(Rational(6), 1) == "6.0");
  CHECK(format_fixed(Rational(1, 8), 2) == "0.12");
  CHECK(format_fixed(Rational(3, 8), 2) == "0.38");
  CHECK(format_fixed(Rational(5, 2), 0) == "2");
  CHECK(format_fixed(Rational(7, 2), 0) == "4");
  CHECK(format_fixed(Rational(-1, 8), 2) == "-0.12");
  CHECK(format_fixed(Rational(1, 3), 5) == "0.33333");
  CHECK(format_fixed(Rational(2, 3), 3) == "0.667");
  CHECK(format_fixed(Rational(0), 3) == "0.000");
}

TEST_CASE("format_trimmed keeps one fractional digit") {
  CHECK(format_trimmed(Rational(6), 20) == "6.0");
  CHECK(format_trimmed(Rational(3, 4), 20) == "0.75");
  CHECK(format_trimmed(Rational(1, 3), 4) == "0.3333");
  CHECK(format_trimmed(Rational(0), 4) == "0.0");
}

TEST_CASE("format_exact covers terminating expansions only") {
  CHECK(format_exact(Rational(2, 5)) == std::optional<std::string>("0.4"));
  CHECK(format_exact(Rational(1)) == std::optional<std::string>("1.0"));
  CHECK(format_exact(Rational(1, 1024)) == std::optional<std::string>("0.0009765625"));
  CHECK_FALSE(format_exact(Rational(1, 3)).has_value());
  for (long num = 0; num <= 1000; num += 7) {
    Rational q(num, 1000);
    q.canonicalize();
    auto text = format_exact(q);
    REQUIRE(text.has_value());
    CHECK(parse_decimal(*text) == q);
  }
}

TEST_CASE("log10 and exp10 approximations") {
  Rational l = log10_approx(Rational(1000), 30);
  CHECK(abs(l - Rational(3)) < Rational(1, BigInt("1000000000000000000000000000000")));
  CHECK(format_fixed(log10_approx(Rational(6), 25), 20) == "0.77815125038364363251");
  Rational back = exp10_approx(log10_approx(Rational(22), 40), 40);
  CHECK(abs(back - Rational(22)) < Rational(1, 1000000000));
}

TEST_CASE("track names and extensions") {
  CHECK(track_from_path("x/worked_mc.mcc2020_cnf") == Track::mc);
  CHECK(track_from_path("a.mcc2020_wcnf") == Track::wmc);
  CHECK(track_from_path("a.mcc2020_pcnf") == Track::pmc);
  CHECK_FALSE(track_from_path("a.cnf").has_value());
  CHECK_FALSE(track_from_path("a.mcc2020_cnf.gz").has_value());
  for (auto t : {Track::mc, Track::wmc, Track::pmc}) CHECK(track_from_string(to_string(t)) == t);
  CHECK_FALSE(track_from_string("log10-wmc").has_value());
}

TEST_CASE("worked instances parse") {
  auto mc = parse_mc(read_data("worked_mc.mcc2020_cnf"), {true});
  CHECK(mc.num_vars == 6);
  CHECK(mc.clauses == std::vector<Clause>{{-1, -2}, {2, 3, -4}, {4, 5}, {4, 6}});
  CHECK(mc.comments.size() == 3);
  CHECK(mc.comments[2] == "comment between clauses");

  auto wmc = parse_wmc(read_data("worked_wmc.mcc2020_wcnf"), {true});
  CHECK(wmc.weights.size() == 6);
  CHECK(wmc.weights.at(1) == Rational(2, 5));
  CHECK(wmc.weights.at(-1) == Rational(3, 5));
  CHECK(wmc.weights.at(5) == Rational(1));

  auto pmc = parse_pmc(read_data("worked_pmc.mcc2020_pcnf"), {true});
  CHECK(pmc.projection_vars == std::set<Var>{1, 2});
  CHECK(pmc.declared_projection_count == 2u);
  CHECK(pmc.base.clauses[1] == Clause{2, 3, -2});
}

TEST_CASE("header errors") {
  CHECK(error_kind([] { parse_mc("1 2 0\np cnf 2 1\n"); }) == FormatErrorKind::MissingHeader);
  CHECK(error_kind([] { parse_mc("c only\n"); }) == FormatErrorKind::MissingHeader);
  CHECK(error_kind([] { parse_mc("p cnf 2 1\np cnf 2 1\n1 0\n"); }) == FormatErrorKind::DuplicateHeader);
  CHECK(error_kind([] { parse_mc("p wcnf 2 1\n1 0\n"); }) == FormatErrorKind::MalformedHeader);
  CHECK(error_kind([] { parse_mc("p cnf 2\n1 0\n"); }) == FormatErrorKind::MalformedHeader);
  CHECK(error_kind([] { parse_mc("p cnf -2 1\n1 0\n"); }) == FormatErrorKind::MalformedHeader);
  CHECK(error_kind([] { parse_mc("p cnf 0 0\n", {true}); }) == FormatErrorKind::MalformedHeader);
  CHECK(parse_mc("p cnf 0 0\n").num_vars == 0);
}

TEST_CASE("clause errors") {
  CHECK(error_kind([] { parse_mc("p cnf 2 1\n1 3 0\n"); }) == FormatErrorKind::LiteralOutOfRange);
  CHECK(error_kind([] { parse_mc("p cnf 2 1\n1 -3 0\n"); }) == FormatErrorKind::LiteralOutOfRange);
  CHECK(error_kind([] { parse_mc("p cnf 2 1\n1 x 0\n"); }) == FormatErrorKind::MalformedToken);
  CHECK(error_kind([] { parse_mc("p cnf 2 1\n1 2\n"); }) == FormatErrorKind::UnterminatedClause);
  CHECK(error_kind([] { parse_mc("p cnf 2 1\n1\n2 0\n", {true}); }) == FormatErrorKind::UnterminatedClause);
  CHECK(error_kind([] { parse_mc("p cnf 2 2\n1 0 2 0\n", {true}); }) == FormatErrorKind::MalformedToken);
  CHECK(error_kind([] { parse_mc("p cnf 2 2\n1 0\n", {true}); }) == FormatErrorKind::ClauseCountMismatch);
}

TEST_CASE("lenient parsing accepts what strict rejects, with warnings") {
  std::vector<std::string> warnings;
  ParseOptions lenient{false, &warnings};
  auto doc = parse_mc("p cnf 3 5\n1\n2 0 -3 0\n\n   \n", lenient);
  CHECK(doc.clauses == std::vector<Clause>{{1, 2}, {-3}});
  CHECK(doc.num_clauses == 5);
  CHECK(warnings.size() == 1);
}

TEST_CASE("weight lines") {
  CHECK(error_kind([] { parse_wmc("p wcnf 2 0\nw 3 0.5 0\n"); }) == FormatErrorKind::LiteralOutOfRange);
  CHECK(error_kind([] { parse_wmc("p wcnf 2 0\nw 1 1.5 0\n"); }) == FormatErrorKind::WeightOutOfRange);
  CHECK(error_kind([] { parse_wmc("p wcnf 2 0\nw 1 -0.1 0\n"); }) == FormatErrorKind::WeightOutOfRange);
  CHECK(error_kind([] { parse_wmc("p wcnf 2 0\nw 1 abc 0\n"); }) == FormatErrorKind::MalformedWeightLine);
  CHECK(error_kind([] { parse_wmc("p wcnf 2 0\nw 0 0.5 0\n"); }) == FormatErrorKind::MalformedWeightLine);
  CHECK(error_kind([] { parse_wmc("p wcnf 2 0\nw 1 0.5 0 7\n"); }) == FormatErrorKind::MalformedWeightLine);
  CHECK(error_kind([] { parse_wmc("p wcnf 2 0\nw 1 0.5\n", {true}); }) == FormatErrorKind::MalformedWeightLine);
  CHECK(parse_wmc("p wcnf 2 0\nw 1 0.5\n").weights.at(1) == Rational(1, 2));
  CHECK(error_kind([] { parse_wmc("p wcnf 2 0\nw 1 0.5 0\nw 1 0.25 0\n", {true}); }) ==
        FormatErrorKind::DuplicateWeight);
  std::vector<std::string> warnings;
  auto doc = parse_wmc("p wcnf 2 0\nw 1 0.5 0\nw 1 0.25 0\n", {false, &warnings});
  CHECK(doc.weights.at(1) == Rational(1, 4));
  CHECK_FALSE(warnings.empty());
  CHECK(error_kind([] { parse_mc("p cnf 2 0\nw 1 0.5 0\n"); }) == FormatErrorKind::MalformedToken);
  CHECK(error_kind([] { parse_wmc("w 1 0.5 0\np wcnf 2 0\n"); }) == FormatErrorKind::MissingHeader);
}

TEST_CASE("projection lines") {
  CHECK(error_kind([] { parse_pmc("p pcnf 3 1\n1 0\n"); }) == FormatErrorKind::MissingVpLine);
  CHECK(error_kind([] { parse_pmc("p pcnf 3 1\nvp 1 0\nvp 2 0\n1 0\n"); }) == FormatErrorKind::DuplicateVpLine);
  CHECK(error_kind([] { parse_pmc("p pcnf 3 1\nvp 4 0\n1 0\n"); }) == FormatErrorKind::ProjectionVarOutOfRange);
  CHECK(error_kind([] { parse_pmc("p pcnf 3 1\nvp 1 2\n1 0\n"); }) == FormatErrorKind::UnterminatedClause);
  CHECK(error_kind([] { parse_pmc("p pcnf 3 1 3\nvp 1 2 0\n1 0\n", {true}); }) ==
        FormatErrorKind::ProjectionCountMismatch);
  CHECK(parse_pmc("p pcnf 3 1 3\nvp 1 2 0\n1 0\n").projection_vars.size() == 2);
  // The vp line may come last.
  CHECK(parse_pmc("p pcnf 3 1\n1 0\nvp 3 0\n", {true}).projection_vars == std::set<Var>{3});
  CHECK(parse_pmc("p pcnf 3 1\nvp 0\n1 0\n").projection_vars.empty());
  CHECK(error_kind([] { parse_mc("p cnf 3 1\nvp 1 0\n1 0\n"); }) == FormatErrorKind::MalformedToken);
}

TEST_CASE("serialize round-trips random documents") {
  testing::RandomCnf gen(7);
  for (int i = 0; i < 200; ++i) {
    auto f = gen.formula({});
    CnfDocument doc{f.num_vars, f.clauses.size(), f.clauses, {"generated", ""}};
    CHECK(parse_mc(serialize(doc), {true}) == doc);

    WcnfDocument wdoc{doc, {}};
    auto w = gen.weights(f.num_vars);
    for (Var v = 1; v <= f.num_vars; ++v) {
      if (gen.chance(0.5)) {
        wdoc.weights[static_cast<Lit>(v)] = w.weight(static_cast<Lit>(v));
        wdoc.weights[-static_cast<Lit>(v)] = w.weight(-static_cast<Lit>(v));
      }
    }
    CHECK(parse_wmc(serialize(wdoc), {true}) == wdoc);

    PcnfDocument pdoc{doc, gen.projection(f.num_vars), std::nullopt};
    CHECK(parse_pmc(serialize(pdoc), {true}) == pdoc);
  }
}

TEST_CASE("serialize rejects non-terminating weights") {
  WcnfDocument doc;
  doc.base.num_vars = 1;
  doc.weights[1] = Rational(1, 3);
  CHECK_THROWS(serialize(doc));
}

TEST_CASE("parse_solution") {
  auto s = parse_solution("c This file describes that the model count is 22\ns mc 22\n", Track::mc);
  CHECK(s.value == Rational(22));
  CHECK(s.text == "22");
  CHECK_FALSE(s.log10);

  CHECK(parse_solution("s wmc 6.0\n", Track::wmc).value == Rational(6));
  auto l = parse_solution("s log10-wmc 0.778\n", Track::wmc);
  CHECK(l.log10);
  CHECK(l.value == Rational(389, 500));
  CHECK(parse_solution("s log10-wmc -inf\n", Track::wmc).negative_infinity);
  // The last solution line wins; other "s" lines are ignored.
  CHECK(parse_solution("s mc 1\ns SATISFIABLE\ns mc 2\n", Track::mc).value == Rational(2));

  CHECK(error_kind([] { parse_solution("c nothing\n", Track::mc); }) == FormatErrorKind::NoSolutionLine);
  CHECK(error_kind([] { parse_solution("s pmc 3\n", Track::mc); }) == FormatErrorKind::TrackTagMismatch);
  CHECK(error_kind([] { parse_solution("s log10-wmc 1.0\n", Track::pmc); }) == FormatErrorKind::TrackTagMismatch);
  CHECK(error_kind([] { parse_solution("s mc 2.5\n", Track::mc); }) == FormatErrorKind::MalformedValue);
  CHECK(error_kind([] { parse_solution("s mc 22 extra\n", Track::mc); }) == FormatErrorKind::MalformedValue);
  CHECK(error_kind([] { parse_solution("s wmc -1.0\n", Track::wmc); }) == FormatErrorKind::MalformedValue);
}
