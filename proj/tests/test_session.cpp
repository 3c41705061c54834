#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "json.hpp"

#include "defk/defmap.hpp"
#include "defk/defset.hpp"
#include "defk/error.hpp"
#include "defk/k1.hpp"
#include "defk/module.hpp"
#include "defk/ppset.hpp"
#include "defk/ring.hpp"
#include "defk/scalar.hpp"
#include "defk/session.hpp"

using namespace defk;
using nlohmann::json;

namespace {

Session parse_ok(const std::string& text) {
  ParseResult r = parse_dsl(text);
  for (const Diagnostic& d : r.diagnostics) {
    INFO(d.str());
    CHECK(false);
  }
  REQUIRE(r.session.has_value());
  return std::move(*r.session);
}

std::vector<Diagnostic> parse_err(const std::string& text) {
  ParseResult r = parse_dsl(text);
  REQUIRE(!r.session.has_value());
  REQUIRE(!r.diagnostics.empty());
  return r.diagnostics;
}

const char* kBase =
    "ring S = M(1, GF(5))\n"
    "module M over S = rank(omega)\n";

}  // namespace

TEST_CASE("ring and module bindings carry the declared shapes") {
  Session s = parse_ok(
      "ring S = M(1, GF(5)) x M(2, QQ) x M(1, HQ)\n"
      "module M over S = rank(omega, 3, omega)\n");
  const RingPtr& r = s.rings.at("S");
  CHECK(r->k() == 3);
  CHECK(r->comp(0).q == 1);
  CHECK(r->comp(0).div == finite_field(5));
  CHECK(r->comp(1).q == 2);
  CHECK(r->comp(1).div == rationals());
  CHECK(r->comp(2).div == quaternions());
  CHECK(r->name() == "M(1, GF(5)) x M(2, QQ) x M(1, HQ)");
  const ModulePtr& m = s.modules.at("M");
  CHECK(m->rank(0) == kOmega);
  CHECK(m->rank(1) == 3);
  CHECK(m->rank(2) == kOmega);
  CHECK(s.order.size() == 2);
}

TEST_CASE("the sample session parses to three bindings and one query") {
  Session s = parse_ok(
      "# sample\n"
      "ring S = M(1, GF(5))\n"
      "module M over S = rank(omega)\n"
      "\n"
      "map f = identity(full(M, 1))\n"
      "k1 f\n");
  CHECK(s.order.size() == 3);
  REQUIRE(s.queries.size() == 1);
  CHECK(s.queries[0] == "k1 f");
  CHECK(s.maps.count("f") == 1);
}

TEST_CASE("diagnostics carry line and column") {
  SUBCASE("unknown ring reference") {
    auto d = parse_err("ring S = M(1, GF(5))\nmodule M over T = rank(omega)\n");
    REQUIRE(d.size() == 1);
    CHECK(d[0].line == 2);
    CHECK(d[0].col == 15);
    CHECK(d[0].message.find("unknown ring 'T'") != std::string::npos);
    CHECK(d[0].str() == "line 2, column 15: " + d[0].message);
  }
  SUBCASE("duplicate binding") {
    auto d = parse_err(std::string(kBase) + "module M over S = rank(omega)\n");
    CHECK(d[0].line == 3);
    CHECK(d[0].message.find("already defined") != std::string::npos);
  }
  SUBCASE("reserved word as a name") {
    auto d = parse_err(std::string(kBase) + "set full = full(M, 1)\n");
    CHECK(d[0].message.find("reserved word") != std::string::npos);
  }
  SUBCASE("trailing input after a query") {
    auto d = parse_err(std::string(kBase) + "map f = identity(full(M, 1))\nk1 f extra\n");
    CHECK(d[0].line == 4);
    CHECK(d[0].message.find("unexpected trailing input") != std::string::npos);
  }
  SUBCASE("unexpected character") {
    auto d = parse_err("ring S = M(1; GF(5))\n");
    CHECK(d[0].message.find("unexpected character") != std::string::npos);
  }
  SUBCASE("unknown head word") {
    auto d = parse_err("frobnicate f\n");
    CHECK(d[0].message.find("expected a binding") != std::string::npos);
  }
  SUBCASE("row entry count") {
    auto d =
        parse_err(std::string(kBase) + "ppset P = point(vec(M, 1, at(0, 0, [1, 2])))\n");
    CHECK(d[0].message.find("expected 1 entries, got 2") != std::string::npos);
  }
  SUBCASE("coordinate index beyond a finite rank") {
    auto d = parse_err(
        "ring S = M(1, GF(3))\n"
        "module M over S = rank(2)\n"
        "ppset P = point(vec(M, 1, at(0, 5, [1])))\n");
    CHECK(d[0].message.find("coordinate index out of range") != std::string::npos);
  }
  SUBCASE("quaternion literal needs HQ") {
    auto d = parse_err(std::string(kBase) +
                       "ppset P = point(vec(M, 1, at(0, 0, [quat(1, 0, 0, 0)])))\n");
    CHECK(d[0].message.find("HQ plugin") != std::string::npos);
  }
  SUBCASE("empty block is rejected at parse time") {
    auto d = parse_err(std::string(kBase) +
                       "block B = block(point(zero(M, 1)), holes(point(zero(M, 1))))\n");
    CHECK(d[0].message.find("block is empty") != std::string::npos);
  }
  SUBCASE("set(...) blocks must be disjoint") {
    auto d = parse_err(std::string(kBase) +
                       "set D = set(block(full(M, 1)), block(full(M, 1)))\n");
    CHECK(d[0].message.find("pairwise disjoint") != std::string::npos);
  }
  SUBCASE("query kind mismatch") {
    auto d =
        parse_err(std::string(kBase) + "set D = full(M, 1)\nk1 D\n");
    CHECK(d[0].message.find("unknown map 'D'") != std::string::npos);
  }
  SUBCASE("engine errors are positioned at the expression") {
    // Ranks must have one entry per ring component; the engine refusal
    // surfaces as a diagnostic on the right-hand side.
    auto d = parse_err("ring S = M(1, GF(5))\nmodule M over S = rank(omega, omega)\n");
    CHECK(d[0].line == 2);
    CHECK(d[0].col == 19);
  }
  SUBCASE("several lines report independently") {
    auto d = parse_err("ring S = M(0\nmodule M over S = rank(omega)\nwhat is this\n");
    CHECK(d.size() == 3);
  }
}

TEST_CASE("parse-print-parse is a fixpoint") {
  SUBCASE("single component over GF(5)") {
    Session s = parse_ok(
        "ring S = M(1, GF(5))\n"
        "module M over S = rank(omega)\n"
        "ppset U = standard(M, 2, dims(1))\n"
        "ppset V = translate(U, vec(M, 2, at(0, 0, [0, 1])))\n"
        "ppset W = coset(span(M, 2, [[1, 0]]), zero(M, 2))\n"
        "block B = block(full(M, 2), holes(point(zero(M, 2)), W))\n"
        "set D = set(B)\n"
        "set E = union(D, of(W))\n"
        "set N = empty(M, 2)\n"
        "map f = identity(D)\n"
        "k0 D\n"
        "dim D\n"
        "check f\n"
        "k1 f\n"
        "expected-k1 M\n");
    std::string p1 = print_session(s);
    Session s2 = parse_ok(p1);
    std::string p2 = print_session(s2);
    CHECK(p1 == p2);
    CHECK(p1.find("ppset U = coset(span(M, 2, [[1, 0]]), zero(M, 2))") != std::string::npos);
    CHECK(p1.find("set N = empty(M, 2)") != std::string::npos);
    CHECK(p1.find("k1 f") != std::string::npos);
  }
  SUBCASE("product ring with rationals and an extension field") {
    Session s = parse_ok(
        "ring T = M(2, QQ) x M(1, GF(2, 2))\n"
        "module N over T = rank(omega, omega)\n"
        "ppset P = point(vec(N, 1, at(0, 0, [1/2, -3]), at(1, 2, [3])))\n"
        "set C = of(P)\n"
        "map g = identity(C)\n"
        "dim C\n");
    std::string p1 = print_session(s);
    Session s2 = parse_ok(p1);
    CHECK(p1 == print_session(s2));
    CHECK(p1.find("1/2, -3") != std::string::npos);
    CHECK(p1.find("at(1, 2, [3])") != std::string::npos);
  }
  SUBCASE("quaternion scalars") {
    Session s = parse_ok(
        "ring H = M(1, HQ)\n"
        "module Q over H = rank(omega)\n"
        "ppset Z = point(vec(Q, 1, at(0, 0, [quat(1, -2/3, 0, 4)])))\n"
        "set F = of(Z)\n");
    std::string p1 = print_session(s);
    Session s2 = parse_ok(p1);
    CHECK(p1 == print_session(s2));
    CHECK(p1.find("quat(1, -2/3, 0, 4)") != std::string::npos);
  }
  SUBCASE("maps with genuine pieces survive the round trip") {
    Session s = parse_ok(
        "ring S = M(1, GF(5))\n"
        "module M over S = rank(omega)\n"
        "map f = bijection(full(M, 1), full(M, 1), piece(block(full(M, 1)), "
        "zero(M, 1), smat(M, 1, [[2]]), vec(M, 1, at(0, 0, [1]))))\n");
    std::string p1 = print_session(s);
    Session s2 = parse_ok(p1);
    CHECK(p1 == print_session(s2));
    CHECK(validate(s2.maps.at("f")).empty());
  }
}

TEST_CASE("run_command computes the advertised outputs") {
  Session s = parse_ok(
      "ring S = M(1, GF(5))\n"
      "module M over S = rank(omega)\n"
      "set D2 = full(M, 2)\n"
      "set L = of(standard(M, 2, dims(1)))\n"
      "map f = identity(full(M, 1))\n"
      "map t = bijection(full(M, 2), full(M, 2), piece(block(full(M, 2)), "
      "zero(M, 2), id(M, 2), vec(M, 2, at(0, 0, [1, 0]))))\n"
      "map h = bijection(full(M, 1), full(M, 1), piece(block(point(zero(M, 1))), "
      "zero(M, 1), id(M, 1), zero(M, 1)))\n");

  SUBCASE("k0 on the full square is X^2") {
    CommandResult r = run_command({"k0", "D2"}, s);
    CHECK(r.text == "X^2");
    CHECK(r.exit == 0);
    json j = json::parse(r.json);
    CHECK(j["command"] == "k0");
    CHECK(j["set"] == "D2");
    CHECK(j["k"] == 1);
    CHECK(j["class"] == "X^2");
    REQUIRE(j["terms"].size() == 1);
    CHECK(j["terms"][0]["exps"] == json::array({2}));
    CHECK(j["terms"][0]["coeff"] == "1");
  }
  SUBCASE("k1 of the identity is the zero class") {
    CommandResult r = run_command({"k1", "f"}, s);
    CHECK(r.exit == 0);
    json j = json::parse(r.json);
    REQUIRE(j["components"].size() == 1);
    CHECK(j["components"][0]["sign0"] == 0);
    CHECK(j["components"][0]["levels"].empty());
  }
  SUBCASE("expected-k1 prints the frozen descriptor") {
    CommandResult r = run_command({"expected-k1", "M"}, s);
    CHECK(r.text == "Z2 + sum_i (C4 + Z2)");
    json j = json::parse(r.json);
    CHECK(j["descriptor"] == "Z2 + sum_i (C4 + Z2)");
  }
  SUBCASE("dim works on sets and maps") {
    CommandResult rs = run_command({"dim", "L"}, s);
    CHECK(rs.text == "1");
    json js = json::parse(rs.json);
    CHECK(js["bottom"] == false);
    CHECK(js["dims"] == json::array({1}));
    CommandResult rm = run_command({"dim", "f"}, s);  // identity moves nothing
    json jm = json::parse(rm.json);
    CHECK(jm["bottom"] == true);
  }
  SUBCASE("check reports a valid bijection with exit 0") {
    CommandResult r = run_command({"check", "t"}, s);
    CHECK(r.text == "ok");
    CHECK(r.exit == 0);
    CHECK(json::parse(r.json)["ok"] == true);
  }
  SUBCASE("check reports partition defects with exit 1") {
    CommandResult r = run_command({"check", "h"}, s);
    CHECK(r.exit == 1);
    json j = json::parse(r.json);
    CHECK(j["ok"] == false);
    CHECK(!j["violations"].empty());
    CHECK(r.text.find("invalid:") == 0);
  }
  SUBCASE("compose and invert print the engine rendering") {
    CommandResult r = run_command({"compose", "t", "t"}, s);
    CHECK(r.text == compose(s.maps.at("t"), s.maps.at("t")).str());
    CommandResult ri = run_command({"invert", "t"}, s);
    CHECK(ri.text == invert(s.maps.at("t")).str());
    CHECK(json::parse(ri.json)["pieces"] == 1);
  }
  SUBCASE("morita transports sets and maps") {
    CommandResult r = run_command({"morita", "L", "q=2"}, s);
    CHECK(r.text == morita_defset(s.sets.at("L"), 2).str());
    json j = json::parse(r.json);
    CHECK(j["q"] == 2);
    CommandResult rm = run_command({"morita", "t", "q=2"}, s);
    CHECK(rm.text == morita_map(s.maps.at("t"), 2).str());
  }
  SUBCASE("run executes every recorded query in order") {
    Session sq = parse_ok(
        "ring S = M(1, GF(5))\n"
        "module M over S = rank(omega)\n"
        "set D2 = full(M, 2)\n"
        "map f = identity(full(M, 1))\n"
        "k0 D2\n"
        "k1 f\n");
    CommandResult r = run_command({"run"}, sq);
    CHECK(r.exit == 0);
    json j = json::parse(r.json);
    REQUIRE(j["results"].size() == 2);
    CHECK(j["results"][0]["query"] == "k0 D2");
    CHECK(j["results"][1]["command"] == "k1");
    CHECK(r.text.find("# k0 D2\nX^2") != std::string::npos);
  }
  SUBCASE("unknown names and commands are usage errors") {
    CHECK_THROWS_WITH_AS(run_command({"k0", "nope"}, s),
                         doctest::Contains("unknown set"), EngineError);
    CHECK_THROWS_WITH_AS(run_command({"frobnicate"}, s),
                         doctest::Contains("unknown command"), EngineError);
    CHECK_THROWS_WITH_AS(run_command({"morita", "L", "2"}, s),
                         doctest::Contains("usage: morita"), EngineError);
    try {
      run_command({"k0", "nope"}, s);
      CHECK(false);
    } catch (const EngineError& e) {
      CHECK(e.code() == Err::ParseError);
    }
  }
}

TEST_CASE("oracle finite and selftest run through the dispatcher") {
  Session empty;
  SUBCASE("brute-force chain over GF(3)") {
    CommandResult r = run_command(
        {"oracle", "finite", "--field", "GF(3)", "--rank", "1", "--max-power", "1"},
        empty);
    CHECK(r.exit == 0);
    CHECK(r.text.find("stabilized at Z2") != std::string::npos);
    json j = json::parse(r.json);
    CHECK(j["stabilized"] == true);
    CHECK(j["value"] == "Z2");
    REQUIRE(j["stages"].size() == 2);
    CHECK(j["stages"][1]["set_size"] == 3);
    CHECK(j["stages"][1]["group_order"] == 6);
    CHECK(j["stages"][1]["commutator_order"] == 3);
  }
  SUBCASE("an infinite carrier is refused") {
    CHECK_THROWS_WITH_AS(
        run_command({"oracle", "finite", "--field", "QQ", "--rank", "1",
                     "--max-power", "1"},
                    empty),
        doctest::Contains("finite module"), EngineError);
  }
  SUBCASE("selftest passes and reports its checks") {
    CommandResult r = run_command({"selftest"}, empty);
    CHECK(r.exit == 0);
    CHECK(r.text == "selftest: 7/7 checks passed");
    json j = json::parse(r.json);
    CHECK(j["ok"] == true);
    CHECK(j["checks"].size() == 7);
  }
}

TEST_CASE("json output is byte-stable across runs") {
  Session s = parse_ok(std::string(kBase) + "set D2 = full(M, 2)\n");
  CommandResult a = run_command({"k0", "D2"}, s);
  CommandResult b = run_command({"k0", "D2"}, s);
  CHECK(a.json == b.json);
}
