#pragma once

#include <optional>

#include "defk/oracle.hpp"

namespace defk {

struct Diagnostic {
  int line = 0;  // 1-based
  int col = 0;   // 1-based
  std::string message;
  std::string str() const;  // "line L, column C: message"
};

// Named bindings of a session script, immutable once defined, plus the
// query lines in order of appearance.
struct Session {
  std::vector<std::pair<std::string, std::string>> order;  // (kind, name)
  std::map<std::string, RingPtr> rings;
  std::map<std::string, ModulePtr> modules;
  std::map<std::string, PPSet> ppsets;
  std::map<std::string, Block> blocks;
  std::map<std::string, DefinableSet> sets;
  std::map<std::string, PiecewiseAffineBijection> maps;
  std::vector<std::string> queries;  // e.g. "k1 f"
};

// Line-oriented script. '#' starts a comment. Binding lines:
//   ring S = M(1, GF(5)) x M(2, QQ)
//   module M over S = rank(omega, 2)
//   ppset U = full(M, 2) | point(VEC) | standard(M, 2, dims(1, 0))
//           | coset(span(M, 2, MAT, MAT), VEC) | translate(PPSET, VEC)
//   block B = block(PPSET) | block(PPSET, holes(PPSET, ...))
//   set D = full(M, 2) | empty(M, 2) | of(PPSET)
//         | set(BLOCK, ...)                               # pairwise disjoint
//         | union(D, D) | minus(D, D) | intersect(D, D) | product(D, D)
//   map f = bijection(SET, SET, piece(BLOCK, VEC, SMAT, VEC), ...)
//         | identity(SET) | compose(MAP, MAP) | invert(MAP)
//         | extend(MAP, SET) | embed(MAP, n)
// with VEC = zero(M, n) | vec(M, n, at(comp, idx, [SCALAR, ...]), ...),
// SMAT = id(M, n) | smat(M, n, MAT, ...) (one flat per ring component),
// MAT = [[SCALAR, ...], ...] | [] (no rows), and SCALAR = integer |
// integer/integer | quat(r, r, r, r). Query lines: check/k1 MAP, k0 SET,
// dim SET-or-MAP, expected-k1 MODULE. Names may stand anywhere an
// expression of their kind is expected.
struct ParseResult {
  std::optional<Session> session;  // engaged iff diagnostics is empty
  std::vector<Diagnostic> diagnostics;
};
ParseResult parse_dsl(const std::string& text);

// Canonical script for the session; parsing it back reproduces the same
// bindings, and printing those is byte-identical.
std::string print_session(const Session& s);

struct CommandResult {
  std::string text;  // human-readable
  std::string json;  // one JSON object, schema in docs/cli.md
  int exit = 0;      // 0 ok; 1 when the command itself reports a failure
};

// One command against a session: {"check", f}, {"k0", D}, {"dim", name},
// {"k1", f}, {"compose", f, g}, {"invert", f}, {"morita", name, "q=2"},
// {"expected-k1", M}, {"oracle", "finite", "--field", "GF(3)", "--rank",
// "1", "--max-power", "1"}, {"selftest"}. Unknown commands, malformed
// arguments, and unresolved names raise ParseError; engine failures pass
// through with their own codes.
CommandResult run_command(const std::vector<std::string>& args, const Session& s);

}  // namespace defk
