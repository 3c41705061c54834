#include "defk/session.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "defk/defmap.hpp"
#include "defk/defset.hpp"
#include "defk/error.hpp"
#include "defk/k1.hpp"
#include "defk/module.hpp"
#include "defk/oracle.hpp"
#include "defk/ppset.hpp"
#include "defk/ring.hpp"
#include "defk/scalar.hpp"

namespace defk {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Lexer. One line at a time; '#' starts a comment. Tokens carry a 1-based
// column so every later complaint can point at its cause.

struct Tok {
  enum class K { Ident, Num, Punct, End };
  K k = K::End;
  std::string s;      // Ident spelling or Punct character
  long long num = 0;  // Num value
  int col = 0;
};

struct LineError {
  int col = 0;
  std::string message;
};

[[noreturn]] void bad(int col, std::string msg) { throw LineError{col, std::move(msg)}; }

bool is_word_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Tok> lex_line(const std::string& text) {
  static const std::string punct = "()[],=/";
  std::vector<Tok> out;
  size_t i = 0;
  while (i < text.size()) {
    char ch = text[i];
    int col = static_cast<int>(i) + 1;
    if (ch == '#') break;
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (punct.find(ch) != std::string::npos) {
      out.push_back({Tok::K::Punct, std::string(1, ch), 0, col});
      ++i;
      continue;
    }
    bool neg = ch == '-' && i + 1 < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(ch)) || neg) {
      size_t j = i + (neg ? 1 : 0);
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      long long v = 0;
      try {
        v = std::stoll(text.substr(i, j - i));
      } catch (const std::out_of_range&) {
        bad(col, "number out of range");
      }
      out.push_back({Tok::K::Num, "", v, col});
      i = j;
      continue;
    }
    if (is_word_start(ch)) {
      size_t j = i;
      while (j < text.size()) {
        if (is_word_char(text[j])) {
          ++j;
        } else if (text[j] == '-' && j + 1 < text.size() && is_word_start(text[j + 1])) {
          j += 2;  // hyphenated word such as expected-k1
        } else {
          break;
        }
      }
      out.push_back({Tok::K::Ident, text.substr(i, j - i), 0, col});
      i = j;
      continue;
    }
    bad(col, std::string("unexpected character '") + ch + "'");
  }
  out.push_back({Tok::K::End, "", 0, static_cast<int>(text.size()) + 1});
  return out;
}

struct Cursor {
  const std::vector<Tok>* toks = nullptr;
  size_t pos = 0;

  const Tok& peek() const { return (*toks)[pos]; }
  const Tok& peek2() const {
    return pos + 1 < toks->size() ? (*toks)[pos + 1] : toks->back();
  }
  Tok next() {
    const Tok& t = (*toks)[pos];
    if (t.k != Tok::K::End) ++pos;
    return t;
  }

  bool at_punct(const char* p) const {
    return peek().k == Tok::K::Punct && peek().s == p;
  }
  bool at_ident(const char* w) const {
    return peek().k == Tok::K::Ident && peek().s == w;
  }
  bool at_call() const {  // identifier applied like a function
    return peek().k == Tok::K::Ident && peek2().k == Tok::K::Punct && peek2().s == "(";
  }

  void expect_punct(const char* p) {
    if (!at_punct(p)) bad(peek().col, std::string("expected '") + p + "'");
    next();
  }
  void expect_ident(const char* w) {
    if (!at_ident(w)) bad(peek().col, std::string("expected '") + w + "'");
    next();
  }
  std::string expect_name(const char* what) {
    if (peek().k != Tok::K::Ident) bad(peek().col, std::string("expected ") + what);
    return next().s;
  }
  long long expect_num(const char* what) {
    if (peek().k != Tok::K::Num) bad(peek().col, std::string("expected ") + what);
    return next().num;
  }
  void expect_end() {
    if (peek().k != Tok::K::End) bad(peek().col, "unexpected trailing input");
  }
};

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "ring",     "module",    "ppset",     "block",   "set",       "map",
      "over",     "check",     "k0",        "dim",     "k1",        "expected-k1",
      "compose",  "invert",    "morita",    "full",    "empty",     "point",
      "standard", "coset",     "span",      "translate", "zero",    "vec",
      "at",       "id",        "smat",      "quat",    "holes",     "of",
      "union",    "minus",     "intersect", "product", "bijection", "piece",
      "identity", "extend",    "embed",     "rank",    "omega",     "dims",
      "selftest", "oracle",    "finite",    "run"};
  return words;
}

// ---------------------------------------------------------------------------
// Parser. Bindings are immutable and must be defined before use; every
// engine error raised while evaluating a right-hand side is positioned at
// the start of that expression.

struct Parser {
  Session s;
  std::vector<Diagnostic> diags;
  std::set<std::string> names;

  // ---- references ---------------------------------------------------------

  RingPtr ring_ref(Cursor& c) {
    int col = c.peek().col;
    std::string name = c.expect_name("a ring name");
    auto it = s.rings.find(name);
    if (it == s.rings.end()) bad(col, "unknown ring '" + name + "'");
    return it->second;
  }

  ModulePtr module_ref(Cursor& c) {
    int col = c.peek().col;
    std::string name = c.expect_name("a module name");
    auto it = s.modules.find(name);
    if (it == s.modules.end()) bad(col, "unknown module '" + name + "'");
    return it->second;
  }

  // ---- scalars and matrices -----------------------------------------------

  static mpq_class parse_rat(Cursor& c) {
    int col = c.peek().col;
    long long a = c.expect_num("a number");
    if (!c.at_punct("/")) return mpq_class(static_cast<long>(a));
    c.next();
    long long b = c.expect_num("a denominator");
    if (b == 0) bad(col, "zero denominator");
    mpq_class q(static_cast<long>(a), static_cast<long>(b));
    q.canonicalize();
    return q;
  }

  static Scalar parse_scalar(Cursor& c, const DivisionRing* div) {
    int col = c.peek().col;
    if (c.at_ident("quat")) {
      if (div->kind != DivisionRing::Kind::Quaternions)
        bad(col, "quat(...) literals need the HQ plugin");
      c.next();
      c.expect_punct("(");
      mpq_class q[4];
      for (int i = 0; i < 4; ++i) {
        if (i) c.expect_punct(",");
        q[i] = parse_rat(c);
      }
      c.expect_punct(")");
      return Scalar::quat(q[0], q[1], q[2], q[3]);
    }
    switch (div->kind) {
      case DivisionRing::Kind::Finite: {
        long long v = c.expect_num("a scalar");
        // In-range values are encoding values (exact round-trip, extension
        // fields included); anything else reduces as an integer.
        if (v >= 0 && v < div->cardinality()) return Scalar::ff(div, v);
        return Scalar::from_int(div, v);
      }
      case DivisionRing::Kind::Rationals:
        return Scalar::rat(parse_rat(c));
      case DivisionRing::Kind::Quaternions: {
        long long v = c.expect_num("a scalar");
        return Scalar::from_int(div, v);
      }
    }
    bad(col, "unknown scalar plugin");
  }

  // One bracketed row, exactly `want` entries when want >= 0.
  static std::vector<Scalar> parse_row(Cursor& c, const DivisionRing* div, int want) {
    int col = c.peek().col;
    c.expect_punct("[");
    std::vector<Scalar> out;
    if (!c.at_punct("]")) {
      while (true) {
        out.push_back(parse_scalar(c, div));
        if (!c.at_punct(",")) break;
        c.next();
      }
    }
    c.expect_punct("]");
    if (want >= 0 && static_cast<int>(out.size()) != want)
      bad(col, "expected " + std::to_string(want) + " entries, got " +
                   std::to_string(out.size()));
    return out;
  }

  // Bracketed list of rows; "[]" is the matrix with no rows.
  static Mat parse_mat(Cursor& c, const DivisionRing* div, int cols) {
    c.expect_punct("[");
    if (c.at_punct("]")) {
      c.next();
      return Mat::zero(div, 0, cols);
    }
    std::vector<std::vector<Scalar>> rows;
    while (true) {
      rows.push_back(parse_row(c, div, cols));
      if (!c.at_punct(",")) break;
      c.next();
    }
    c.expect_punct("]");
    Mat m = Mat::zero(div, static_cast<int>(rows.size()), cols);
    for (int i = 0; i < m.rows; ++i)
      for (int j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
    return m;
  }

  // ---- vectors and scalar matrices ----------------------------------------

  // "M, n" prefix shared by several heads.
  std::pair<ModulePtr, int> parse_mod_power(Cursor& c) {
    ModulePtr m = module_ref(c);
    c.expect_punct(",");
    int n = static_cast<int>(c.expect_num("a power"));
    return {m, n};
  }

  Vector parse_vec(Cursor& c) {
    int col = c.peek().col;
    if (c.at_ident("zero")) {
      c.next();
      c.expect_punct("(");
      auto [m, n] = parse_mod_power(c);
      c.expect_punct(")");
      return Vector::zero(m, n);
    }
    if (!c.at_ident("vec"))
      bad(col, "expected a vector: zero(M, n) or vec(M, n, at(comp, idx, [..]), ...)");
    c.next();
    c.expect_punct("(");
    auto [m, n] = parse_mod_power(c);
    Vector v = Vector::zero(m, n);
    const RingPtr& ring = m->ring();
    while (c.at_punct(",")) {
      c.next();
      c.expect_ident("at");
      c.expect_punct("(");
      int ccol = c.peek().col;
      int comp = static_cast<int>(c.expect_num("a component index"));
      if (comp < 0 || comp >= ring->k())
        bad(ccol, "component index out of range");
      c.expect_punct(",");
      int icol = c.peek().col;
      long idx = static_cast<long>(c.expect_num("a coordinate index"));
      if (idx < 0 || (m->rank(comp) != kOmega && idx >= m->rank(comp)))
        bad(icol, "coordinate index out of range for the module rank");
      c.expect_punct(",");
      const RingComponent& rc = ring->comp(comp);
      std::vector<Scalar> row = parse_row(c, rc.div, n * rc.q);
      c.expect_punct(")");
      Mat slice = Mat::zero(rc.div, 1, n * rc.q);
      for (int j = 0; j < n * rc.q; ++j) slice.at(0, j) = row[j];
      v.set_slice(comp, idx, slice);
    }
    c.expect_punct(")");
    return v;
  }

  SMat parse_smat(Cursor& c) {
    int col = c.peek().col;
    if (c.at_ident("id")) {
      c.next();
      c.expect_punct("(");
      auto [m, n] = parse_mod_power(c);
      c.expect_punct(")");
      return SMat::identity(m->ring(), n);
    }
    if (!c.at_ident("smat"))
      bad(col, "expected a scalar matrix: id(M, n) or smat(M, n, FLAT, ...)");
    c.next();
    c.expect_punct("(");
    auto [m, n] = parse_mod_power(c);
    const RingPtr& ring = m->ring();
    std::vector<Mat> comps;
    for (int i = 0; i < ring->k(); ++i) {
      c.expect_punct(",");
      int mcol = c.peek().col;
      const RingComponent& rc = ring->comp(i);
      Mat flat = parse_mat(c, rc.div, n * rc.q);
      if (flat.rows != n * rc.q)
        bad(mcol, "component " + std::to_string(i) + " flat must be " +
                      std::to_string(n * rc.q) + " x " + std::to_string(n * rc.q));
      comps.push_back(std::move(flat));
    }
    c.expect_punct(")");
    return SMat{ring, n, n, std::move(comps)};
  }

  // ---- pp-sets, blocks, sets, maps -----------------------------------------

  PPSet parse_ppset(Cursor& c) {
    int col = c.peek().col;
    if (c.peek().k != Tok::K::Ident) bad(col, "expected a pp-set expression");
    if (!c.at_call()) {
      std::string name = c.next().s;
      auto it = s.ppsets.find(name);
      if (it == s.ppsets.end()) bad(col, "unknown ppset '" + name + "'");
      return it->second;
    }
    std::string head = c.peek().s;
    if (head == "full") {
      c.next();
      c.expect_punct("(");
      auto [m, n] = parse_mod_power(c);
      c.expect_punct(")");
      return PPSet::full(m, n);
    }
    if (head == "point") {
      c.next();
      c.expect_punct("(");
      Vector v = parse_vec(c);
      c.expect_punct(")");
      return PPSet::point(v);
    }
    if (head == "standard") {
      c.next();
      c.expect_punct("(");
      auto [m, n] = parse_mod_power(c);
      c.expect_punct(",");
      c.expect_ident("dims");
      c.expect_punct("(");
      std::vector<long> dims;
      while (true) {
        dims.push_back(static_cast<long>(c.expect_num("a dimension")));
        if (!c.at_punct(",")) break;
        c.next();
      }
      c.expect_punct(")");
      c.expect_punct(")");
      return PPSet::standard(m, n, dims);
    }
    if (head == "coset") {
      c.next();
      c.expect_punct("(");
      c.expect_ident("span");
      c.expect_punct("(");
      auto [m, n] = parse_mod_power(c);
      const RingPtr& ring = m->ring();
      std::vector<Mat> gens;
      for (int i = 0; i < ring->k(); ++i) {
        c.expect_punct(",");
        const RingComponent& rc = ring->comp(i);
        gens.push_back(parse_mat(c, rc.div, n * rc.q));
      }
      c.expect_punct(")");
      c.expect_punct(",");
      Vector rep = parse_vec(c);
      c.expect_punct(")");
      return PPSet::coset(PPSubgroup::span(m, n, std::move(gens)), rep);
    }
    if (head == "translate") {
      c.next();
      c.expect_punct("(");
      PPSet p = parse_ppset(c);
      c.expect_punct(",");
      Vector t = parse_vec(c);
      c.expect_punct(")");
      return p.translate(t);
    }
    bad(col, "unknown pp-set expression '" + head + "'");
  }

  Block parse_block(Cursor& c) {
    int col = c.peek().col;
    if (c.peek().k == Tok::K::Ident && !c.at_call()) {
      std::string name = c.next().s;
      auto it = s.blocks.find(name);
      if (it == s.blocks.end()) bad(col, "unknown block '" + name + "'");
      return it->second;
    }
    c.expect_ident("block");
    c.expect_punct("(");
    PPSet ambient = parse_ppset(c);
    std::vector<PPSet> holes;
    if (c.at_punct(",")) {
      c.next();
      c.expect_ident("holes");
      c.expect_punct("(");
      while (true) {
        holes.push_back(parse_ppset(c));
        if (!c.at_punct(",")) break;
        c.next();
      }
      c.expect_punct(")");
    }
    c.expect_punct(")");
    std::optional<Block> b = make_block(ambient, std::move(holes));
    if (!b) bad(col, "the block is empty");
    return *b;
  }

  DefinableSet parse_set(Cursor& c) {
    int col = c.peek().col;
    if (c.peek().k != Tok::K::Ident) bad(col, "expected a set expression");
    if (!c.at_call()) {
      std::string name = c.next().s;
      auto it = s.sets.find(name);
      if (it == s.sets.end()) bad(col, "unknown set '" + name + "'");
      return it->second;
    }
    std::string head = c.peek().s;
    if (head == "full" || head == "empty") {
      c.next();
      c.expect_punct("(");
      auto [m, n] = parse_mod_power(c);
      c.expect_punct(")");
      return head == "full" ? DefinableSet::full(m, n) : DefinableSet::empty_set(m, n);
    }
    if (head == "of") {
      c.next();
      c.expect_punct("(");
      PPSet p = parse_ppset(c);
      c.expect_punct(")");
      return DefinableSet::of_ppset(p);
    }
    if (head == "set") {
      c.next();
      c.expect_punct("(");
      std::vector<Block> blocks;
      while (true) {
        int bcol = c.peek().col;
        Block b = parse_block(c);
        if (!blocks.empty()) {
          if (b.ambient.mod.get() != blocks.front().ambient.mod.get() ||
              b.ambient.n != blocks.front().ambient.n)
            bad(bcol, "all blocks in set(...) must live in one ambient power");
          for (const Block& prev : blocks)
            if (block_intersect(prev, b))
              bad(bcol, "blocks in set(...) must be pairwise disjoint; use union(...)");
        }
        blocks.push_back(std::move(b));
        if (!c.at_punct(",")) break;
        c.next();
      }
      c.expect_punct(")");
      ModulePtr m = blocks.front().ambient.mod;
      int n = blocks.front().ambient.n;
      return DefinableSet{m, n, std::move(blocks)};
    }
    if (head == "union" || head == "minus" || head == "intersect" || head == "product") {
      c.next();
      c.expect_punct("(");
      DefinableSet a = parse_set(c);
      c.expect_punct(",");
      DefinableSet b = parse_set(c);
      c.expect_punct(")");
      if (head == "union") return ds_union(a, b);
      if (head == "minus") return ds_minus(a, b);
      if (head == "intersect") return ds_intersect(a, b);
      return ds_product(a, b);
    }
    bad(col, "unknown set expression '" + head + "'");
  }

  PiecewiseAffineBijection parse_map(Cursor& c) {
    int col = c.peek().col;
    if (c.peek().k != Tok::K::Ident) bad(col, "expected a map expression");
    if (!c.at_call()) {
      std::string name = c.next().s;
      auto it = s.maps.find(name);
      if (it == s.maps.end()) bad(col, "unknown map '" + name + "'");
      return it->second;
    }
    std::string head = c.peek().s;
    if (head == "identity") {
      c.next();
      c.expect_punct("(");
      DefinableSet d = parse_set(c);
      c.expect_punct(")");
      return identity_map(d);
    }
    if (head == "bijection") {
      c.next();
      c.expect_punct("(");
      DefinableSet src = parse_set(c);
      c.expect_punct(",");
      DefinableSet tgt = parse_set(c);
      std::vector<AffinePiece> pieces;
      while (c.at_punct(",")) {
        c.next();
        c.expect_ident("piece");
        c.expect_punct("(");
        Block dom = parse_block(c);
        c.expect_punct(",");
        Vector d1 = parse_vec(c);
        c.expect_punct(",");
        SMat a = parse_smat(c);
        c.expect_punct(",");
        Vector d2 = parse_vec(c);
        c.expect_punct(")");
        pieces.push_back(make_piece(dom, d1, a, d2));
      }
      c.expect_punct(")");
      return make_bijection(std::move(src), std::move(tgt), std::move(pieces));
    }
    if (head == "compose") {
      c.next();
      c.expect_punct("(");
      PiecewiseAffineBijection f = parse_map(c);
      c.expect_punct(",");
      PiecewiseAffineBijection g = parse_map(c);
      c.expect_punct(")");
      return compose(f, g);
    }
    if (head == "invert") {
      c.next();
      c.expect_punct("(");
      PiecewiseAffineBijection f = parse_map(c);
      c.expect_punct(")");
      return invert(f);
    }
    if (head == "extend") {
      c.next();
      c.expect_punct("(");
      PiecewiseAffineBijection f = parse_map(c);
      c.expect_punct(",");
      DefinableSet d = parse_set(c);
      c.expect_punct(")");
      return extend_by_identity(f, d);
    }
    if (head == "embed") {
      c.next();
      c.expect_punct("(");
      PiecewiseAffineBijection f = parse_map(c);
      c.expect_punct(",");
      int n2 = static_cast<int>(c.expect_num("a power"));
      c.expect_punct(")");
      return embed_map(f, n2);
    }
    bad(col, "unknown map expression '" + head + "'");
  }

  // ---- lines ---------------------------------------------------------------

  void parse_binding(Cursor& c, const std::string& kind) {
    c.next();  // the kind keyword
    int ncol = c.peek().col;
    std::string name = c.expect_name("a binding name");
    if (reserved_words().count(name)) bad(ncol, "'" + name + "' is a reserved word");
    if (names.count(name)) bad(ncol, "'" + name + "' is already defined");
    RingPtr over;
    if (kind == "module") {
      c.expect_ident("over");
      over = ring_ref(c);
    }
    c.expect_punct("=");
    int rcol = c.peek().col;
    try {
      if (kind == "ring") {
        std::vector<RingComponent> comps;
        while (true) {
          c.expect_ident("M");
          c.expect_punct("(");
          int q = static_cast<int>(c.expect_num("a matrix size"));
          c.expect_punct(",");
          const DivisionRing* div = parse_div(c);
          c.expect_punct(")");
          comps.push_back(RingComponent{q, div});
          if (!c.at_ident("x")) break;
          c.next();
        }
        c.expect_end();
        s.rings.emplace(name, RingDescriptor::make(std::move(comps)));
      } else if (kind == "module") {
        c.expect_ident("rank");
        c.expect_punct("(");
        std::vector<long> ranks;
        while (true) {
          if (c.at_ident("omega")) {
            c.next();
            ranks.push_back(kOmega);
          } else {
            ranks.push_back(static_cast<long>(c.expect_num("a rank or omega")));
          }
          if (!c.at_punct(",")) break;
          c.next();
        }
        c.expect_punct(")");
        c.expect_end();
        s.modules.emplace(name, ModuleDescriptor::make(over, std::move(ranks)));
      } else if (kind == "ppset") {
        PPSet p = parse_ppset(c);
        c.expect_end();
        s.ppsets.emplace(name, std::move(p));
      } else if (kind == "block") {
        Block b = parse_block(c);
        c.expect_end();
        s.blocks.emplace(name, std::move(b));
      } else if (kind == "set") {
        DefinableSet d = parse_set(c);
        c.expect_end();
        s.sets.emplace(name, std::move(d));
      } else {  // map
        PiecewiseAffineBijection f = parse_map(c);
        c.expect_end();
        s.maps.emplace(name, std::move(f));
      }
    } catch (const EngineError& e) {
      bad(rcol, e.what());
    }
    names.insert(name);
    s.order.emplace_back(kind, name);
  }

  static const DivisionRing* parse_div(Cursor& c) {
    int col = c.peek().col;
    std::string w = c.expect_name("a scalar plugin (QQ, HQ, or GF)");
    if (w == "QQ") return rationals();
    if (w == "HQ") return quaternions();
    if (w == "GF") {
      c.expect_punct("(");
      long long p = c.expect_num("a prime");
      long long e = 1;
      if (c.at_punct(",")) {
        c.next();
        e = c.expect_num("an exponent");
      }
      c.expect_punct(")");
      return finite_field(p, static_cast<int>(e));
    }
    bad(col, "unknown scalar plugin '" + w + "' (QQ, HQ, GF(p), GF(p, e))");
  }

  void parse_query(Cursor& c, const std::string& kw) {
    c.next();
    int ncol = c.peek().col;
    std::string name = c.expect_name("a bound name");
    c.expect_end();
    bool ok = false;
    if (kw == "check" || kw == "k1") {
      ok = s.maps.count(name) > 0;
      if (!ok) bad(ncol, "unknown map '" + name + "'");
    } else if (kw == "k0") {
      ok = s.sets.count(name) > 0;
      if (!ok) bad(ncol, "unknown set '" + name + "'");
    } else if (kw == "dim") {
      ok = s.sets.count(name) > 0 || s.maps.count(name) > 0;
      if (!ok) bad(ncol, "unknown set or map '" + name + "'");
    } else {  // expected-k1
      ok = s.modules.count(name) > 0;
      if (!ok) bad(ncol, "unknown module '" + name + "'");
    }
    s.queries.push_back(kw + " " + name);
  }

  void parse_line(const std::string& raw, int lineno) {
    try {
      std::vector<Tok> toks = lex_line(raw);
      Cursor c{&toks, 0};
      if (c.peek().k == Tok::K::End) return;
      const Tok& head = c.peek();
      if (head.k != Tok::K::Ident)
        bad(head.col, "expected a binding or a query");
      const std::string& kw = head.s;
      if (kw == "ring" || kw == "module" || kw == "ppset" || kw == "block" ||
          kw == "set" || kw == "map") {
        parse_binding(c, kw);
      } else if (kw == "check" || kw == "k0" || kw == "dim" || kw == "k1" ||
                 kw == "expected-k1") {
        parse_query(c, kw);
      } else {
        bad(head.col,
            "expected a binding (ring/module/ppset/block/set/map) or a query "
            "(check/k0/dim/k1/expected-k1)");
      }
    } catch (const LineError& e) {
      diags.push_back(Diagnostic{lineno, e.col, e.message});
    }
  }
};

// ---------------------------------------------------------------------------
// Canonical printer. Expressions mention modules and rings only through
// their binding names, so reprinting resolves descriptors by identity.

struct Printer {
  const Session* s;
  std::map<const RingDescriptor*, std::string> ring_names;
  std::map<const ModuleDescriptor*, std::string> mod_names;

  explicit Printer(const Session& sess) : s(&sess) {
    for (const auto& [name, r] : sess.rings) ring_names.emplace(r.get(), name);
    for (const auto& [name, m] : sess.modules) mod_names.emplace(m.get(), name);
  }

  std::string ring_ref(const RingPtr& r) const {
    auto it = ring_names.find(r.get());
    if (it == ring_names.end())
      fail(Err::PreconditionFailed, "printing needs every ring bound to a name");
    return it->second;
  }
  std::string mod_ref(const ModulePtr& m) const {
    auto it = mod_names.find(m.get());
    if (it == mod_names.end())
      fail(Err::PreconditionFailed, "printing needs every module bound to a name");
    return it->second;
  }

  static std::string scalar_str(const Scalar& x) {
    switch (x.ring()->kind) {
      case DivisionRing::Kind::Finite:
        return std::to_string(x.encode());
      case DivisionRing::Kind::Rationals:
        return x.rational().get_str();
      case DivisionRing::Kind::Quaternions:
        return "quat" + x.str();  // str() prints "(a, b, c, d)"
    }
    return x.str();
  }

  static std::string row_str(const Mat& m, int i) {
    std::string out = "[";
    for (int j = 0; j < m.cols; ++j) {
      if (j) out += ", ";
      out += scalar_str(m.at(i, j));
    }
    return out + "]";
  }

  static std::string mat_str(const Mat& m) {
    if (m.rows == 0) return "[]";
    std::string out = "[";
    for (int i = 0; i < m.rows; ++i) {
      if (i) out += ", ";
      out += row_str(m, i);
    }
    return out + "]";
  }

  std::string vec_str(const Vector& v) const {
    std::set<std::pair<int, long>> keys;
    for (const ModuleElement& e : v.entries)
      for (int comp = 0; comp < static_cast<int>(e.comps.size()); ++comp)
        for (const auto& [idx, row] : e.comps[comp]) {
          (void)row;
          keys.emplace(comp, idx);
        }
    std::string head = mod_ref(v.mod) + ", " + std::to_string(v.n);
    std::string out;
    for (const auto& [comp, idx] : keys) {
      Mat slice = v.slice(comp, idx);
      if (slice.is_zero()) continue;
      out += ", at(" + std::to_string(comp) + ", " + std::to_string(idx) + ", " +
             row_str(slice, 0) + ")";
    }
    if (out.empty()) return "zero(" + head + ")";
    return "vec(" + head + out + ")";
  }

  std::string smat_str(const SMat& a, const ModulePtr& m) const {
    std::string out = "smat(" + mod_ref(m) + ", " + std::to_string(a.rows);
    for (const Mat& piece : a.flat) out += ", " + mat_str(piece);
    return out + ")";
  }

  std::string pp_str(const PPSet& p) const {
    if (p.empty)
      fail(Err::PreconditionFailed, "cannot print an empty pp-set");
    std::string head = mod_ref(p.mod) + ", " + std::to_string(p.n);
    bool rep_zero = p.rep.cmp(Vector::zero(p.mod, p.n)) == 0;
    if (rep_zero && p.sub == PPSubgroup::full(p.mod, p.n)) return "full(" + head + ")";
    Colour col = p.sub.colour();
    if (std::all_of(col.dims.begin(), col.dims.end(), [](long d) { return d == 0; }))
      return "point(" + vec_str(p.rep) + ")";
    std::string out = "coset(span(" + head;
    for (const Mat& b : p.sub.basis) out += ", " + mat_str(b);
    return out + "), " + vec_str(p.rep) + ")";
  }

  std::string block_str(const Block& b) const {
    std::string out = "block(" + pp_str(b.ambient);
    if (!b.holes.empty()) {
      out += ", holes(";
      for (size_t i = 0; i < b.holes.size(); ++i) {
        if (i) out += ", ";
        out += pp_str(b.holes[i]);
      }
      out += ")";
    }
    return out + ")";
  }

  std::string set_str(const DefinableSet& d) const {
    std::string head = mod_ref(d.mod) + ", " + std::to_string(d.n);
    if (d.blocks.empty()) return "empty(" + head + ")";
    if (d.blocks.size() == 1 && d.blocks[0].holes.empty()) {
      const PPSet& amb = d.blocks[0].ambient;
      bool rep_zero = amb.rep.cmp(Vector::zero(d.mod, d.n)) == 0;
      if (rep_zero && amb.sub == PPSubgroup::full(d.mod, d.n)) return "full(" + head + ")";
      return "of(" + pp_str(amb) + ")";
    }
    std::string out = "set(";
    for (size_t i = 0; i < d.blocks.size(); ++i) {
      if (i) out += ", ";
      out += block_str(d.blocks[i]);
    }
    return out + ")";
  }

  std::string map_str(const PiecewiseAffineBijection& f) const {
    std::string out = "bijection(" + set_str(f.source) + ", " + set_str(f.target);
    for (const AffinePiece& p : f.pieces) {
      out += ", piece(" + block_str(p.dom) + ", " + vec_str(p.d1) + ", " +
             smat_str(p.a, f.source.mod) + ", " + vec_str(p.d2) + ")";
    }
    return out + ")";
  }
};

// ---------------------------------------------------------------------------
// Command helpers.

const PiecewiseAffineBijection& want_map(const Session& s, const std::string& n) {
  auto it = s.maps.find(n);
  if (it == s.maps.end()) fail(Err::ParseError, "unknown map '" + n + "'");
  return it->second;
}
const DefinableSet& want_set(const Session& s, const std::string& n) {
  auto it = s.sets.find(n);
  if (it == s.sets.end()) fail(Err::ParseError, "unknown set '" + n + "'");
  return it->second;
}
const ModulePtr& want_module(const Session& s, const std::string& n) {
  auto it = s.modules.find(n);
  if (it == s.modules.end()) fail(Err::ParseError, "unknown module '" + n + "'");
  return it->second;
}

long long parse_int_arg(const std::string& text, const char* what) {
  try {
    size_t used = 0;
    long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(Err::ParseError, std::string("expected an integer for ") + what + ", got '" +
                              text + "'");
  }
}

json k1_json(const K1Class& c) {
  json comps = json::array();
  for (const K1Component& comp : c.comps) {
    json levels = json::array();
    for (const auto& [lvl, row] : comp.levels)
      levels.push_back({{"level", lvl}, {"det", row.det.str()}, {"sign", row.sign}});
    comps.push_back({{"sign0", comp.sign0}, {"levels", levels}});
  }
  return comps;
}

json k0_json(const K0Class& c) {
  json terms = json::array();
  for (const auto& [exps, coeff] : c.terms)
    terms.push_back({{"exps", exps}, {"coeff", coeff.get_str()}});
  return terms;
}

json colour_json(const Colour& c) {
  return json{{"bottom", c.bottom}, {"dims", c.dims}};
}

CommandResult finish(json j, std::string text, int exit_code = 0) {
  CommandResult r;
  r.text = std::move(text);
  r.json = j.dump(2);
  r.exit = exit_code;
  return r;
}

CommandResult cmd_oracle_finite(const std::vector<std::string>& args) {
  std::string field;
  long rank = 1;
  int max_power = 1;
  if ((args.size() - 2) % 2 != 0)
    fail(Err::ParseError, "usage: oracle finite --field GF(p) [--rank n] [--max-power m]");
  for (size_t i = 2; i + 1 < args.size(); i += 2) {
    if (args[i] == "--field")
      field = args[i + 1];
    else if (args[i] == "--rank")
      rank = static_cast<long>(parse_int_arg(args[i + 1], "--rank"));
    else if (args[i] == "--max-power")
      max_power = static_cast<int>(parse_int_arg(args[i + 1], "--max-power"));
    else
      fail(Err::ParseError, "unknown option '" + args[i] + "'");
  }
  if (field.empty()) fail(Err::ParseError, "oracle finite needs --field");
  const DivisionRing* div = ring_by_name(field);
  ModulePtr m = ModuleDescriptor::make(RingDescriptor::make({{1, div}}), {rank});
  BruteK1Report rep = brute_k1_finite(FiniteStructure::make(m), max_power);
  json stages = json::array();
  for (const BruteStage& st : rep.stages)
    stages.push_back({{"set_size", st.set_size},
                      {"group_order", st.group_order},
                      {"commutator_order", st.commutator_order},
                      {"ab", st.ab.str()}});
  json j{{"command", "oracle-finite"}, {"field", field},           {"rank", rank},
         {"max_power", max_power},     {"stabilized", rep.stabilized},
         {"value", rep.value.str()},   {"stages", stages}};
  return finish(std::move(j), rep.str());
}

CommandResult cmd_selftest() {
  struct Check {
    std::string name;
    bool ok = false;
  };
  std::vector<Check> checks;
  auto run = [&](const char* name, auto&& body) {
    bool ok = false;
    try {
      ok = body();
    } catch (...) {
      ok = false;
    }
    checks.push_back({name, ok});
  };

  const DivisionRing* f5 = finite_field(5);
  RingPtr s5 = RingDescriptor::make({{1, f5}});
  ModulePtr m5 = ModuleDescriptor::make(s5, {kOmega});

  run("k0-full-square", [&] { return k0_class(DefinableSet::full(m5, 2)).str() == "X^2"; });
  run("k1-identity-zero",
      [&] { return k1_invariant(identity_map(DefinableSet::full(m5, 1))).is_zero(); });
  run("gl-antidiagonal-det", [&] {
    RingPtr sq = RingDescriptor::make({{1, rationals()}});
    SMat a{sq, 2, 2, {Mat::from_ints(rationals(), {{0, 1}, {1, 0}})}};
    K1Class c = k1_of_gl(a);
    auto it = c.comps[0].levels.find(2);
    return it != c.comps[0].levels.end() && it->second.det.str() == "-1" &&
           it->second.sign == 0;
  });
  run("det-multiplicative", [&] {
    SMat a{s5, 2, 2, {Mat::from_ints(f5, {{2, 1}, {0, 1}})}};
    SMat b{s5, 2, 2, {Mat::from_ints(f5, {{1, 0}, {3, 4}})}};
    return k1_eq(k1_of_gl(a * b), k1_add(k1_of_gl(a), k1_of_gl(b)));
  });
  run("expected-k1-gf5",
      [&] { return expected_k1_group(s5, m5).str() == "Z2 + sum_i (C4 + Z2)"; });
  run("brute-f3-cyclic2", [&] {
    ModulePtr f3 = ModuleDescriptor::make(RingDescriptor::make({{1, finite_field(3)}}), {1});
    BruteK1Report rep = brute_k1_finite(FiniteStructure::make(f3), 1);
    return rep.stabilized && rep.value == GroupDescriptor::cyclic(2);
  });
  run("session-fixpoint", [&] {
    const char* script =
        "ring S = M(1, GF(5))\n"
        "module M over S = rank(omega)\n"
        "map f = identity(full(M, 1))\n"
        "k1 f\n";
    ParseResult r1 = parse_dsl(script);
    if (!r1.session) return false;
    std::string p1 = print_session(*r1.session);
    ParseResult r2 = parse_dsl(p1);
    if (!r2.session) return false;
    return p1 == print_session(*r2.session);
  });

  json jchecks = json::array();
  bool all = true;
  std::string text;
  for (const Check& c : checks) {
    all = all && c.ok;
    jchecks.push_back({{"name", c.name}, {"ok", c.ok}});
    if (!c.ok) text += "selftest FAILED: " + c.name + "\n";
  }
  if (all)
    text = "selftest: " + std::to_string(checks.size()) + "/" +
           std::to_string(checks.size()) + " checks passed";
  else
    text.pop_back();
  json j{{"command", "selftest"}, {"ok", all}, {"checks", jchecks}};
  return finish(std::move(j), std::move(text), all ? 0 : 1);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string Diagnostic::str() const {
  return "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
         message;
}

ParseResult parse_dsl(const std::string& text) {
  Parser p;
  int lineno = 1;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    std::string line =
        end == std::string::npos ? text.substr(start) : text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    p.parse_line(line, lineno);
    if (end == std::string::npos) break;
    start = end + 1;
    ++lineno;
  }
  ParseResult r;
  r.diagnostics = std::move(p.diags);
  if (r.diagnostics.empty()) r.session = std::move(p.s);
  return r;
}

std::string print_session(const Session& s) {
  Printer pr(s);
  std::ostringstream out;
  for (const auto& [kind, name] : s.order) {
    if (kind == "ring") {
      out << "ring " << name << " = " << s.rings.at(name)->name() << "\n";
    } else if (kind == "module") {
      const ModulePtr& m = s.modules.at(name);
      out << "module " << name << " over " << pr.ring_ref(m->ring()) << " = "
          << m->rank_str() << "\n";
    } else if (kind == "ppset") {
      out << "ppset " << name << " = " << pr.pp_str(s.ppsets.at(name)) << "\n";
    } else if (kind == "block") {
      out << "block " << name << " = " << pr.block_str(s.blocks.at(name)) << "\n";
    } else if (kind == "set") {
      out << "set " << name << " = " << pr.set_str(s.sets.at(name)) << "\n";
    } else if (kind == "map") {
      out << "map " << name << " = " << pr.map_str(s.maps.at(name)) << "\n";
    } else {
      fail(Err::PreconditionFailed, "unknown binding kind '" + kind + "'");
    }
  }
  for (const std::string& q : s.queries) out << q << "\n";
  return out.str();
}

CommandResult run_command(const std::vector<std::string>& args, const Session& s) {
  if (args.empty()) fail(Err::ParseError, "empty command");
  const std::string& cmd = args[0];
  auto need = [&](size_t n, const char* usage) {
    if (args.size() != n) fail(Err::ParseError, std::string("usage: ") + usage);
  };

  if (cmd == "check") {
    need(2, "check <map>");
    const PiecewiseAffineBijection& f = want_map(s, args[1]);
    std::vector<std::string> violations = validate(f);
    json j{{"command", "check"},
           {"map", args[1]},
           {"ok", violations.empty()},
           {"violations", violations}};
    std::string text = "ok";
    if (!violations.empty()) {
      text = "invalid:";
      for (const std::string& v : violations) text += "\n  " + v;
    }
    return finish(std::move(j), std::move(text), violations.empty() ? 0 : 1);
  }

  if (cmd == "k0") {
    need(2, "k0 <set>");
    K0Class c = k0_class(want_set(s, args[1]));
    json j{{"command", "k0"},
           {"set", args[1]},
           {"k", c.k},
           {"class", c.str()},
           {"terms", k0_json(c)}};
    return finish(std::move(j), c.str());
  }

  if (cmd == "dim") {
    need(2, "dim <set|map>");
    Colour col;
    if (s.sets.count(args[1]))
      col = dim_of(s.sets.at(args[1]));
    else if (s.maps.count(args[1]))
      col = dim_of_map(s.maps.at(args[1]));
    else
      fail(Err::ParseError, "unknown set or map '" + args[1] + "'");
    json j{{"command", "dim"}, {"name", args[1]}};
    j.update(colour_json(col));
    return finish(std::move(j), col.str());
  }

  if (cmd == "k1") {
    need(2, "k1 <map>");
    K1Class c = k1_invariant(want_map(s, args[1]));
    json j{{"command", "k1"},
           {"map", args[1]},
           {"class", c.str()},
           {"components", k1_json(c)}};
    return finish(std::move(j), c.str());
  }

  if (cmd == "expected-k1") {
    need(2, "expected-k1 <module>");
    const ModulePtr& m = want_module(s, args[1]);
    GroupDescriptor g = expected_k1_group(m->ring(), m);
    json j{{"command", "expected-k1"}, {"module", args[1]}, {"descriptor", g.str()}};
    return finish(std::move(j), g.str());
  }

  if (cmd == "compose") {
    need(3, "compose <map> <map>");
    PiecewiseAffineBijection h = compose(want_map(s, args[1]), want_map(s, args[2]));
    json j{{"command", "compose"},
           {"maps", {args[1], args[2]}},
           {"pieces", h.pieces.size()},
           {"result", h.str()}};
    return finish(std::move(j), h.str());
  }

  if (cmd == "invert") {
    need(2, "invert <map>");
    PiecewiseAffineBijection h = invert(want_map(s, args[1]));
    json j{{"command", "invert"},
           {"map", args[1]},
           {"pieces", h.pieces.size()},
           {"result", h.str()}};
    return finish(std::move(j), h.str());
  }

  if (cmd == "morita") {
    if (args.size() != 3 || args[2].rfind("q=", 0) != 0)
      fail(Err::ParseError, "usage: morita <set|map> q=<n>");
    int q = static_cast<int>(parse_int_arg(args[2].substr(2), "q"));
    std::string result;
    if (s.sets.count(args[1]))
      result = morita_defset(s.sets.at(args[1]), q).str();
    else if (s.maps.count(args[1]))
      result = morita_map(s.maps.at(args[1]), q).str();
    else
      fail(Err::ParseError, "unknown set or map '" + args[1] + "'");
    json j{{"command", "morita"}, {"name", args[1]}, {"q", q}, {"result", result}};
    return finish(std::move(j), result);
  }

  if (cmd == "oracle") {
    if (args.size() < 2 || args[1] != "finite")
      fail(Err::ParseError, "usage: oracle finite --field GF(p) [--rank n] [--max-power m]");
    return cmd_oracle_finite(args);
  }

  if (cmd == "selftest") {
    need(1, "selftest");
    return cmd_selftest();
  }

  if (cmd == "run") {
    need(1, "run");
    json results = json::array();
    std::string text;
    int exit_code = 0;
    for (const std::string& q : s.queries) {
      std::vector<std::string> qargs;
      std::istringstream in(q);
      for (std::string w; in >> w;) qargs.push_back(w);
      CommandResult r = run_command(qargs, s);
      json one = json::parse(r.json);
      one["query"] = q;
      results.push_back(std::move(one));
      if (!text.empty()) text += "\n";
      text += "# " + q + "\n" + r.text;
      if (r.exit != 0 && exit_code == 0) exit_code = r.exit;
    }
    if (s.queries.empty()) text = "no queries in the session";
    json j{{"command", "run"}, {"results", results}};
    return finish(std::move(j), std::move(text), exit_code);
  }

  fail(Err::ParseError, "unknown command '" + cmd + "'");
}

}  // namespace defk
