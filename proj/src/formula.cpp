#include "tdl/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <unordered_map>

#include "tdl/structure.hpp"

namespace tdl {

// ---------------------------------------------------------------- constructors

Formula make_node(Kind k, std::string name, std::vector<std::string> args, std::vector<Formula> kids, int i,
                  int p) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->name = std::move(name);
  n->args = std::move(args);
  n->kids = std::move(kids);
  n->i = i;
  n->p = p;
  return n;
}

Formula f_true() {
  static const Formula t = make_node(Kind::True, "", {}, {});
  return t;
}
Formula f_false() {
  static const Formula f = make_node(Kind::False, "", {}, {});
  return f;
}
Formula atom(std::string rel, std::vector<std::string> args) {
  return make_node(Kind::Atom, std::move(rel), std::move(args), {});
}
Formula eq(std::string x, std::string y) {
  if (x == y) return f_true();
  return make_node(Kind::Eq, "", {std::move(x), std::move(y)}, {});
}
Formula neq(std::string x, std::string y) { return neg(eq(std::move(x), std::move(y))); }
Formula leq(std::string x, std::string y) { return make_node(Kind::Leq, "", {std::move(x), std::move(y)}, {}); }
Formula set_atom(std::string X, std::string x) { return make_node(Kind::SetAtom, std::move(X), {std::move(x)}, {}); }

Formula neg(Formula f) {
  if (f->kind == Kind::True) return f_false();
  if (f->kind == Kind::False) return f_true();
  if (f->kind == Kind::Not) return f->kids[0];
  return make_node(Kind::Not, "", {}, {std::move(f)});
}

static Formula junction(Kind k, std::vector<Formula> fs) {
  Kind unit = k == Kind::And ? Kind::True : Kind::False;
  Kind zero = k == Kind::And ? Kind::False : Kind::True;
  std::vector<Formula> out;
  for (auto& f : fs) {
    if (f->kind == unit) continue;
    if (f->kind == zero) return f;
    if (f->kind == k)
      out.insert(out.end(), f->kids.begin(), f->kids.end());
    else
      out.push_back(f);
  }
  if (out.empty()) return k == Kind::And ? f_true() : f_false();
  if (out.size() == 1) return out[0];
  return make_node(k, "", {}, std::move(out));
}

Formula conj(std::vector<Formula> fs) { return junction(Kind::And, std::move(fs)); }
Formula disj(std::vector<Formula> fs) { return junction(Kind::Or, std::move(fs)); }
Formula conj(Formula a, Formula b) { return conj(std::vector<Formula>{std::move(a), std::move(b)}); }
Formula disj(Formula a, Formula b) { return disj(std::vector<Formula>{std::move(a), std::move(b)}); }

Formula implies(Formula a, Formula b) {
  if (a->kind == Kind::True) return b;
  if (a->kind == Kind::False || b->kind == Kind::True) return f_true();
  if (b->kind == Kind::False) return neg(a);
  return make_node(Kind::Implies, "", {}, {std::move(a), std::move(b)});
}

Formula exists(std::string x, Formula f) {
  // exists x. true is kept: it fails on the empty universe
  if (f->kind == Kind::False) return f;
  return make_node(Kind::Exists, std::move(x), {}, {std::move(f)});
}
Formula forall(std::string x, Formula f) {
  if (f->kind == Kind::True) return f;
  return make_node(Kind::Forall, std::move(x), {}, {std::move(f)});
}
Formula exists(const std::vector<std::string>& xs, Formula f) {
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) f = exists(*it, f);
  return f;
}
Formula forall(const std::vector<std::string>& xs, Formula f) {
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) f = forall(*it, f);
  return f;
}
Formula exists_set(std::string X, Formula f) { return make_node(Kind::ExistsSet, std::move(X), {}, {std::move(f)}); }
Formula forall_set(std::string X, Formula f) { return make_node(Kind::ForallSet, std::move(X), {}, {std::move(f)}); }
Formula exists_mod(int i, int p, std::string x, Formula f) {
  if (p < 1 || i < 0 || i >= p) throw InputError("existsMod needs 0 <= i < p");
  return make_node(Kind::ExistsMod, std::move(x), {}, {std::move(f)}, i, p);
}

// ---------------------------------------------------------------- parser

namespace {

struct Parser {
  std::string_view s;
  size_t pos = 0;
  std::vector<std::string> set_scope;

  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, pos); }

  void ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool peek(std::string_view t) {
    ws();
    return s.substr(pos, t.size()) == t;
  }
  bool accept(std::string_view t) {
    if (!peek(t)) return false;
    pos += t.size();
    return true;
  }
  void expect(std::string_view t) {
    if (!accept(t)) fail("expected '" + std::string(t) + "'");
  }
  static bool idstart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool idchar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string ident() {
    ws();
    if (pos >= s.size() || !idstart(s[pos])) fail("expected identifier");
    size_t b = pos;
    for (;;) {
      while (pos < s.size() && idchar(s[pos])) ++pos;
      // expansion suffix __{1,2}
      if (pos < s.size() && s[pos] == '{' && pos >= b + 2 && s[pos - 1] == '_' && s[pos - 2] == '_') {
        size_t e = s.find('}', pos);
        if (e == std::string_view::npos) fail("unterminated index set");
        for (size_t k = pos + 1; k < e; ++k)
          if (!std::isdigit(static_cast<unsigned char>(s[k])) && s[k] != ',') fail("bad index set");
        pos = e + 1;
        continue;
      }
      break;
    }
    return std::string(s.substr(b, pos - b));
  }

  bool keyword_ahead(std::string_view kw) {
    ws();
    if (s.substr(pos, kw.size()) != kw) return false;
    size_t e = pos + kw.size();
    return e >= s.size() || !idchar(s[e]);
  }

  int number() {
    ws();
    size_t b = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (b == pos) fail("expected number");
    return std::stoi(std::string(s.substr(b, pos - b)));
  }

  bool is_set_var(const std::string& n) {
    return std::find(set_scope.begin(), set_scope.end(), n) != set_scope.end();
  }

  Formula formula() {
    Formula a = disjunction();
    if (accept("->")) {
      Formula b = formula();
      return make_node(Kind::Implies, "", {}, {a, b});
    }
    return a;
  }
  Formula disjunction() {
    std::vector<Formula> v{conjunction()};
    while (accept("|")) v.push_back(conjunction());
    if (v.size() == 1) return v[0];
    return make_node(Kind::Or, "", {}, v);
  }
  Formula conjunction() {
    std::vector<Formula> v{unary()};
    while (accept("&")) v.push_back(unary());
    if (v.size() == 1) return v[0];
    return make_node(Kind::And, "", {}, v);
  }
  Formula unary() {
    ws();
    if (accept("!")) return make_node(Kind::Not, "", {}, {unary()});
    if (keyword_ahead("existsMod")) {
      pos += 9;
      expect("[");
      int i = number();
      expect(",");
      int p = number();
      expect("]");
      if (p < 1 || i < 0 || i >= p) fail("existsMod needs 0 <= i < p");
      std::string x = ident();
      expect(".");
      return make_node(Kind::ExistsMod, x, {}, {formula()}, i, p);
    }
    for (auto [kw, k] : {std::pair{"existsSet", Kind::ExistsSet}, std::pair{"forallSet", Kind::ForallSet}}) {
      if (keyword_ahead(kw)) {
        pos += std::string_view(kw).size();
        std::string X = ident();
        expect(".");
        set_scope.push_back(X);
        Formula body = formula();
        set_scope.pop_back();
        return make_node(k, X, {}, {body});
      }
    }
    for (auto [kw, k] : {std::pair{"exists", Kind::Exists}, std::pair{"forall", Kind::Forall}}) {
      if (keyword_ahead(kw)) {
        pos += std::string_view(kw).size();
        std::string x = ident();
        expect(".");
        // a first-order binder shadows a set variable of the same name
        auto saved = set_scope;
        set_scope.erase(std::remove(set_scope.begin(), set_scope.end(), x), set_scope.end());
        Formula body = formula();
        set_scope = saved;
        return make_node(k, x, {}, {body});
      }
    }
    return primary();
  }
  Formula primary() {
    ws();
    if (accept("(")) {
      Formula f = formula();
      expect(")");
      return f;
    }
    if (keyword_ahead("true")) {
      pos += 4;
      return f_true();
    }
    if (keyword_ahead("false")) {
      pos += 5;
      return f_false();
    }
    size_t at = pos;
    std::string id = ident();
    if (accept("(")) {
      std::vector<std::string> args{ident()};
      while (accept(",")) args.push_back(ident());
      expect(")");
      if (is_set_var(id)) {
        if (args.size() != 1) {
          pos = at;
          fail("set variable " + id + " applied to more than one term");
        }
        return make_node(Kind::SetAtom, id, args, {});
      }
      return make_node(Kind::Atom, id, args, {});
    }
    if (accept("<=")) return make_node(Kind::Leq, "", {id, ident()}, {});
    if (accept("=")) return make_node(Kind::Eq, "", {id, ident()}, {});
    fail("expected atom after '" + id + "'");
  }
};

}  // namespace

Formula parse_formula(std::string_view text, const std::set<std::string>& free_set_vars) {
  Parser P{text};
  P.set_scope.assign(free_set_vars.begin(), free_set_vars.end());
  Formula f = P.formula();
  P.ws();
  if (P.pos != text.size()) P.fail("trailing input");
  return f;
}

// ---------------------------------------------------------------- printer

namespace {

// a quantifier swallows everything to its right; ! wraps its own operand
bool open_ended(const Formula& f) { return is_quantifier(f->kind); }

void print(const Formula& f, std::string& out);

void print_wrapped(const Formula& f, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(f, out);
  if (wrap) out += ')';
}

void print(const Formula& f, std::string& out) {
  switch (f->kind) {
    case Kind::True: out += "true"; return;
    case Kind::False: out += "false"; return;
    case Kind::Atom:
    case Kind::SetAtom:
      out += f->name + "(";
      for (size_t i = 0; i < f->args.size(); ++i) {
        if (i) out += ',';
        out += f->args[i];
      }
      out += ')';
      return;
    case Kind::Eq: out += f->args[0] + " = " + f->args[1]; return;
    case Kind::Leq: out += f->args[0] + " <= " + f->args[1]; return;
    case Kind::Not: {
      out += '!';
      auto k = f->kids[0]->kind;
      bool wrap = k == Kind::And || k == Kind::Or || k == Kind::Implies || k == Kind::Eq || k == Kind::Leq ||
                  is_quantifier(k);
      print_wrapped(f->kids[0], wrap, out);
      return;
    }
    case Kind::And:
    case Kind::Or: {
      const char* sep = f->kind == Kind::And ? " & " : " | ";
      for (size_t i = 0; i < f->kids.size(); ++i) {
        if (i) out += sep;
        auto& c = f->kids[i];
        bool wrap = c->kind == Kind::Or || c->kind == Kind::Implies || open_ended(c) ||
                    (c->kind == Kind::And && f->kind == Kind::And);
        print_wrapped(c, wrap, out);
      }
      return;
    }
    case Kind::Implies: {
      auto& l = f->kids[0];
      print_wrapped(l, l->kind == Kind::Implies || open_ended(l), out);
      out += " -> ";
      print(f->kids[1], out);
      return;
    }
    case Kind::Exists: out += "exists " + f->name + ". "; break;
    case Kind::Forall: out += "forall " + f->name + ". "; break;
    case Kind::ExistsSet: out += "existsSet " + f->name + ". "; break;
    case Kind::ForallSet: out += "forallSet " + f->name + ". "; break;
    case Kind::ExistsMod:
      out += "existsMod[" + std::to_string(f->i) + "," + std::to_string(f->p) + "] " + f->name + ". ";
      break;
  }
  print(f->kids[0], out);
}

}  // namespace

std::string render(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

// ---------------------------------------------------------------- logic, metrics

Logic logic_of(const Formula& f) {
  bool set = false, mod = false;
  std::unordered_map<const Node*, bool> seen;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    if (seen.count(g.get())) return;
    seen[g.get()] = true;
    if (g->kind == Kind::ExistsSet || g->kind == Kind::ForallSet || g->kind == Kind::SetAtom) set = true;
    if (g->kind == Kind::ExistsMod) mod = true;
    for (auto& k : g->kids) go(k);
  };
  go(f);
  if (set) return mod ? Logic::MSOMOD : Logic::MSO;
  return mod ? Logic::FOMOD : Logic::FO;
}

std::string logic_name(Logic l) {
  switch (l) {
    case Logic::FO: return "FO";
    case Logic::FOMOD: return "FO+MOD";
    case Logic::MSO: return "MSO";
    case Logic::MSOMOD: return "MSO+MOD";
  }
  return "?";
}

int quantifier_rank(const Formula& f) {
  std::unordered_map<const Node*, int> memo;
  std::function<int(const Formula&)> go = [&](const Formula& g) -> int {
    auto it = memo.find(g.get());
    if (it != memo.end()) return it->second;
    int r = 0;
    for (auto& k : g->kids) r = std::max(r, go(k));
    if (is_quantifier(g->kind)) ++r;
    return memo[g.get()] = r;
  };
  return go(f);
}

// Alternations along the NNF, computed by tracking polarity instead of
// materialising the NNF. last: 0 none, 1 exists, 2 forall.
int alternation_depth(const Formula& f) {
  std::unordered_map<const Node*, int> memo[2][3];
  std::function<int(const Formula&, int, int)> go = [&](const Formula& g, int pos, int last) -> int {
    auto& m = memo[pos][last];
    auto it = m.find(g.get());
    if (it != m.end()) return it->second;
    int r = 0;
    switch (g->kind) {
      case Kind::Not: r = go(g->kids[0], 1 - pos, last); break;
      case Kind::And:
      case Kind::Or:
        for (auto& k : g->kids) r = std::max(r, go(k, pos, last));
        break;
      case Kind::Implies: r = std::max(go(g->kids[0], 1 - pos, last), go(g->kids[1], pos, last)); break;
      case Kind::Exists:
      case Kind::ExistsSet:
      case Kind::Forall:
      case Kind::ForallSet: {
        bool ex = g->kind == Kind::Exists || g->kind == Kind::ExistsSet;
        int q = (ex == (pos == 1)) ? 1 : 2;
        r = (last != 0 && last != q ? 1 : 0) + go(g->kids[0], pos, q);
        break;
      }
      case Kind::ExistsMod: r = go(g->kids[0], 1, last); break;
      default: break;
    }
    return m[g.get()] = r;
  };
  return go(f, 1, 0);
}

uint64_t formula_size(const Formula& f) {
  std::unordered_map<const Node*, uint64_t> memo;
  const uint64_t cap = ~uint64_t{0};
  std::function<uint64_t(const Formula&)> go = [&](const Formula& g) -> uint64_t {
    auto it = memo.find(g.get());
    if (it != memo.end()) return it->second;
    uint64_t s = 1;
    for (auto& k : g->kids) {
      uint64_t c = go(k);
      s = (cap - s < c) ? cap : s + c;
    }
    return memo[g.get()] = s;
  };
  return go(f);
}

size_t dag_size(const Formula& f) {
  std::unordered_map<const Node*, bool> seen;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    if (seen.emplace(g.get(), true).second)
      for (auto& k : g->kids) go(k);
  };
  go(f);
  return seen.size();
}

Metrics metrics(const Formula& f) { return {quantifier_rank(f), alternation_depth(f), formula_size(f)}; }

// ---------------------------------------------------------------- nnf

Formula to_nnf(const Formula& f) {
  std::unordered_map<const Node*, Formula> memo[2];
  std::function<Formula(const Formula&, int)> go = [&](const Formula& g, int pos) -> Formula {
    auto it = memo[pos].find(g.get());
    if (it != memo[pos].end()) return it->second;
    Formula r;
    auto kids = [&](int p) {
      std::vector<Formula> v;
      for (auto& k : g->kids) v.push_back(go(k, p));
      return v;
    };
    switch (g->kind) {
      case Kind::True: r = pos ? g : f_false(); break;
      case Kind::False: r = pos ? g : f_true(); break;
      case Kind::Atom:
      case Kind::Eq:
      case Kind::Leq:
      case Kind::SetAtom: r = pos ? g : make_node(Kind::Not, "", {}, {g}); break;
      case Kind::Not: r = go(g->kids[0], 1 - pos); break;
      case Kind::And: r = pos ? conj(kids(1)) : disj(kids(0)); break;
      case Kind::Or: r = pos ? disj(kids(1)) : conj(kids(0)); break;
      case Kind::Implies:
        r = pos ? disj(go(g->kids[0], 0), go(g->kids[1], 1)) : conj(go(g->kids[0], 1), go(g->kids[1], 0));
        break;
      case Kind::Exists:
      case Kind::Forall: {
        bool ex = (g->kind == Kind::Exists) == (pos == 1);
        r = make_node(ex ? Kind::Exists : Kind::Forall, g->name, {}, {go(g->kids[0], pos)});
        break;
      }
      case Kind::ExistsSet:
      case Kind::ForallSet: {
        bool ex = (g->kind == Kind::ExistsSet) == (pos == 1);
        r = make_node(ex ? Kind::ExistsSet : Kind::ForallSet, g->name, {}, {go(g->kids[0], pos)});
        break;
      }
      case Kind::ExistsMod: {
        Formula body = go(g->kids[0], 1);
        if (pos) {
          r = make_node(Kind::ExistsMod, g->name, {}, {body}, g->i, g->p);
        } else {
          std::vector<Formula> alts;
          for (int j = 0; j < g->p; ++j)
            if (j != g->i) alts.push_back(make_node(Kind::ExistsMod, g->name, {}, {body}, j, g->p));
          r = disj(alts);
        }
        break;
      }
    }
    return memo[pos][g.get()] = r;
  };
  return go(f, 1);
}

// ---------------------------------------------------------------- variables

namespace {

struct VarCache {
  std::unordered_map<const Node*, std::shared_ptr<std::set<std::string>>> fo, so;

  const std::set<std::string>& free(const Formula& g, bool set) {
    auto& m = set ? so : fo;
    auto it = m.find(g.get());
    if (it != m.end()) return *it->second;
    auto s = std::make_shared<std::set<std::string>>();
    switch (g->kind) {
      case Kind::Atom:
      case Kind::Eq:
      case Kind::Leq:
        if (!set) s->insert(g->args.begin(), g->args.end());
        break;
      case Kind::SetAtom:
        if (set)
          s->insert(g->name);
        else
          s->insert(g->args[0]);
        break;
      default:
        for (auto& k : g->kids) {
          auto& c = free(k, set);
          s->insert(c.begin(), c.end());
        }
        bool binds = set ? (g->kind == Kind::ExistsSet || g->kind == Kind::ForallSet)
                         : (g->kind == Kind::Exists || g->kind == Kind::Forall || g->kind == Kind::ExistsMod);
        if (binds) s->erase(g->name);
    }
    m[g.get()] = s;
    return *s;
  }
};

Formula rebuild(const Formula& g, std::vector<Formula> kids) {
  return make_node(g->kind, g->name, g->args, std::move(kids), g->i, g->p);
}

Formula rename_impl(const Formula& g, const std::map<std::string, std::string>& ren, Fresh& fresh, VarCache& vc,
                    std::map<std::pair<const Node*, std::map<std::string, std::string>>, Formula>& memo) {
  const auto& fv = vc.free(g, false);
  std::map<std::string, std::string> eff;
  for (auto& [a, b] : ren)
    if (a != b && fv.count(a)) eff[a] = b;
  if (eff.empty()) return g;
  auto key = std::make_pair(g.get(), eff);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  auto sub = [&](const std::string& v) {
    auto it = eff.find(v);
    return it == eff.end() ? v : it->second;
  };
  Formula r;
  switch (g->kind) {
    case Kind::Atom:
    case Kind::Eq:
    case Kind::Leq:
    case Kind::SetAtom: {
      std::vector<std::string> a;
      for (auto& v : g->args) a.push_back(sub(v));
      r = make_node(g->kind, g->name, a, {}, g->i, g->p);
      break;
    }
    case Kind::Exists:
    case Kind::Forall:
    case Kind::ExistsMod: {
      auto inner = eff;
      inner.erase(g->name);
      std::string x = g->name;
      bool clash = false;
      for (auto& [a, b] : inner)
        if (b == x && vc.free(g->kids[0], false).count(a)) clash = true;
      if (clash) {
        std::string y = fresh.var();
        inner[x] = y;
        x = y;
      }
      r = make_node(g->kind, x, {}, {rename_impl(g->kids[0], inner, fresh, vc, memo)}, g->i, g->p);
      break;
    }
    default: {
      std::vector<Formula> k;
      for (auto& c : g->kids) k.push_back(rename_impl(c, eff, fresh, vc, memo));
      r = rebuild(g, k);
    }
  }
  memo[key] = r;
  return r;
}

}  // namespace

std::set<std::string> free_vars(const Formula& f) {
  VarCache vc;
  return vc.free(f, false);
}

std::set<std::string> free_set_vars(const Formula& f) {
  VarCache vc;
  return vc.free(f, true);
}

std::set<std::string> relation_names(const Formula& f) {
  std::set<std::string> out;
  std::unordered_map<const Node*, bool> seen;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    if (!seen.emplace(g.get(), true).second) return;
    if (g->kind == Kind::Atom) out.insert(g->name);
    for (auto& k : g->kids) go(k);
  };
  go(f);
  return out;
}

bool uses_order(const Formula& f) {
  bool found = false;
  std::unordered_map<const Node*, bool> seen;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    if (found || !seen.emplace(g.get(), true).second) return;
    if (g->kind == Kind::Leq || (g->kind == Kind::Atom && g->name == "<=")) found = true;
    for (auto& k : g->kids) go(k);
  };
  go(f);
  return found;
}

Formula rename_free(const Formula& f, const std::map<std::string, std::string>& ren, Fresh& fresh) {
  VarCache vc;
  std::map<std::pair<const Node*, std::map<std::string, std::string>>, Formula> memo;
  return rename_impl(f, ren, fresh, vc, memo);
}

// ---------------------------------------------------------------- relativisation

Formula relativise(const Formula& f, const Formula& guard, const std::string& z, Fresh& fresh) {
  VarCache vc;
  std::set<std::string> params = vc.free(guard, false);
  params.erase(z);
  std::map<std::pair<const Node*, std::map<std::string, std::string>>, Formula> rmemo;
  std::map<std::string, Formula> guard_at;
  auto g_at = [&](const std::string& x) {
    auto it = guard_at.find(x);
    if (it != guard_at.end()) return it->second;
    return guard_at[x] = rename_impl(guard, {{z, x}}, fresh, vc, rmemo);
  };
  std::unordered_map<const Node*, Formula> memo;
  std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
    if (is_atomic(g->kind)) return g;
    auto it = memo.find(g.get());
    if (it != memo.end()) return it->second;
    Formula r;
    if (g->kind == Kind::Exists || g->kind == Kind::Forall || g->kind == Kind::ExistsMod) {
      std::string x = g->name;
      Formula body = g->kids[0];
      if (params.count(x)) {
        // the bound variable would capture a guard parameter
        std::string y = fresh.var();
        body = rename_impl(body, {{x, y}}, fresh, vc, rmemo);
        x = y;
      }
      Formula b = go(body);
      if (g->kind == Kind::Exists)
        r = exists(x, conj(g_at(x), b));
      else if (g->kind == Kind::Forall)
        r = forall(x, implies(g_at(x), b));
      else
        r = exists_mod(g->i, g->p, x, conj(g_at(x), b));
    } else {
      std::vector<Formula> k;
      for (auto& c : g->kids) k.push_back(go(c));
      r = rebuild(g, k);
    }
    return memo[g.get()] = r;
  };
  return go(f);
}

// ---------------------------------------------------------------- root removal

Formula interpret_removed(const Formula& f, const Signature& sig, const std::string& z, Fresh& fresh) {
  std::unordered_map<const Node*, Formula> memo;
  VarCache vc;
  std::map<std::pair<const Node*, std::map<std::string, std::string>>, Formula> rmemo;
  std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
    auto it = memo.find(g.get());
    if (it != memo.end()) return it->second;
    Formula r;
    switch (g->kind) {
      case Kind::ExistsSet:
      case Kind::ForallSet:
      case Kind::SetAtom: throw DomainError("interpret_removed: set quantifiers are not supported");
      case Kind::Atom: {
        std::string base;
        std::vector<int> idx;
        if (!split_expanded_name(g->name, &base, &idx)) throw InputError("not an expanded symbol: " + g->name);
        int s = sig.index(base);
        if (s < 0) throw InputError("unknown base symbol: " + base);
        int k = sig[s].arity;
        if (idx.size() != g->args.size() || idx.back() > k) throw InputError("bad expanded atom " + g->name);
        std::vector<std::string> a(k, z);
        for (size_t j = 0; j < idx.size(); ++j) a[idx[j] - 1] = g->args[j];
        r = atom(base, a);
        break;
      }
      case Kind::Exists:
      case Kind::Forall:
      case Kind::ExistsMod: {
        std::string x = g->name;
        Formula body = g->kids[0];
        if (x == z) {
          x = fresh.var();
          body = rename_impl(body, {{z, x}}, fresh, vc, rmemo);
        }
        Formula b = go(body);
        if (g->kind == Kind::Exists)
          r = exists(x, conj(neq(x, z), b));
        else if (g->kind == Kind::Forall)
          r = forall(x, implies(neq(x, z), b));
        else
          r = exists_mod(g->i, g->p, x, conj(neq(x, z), b));
        break;
      }
      default: {
        if (is_atomic(g->kind)) {
          r = g;
          break;
        }
        std::vector<Formula> k;
        for (auto& c : g->kids) k.push_back(go(c));
        r = rebuild(g, k);
      }
    }
    return memo[g.get()] = r;
  };
  return go(f);
}

}  // namespace tdl
