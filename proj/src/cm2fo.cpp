#include "tdl/cm2fo.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tdl {

Program parse_program(const std::string& text) {
  Program P;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    Instr I;
    auto bad = [&](const std::string& why) {
      return InputError("program line " + std::to_string(lineno) + ": " + why);
    };
    if (op == "inc") {
      I.op = Instr::Inc;
      if (!(ls >> I.counter)) throw bad("inc needs a counter");
    } else if (op == "dec") {
      I.op = Instr::Dec;
      if (!(ls >> I.counter >> I.j0 >> I.j1)) throw bad("dec needs a counter and two targets");
    } else if (op == "halt") {
      I.op = Instr::Halt;
    } else {
      throw bad("unknown instruction '" + op + "'");
    }
    std::string extra;
    if (ls >> extra) throw bad("trailing '" + extra + "'");
    P.ins.push_back(I);
  }
  validate(P);
  return P;
}

Program load_program(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_program(ss.str());
}

std::string program_text(const Program& P) {
  std::string s;
  for (auto& I : P.ins) {
    if (I.op == Instr::Inc)
      s += "inc " + std::to_string(I.counter);
    else if (I.op == Instr::Dec)
      s += "dec " + std::to_string(I.counter) + " " + std::to_string(I.j0) + " " + std::to_string(I.j1);
    else
      s += "halt";
    s += "\n";
  }
  return s;
}

void validate(const Program& P) {
  int l = P.length();
  if (l == 0) throw InputError("empty program");
  for (int k = 0; k < l; ++k) {
    auto& I = P.ins[k];
    bool last = k == l - 1;
    if ((I.op == Instr::Halt) != last) throw InputError("halt must be the last instruction and occur only there");
    if (I.op != Instr::Halt && I.counter != 1 && I.counter != 2)
      throw InputError("instruction " + std::to_string(k + 1) + ": counter must be 1 or 2");
    if (I.op == Instr::Dec && (I.j0 < 1 || I.j0 > l || I.j1 < 1 || I.j1 > l))
      throw InputError("instruction " + std::to_string(k + 1) + ": jump target out of range");
  }
}

namespace {

Config step(const Program& P, const Config& c) {
  const Instr& I = P.ins[c.j - 1];
  Config n = c;
  long& v = I.counter == 1 ? n.n1 : n.n2;
  if (I.op == Instr::Inc) {
    ++v;
    ++n.j;
  } else if (v == 0) {
    n.j = I.j0;
  } else {
    --v;
    n.j = I.j1;
  }
  return n;
}

}  // namespace

Run run_machine(const Program& P, long max_steps) {
  validate(P);
  Run r;
  Config c;
  r.trace.push_back(c);
  for (long s = 0;; ++s) {
    if (c.j == P.length()) {
      r.halted = true;
      break;
    }
    if (s >= max_steps) break;
    c = step(P, c);
    r.trace.push_back(c);
  }
  return r;
}

Signature cm_sig(int l) {
  std::vector<Symbol> s{{"E", 2}, {"L1", 1}, {"R1", 1}, {"L2", 1}, {"R2", 1}};
  for (int j = 1; j <= l; ++j) s.push_back({"J" + std::to_string(j), 1});
  return Signature(s);
}

std::vector<std::string> encode_config(const Config& c) {
  std::vector<std::string> w;
  for (long i = 0; i < c.n1; ++i) {
    w.push_back("L1");
    w.push_back("R1");
  }
  for (long i = 0; i < c.n2; ++i) {
    w.push_back("L2");
    w.push_back("R2");
  }
  w.push_back("J" + std::to_string(c.j));
  return w;
}

std::vector<std::string> encode_run(const std::vector<Config>& run) {
  std::vector<std::string> w;
  for (auto& c : run) {
    auto e = encode_config(c);
    w.insert(w.end(), e.begin(), e.end());
  }
  return w;
}

std::string word_string(const std::vector<std::string>& w) {
  std::string s;
  for (auto& a : w) {
    if (!s.empty()) s += " ";
    if (a[0] == 'J')
      s += a.substr(1);
    else
      s += std::string(1, a[1]) + "_" + a[0];
  }
  return s;
}

Structure word_structure(const std::vector<std::string>& w, int l) {
  Structure W(cm_sig(l), static_cast<int>(w.size()));
  for (size_t i = 0; i < w.size(); ++i) {
    if (W.sig.index(w[i]) < 0) throw InputError("letter " + w[i] + " outside the alphabet");
    W.add(w[i], {static_cast<int>(i)});
  }
  std::vector<int> o(w.size());
  for (size_t i = 0; i < o.size(); ++i) o[i] = static_cast<int>(i);
  return with_order(W, o);
}

namespace {

// letters in order; InputError unless each element has exactly one colour
std::vector<std::string> letters(const Structure& W) {
  if (!W.ordered()) throw InputError("word: ordered structure expected");
  std::vector<std::string> out;
  for (int e : *W.order) {
    std::string got;
    for (int s = 0; s < W.sig.size(); ++s)
      if (W.sig[s].arity == 1 && W.holds(s, {e})) {
        if (!got.empty()) throw InputError("word: element with two colours");
        got = W.sig[s].name;
      }
    if (got.empty()) throw InputError("word: uncoloured element");
    out.push_back(got);
  }
  return out;
}

}  // namespace

std::vector<Config> decode_word(const Structure& W, int l) {
  auto w = letters(W);
  std::vector<Config> out;
  Config c{0, 0, 0};
  // (1_L 1_R)* (2_L 2_R)* j per block, checked letter by letter
  std::string prev = "J";
  for (auto& a : w) {
    bool ok;
    if (a == "L1") ok = prev == "J" || prev == "R1";
    else if (a == "R1") ok = prev == "L1";
    else if (a == "L2") ok = prev == "J" || prev == "R1" || prev == "R2";
    else if (a == "R2") ok = prev == "L2";
    else ok = prev == "J" || prev == "R1" || prev == "R2";
    if (!ok) throw InputError("word: '" + a + "' cannot follow '" + prev + "'");
    if (a == "R1") ++c.n1;
    if (a == "R2") ++c.n2;
    if (a[0] == 'J') {
      c.j = std::stoi(a.substr(1));
      if (c.j < 1 || c.j > l) throw InputError("word: instruction colour out of range");
      out.push_back(c);
      c = Config{0, 0, 0};
    }
    prev = a[0] == 'J' ? "J" : a;
  }
  if (prev != "J") throw InputError("word: does not end with an instruction vertex");
  return out;
}

Structure build_matching_extension(const Structure& W, const Program& P) {
  int l = P.length();
  auto run = decode_word(W, l);
  if (run.empty() || !(run[0] == Config{0, 0, 1})) throw InputError("matching extension: run must start at (0,0,1)");
  if (run.back().j != l) throw InputError("matching extension: run does not halt");
  for (size_t i = 0; i + 1 < run.size(); ++i) {
    if (run[i].j == l) throw InputError("matching extension: run continues after halting");
    if (!(step(P, run[i]) == run[i + 1]))
      throw InputError("matching extension: configuration " + std::to_string(i + 2) + " does not follow");
  }
  // element lists per block and letter
  auto w = letters(W);
  const auto& ord = *W.order;
  std::vector<std::map<std::string, std::vector<int>>> blocks(1);
  for (size_t k = 0; k < w.size(); ++k) {
    blocks.back()[w[k]].push_back(ord[k]);
    if (w[k][0] == 'J' && k + 1 < w.size()) blocks.emplace_back();
  }
  Structure M = W;
  for (size_t i = 0; i + 1 < blocks.size(); ++i)
    for (auto [L, R] : {std::pair{"L1", "R1"}, std::pair{"L2", "R2"}}) {
      auto& a = blocks[i][L];
      auto& b = blocks[i + 1][R];
      for (size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
        M.add("E", {a[k], b[k]});
        M.add("E", {b[k], a[k]});
      }
    }
  M.normalize();
  return M;
}

namespace {

struct SentenceBuilder {
  int l;
  Fresh fresh;

  Formula col(const std::string& a, const std::string& x) { return atom(a, {x}); }
  Formula ins(const std::string& x) {
    std::vector<Formula> d;
    for (int j = 1; j <= l; ++j) d.push_back(col("J" + std::to_string(j), x));
    return disj(d);
  }
  Formula lt(const std::string& x, const std::string& y) { return neg(leq(y, x)); }

  // u lies in the block ending at instruction vertex w
  Formula in_block(const std::string& u, const std::string& w) {
    std::string z = fresh.var();
    return conj(leq(u, w), forall(z, implies(leq(z, w), disj({lt(z, u), eq(z, w), neg(ins(z))}))));
  }
  // u is matched inside the prefix up to w2
  Formula matched(const std::string& u, const std::string& w2) {
    std::string y = fresh.var();
    return exists(y, conj(leq(y, w2), atom("E", {u, y})));
  }
  // members of the block: first block ends at w, second block is (w, w2]
  Formula member(int blk, const std::string& u, const std::string& w, const std::string& w2) {
    return blk == 0 ? in_block(u, w) : conj(lt(w, u), leq(u, w2));
  }
  Formula none(int blk, const std::string& a, const std::string& w, const std::string& w2) {
    std::string u = fresh.var();
    return forall(u, implies(leq(u, w2), neg(conj(member(blk, u, w, w2), col(a, u)))));
  }
  Formula some(int blk, const std::string& a, const std::string& w, const std::string& w2) {
    std::string u = fresh.var();
    return exists(u, conj({leq(u, w2), member(blk, u, w, w2), col(a, u)}));
  }
  Formula all_matched(int blk, const std::string& a, const std::string& w, const std::string& w2) {
    std::string u = fresh.var();
    return forall(u, implies(conj({leq(u, w2), member(blk, u, w, w2), col(a, u)}), matched(u, w2)));
  }
  Formula one_unmatched(int blk, const std::string& a, const std::string& w, const std::string& w2) {
    std::string u = fresh.var(), v = fresh.var();
    auto open = [&](const std::string& x) {
      return conj({member(blk, x, w, w2), col(a, x), neg(matched(x, w2))});
    };
    return exists(u, conj({leq(u, w2), open(u), forall(v, implies(leq(v, w2), disj(neg(open(v)), eq(v, u))))}));
  }

  Formula transition(const Instr& I, const std::string& w, const std::string& w2) {
    std::string c = std::to_string(I.counter), o = I.counter == 1 ? "2" : "1";
    std::string Lc = "L" + c, Rc = "R" + c, Lo = "L" + o, Ro = "R" + o;
    Formula other = conj(all_matched(0, Lo, w, w2), all_matched(1, Ro, w, w2));
    auto next_is = [&](int j) { return col("J" + std::to_string(j), w2); };
    if (I.op == Instr::Inc) return conj({all_matched(0, Lc, w, w2), one_unmatched(1, Rc, w, w2), other});
    Formula zero = conj({none(0, Lc, w, w2), none(1, Lc, w, w2), other, next_is(I.j0)});
    Formula pos = conj({some(0, Lc, w, w2), all_matched(1, Rc, w, w2), one_unmatched(0, Lc, w, w2), other,
                        next_is(I.j1)});
    return disj(zero, pos);
  }

  Formula build(const Program& P) {
    std::string x = "x", y = "y", z = "z", t = "t";
    std::vector<Formula> parts;
    std::vector<std::string> colours{"L1", "R1", "L2", "R2"};
    for (int j = 1; j <= l; ++j) colours.push_back("J" + std::to_string(j));
    // coloured graph, maximum degree 1
    std::vector<Formula> one;
    for (auto& a : colours) one.push_back(col(a, x));
    parts.push_back(forall(x, disj(one)));
    for (size_t a = 0; a < colours.size(); ++a)
      for (size_t b = a + 1; b < colours.size(); ++b)
        parts.push_back(forall(x, neg(conj(col(colours[a], x), col(colours[b], x)))));
    parts.push_back(forall(x, neg(atom("E", {x, x}))));
    parts.push_back(forall(x, forall(y, implies(atom("E", {x, y}), atom("E", {y, x})))));
    parts.push_back(forall(x, forall(y, forall(z, implies(conj(atom("E", {x, y}), atom("E", {x, z})), eq(y, z))))));
    // edges join an L vertex with the R vertex of the same counter one block later
    Formula pairing = disj(conj(col("L1", x), col("R1", y)), conj(col("L2", x), col("R2", y)));
    parts.push_back(forall(x, forall(y, implies(conj(atom("E", {x, y}), lt(x, y)), pairing))));
    parts.push_back(forall(x, forall(y, forall(z, forall(t, neg(conj({atom("E", {x, y}), lt(x, z), lt(z, t), lt(t, y),
                                                                      ins(z), ins(t)})))))));
    {
      std::string w = fresh.var();
      parts.push_back(forall(x, forall(y, implies(conj(atom("E", {x, y}), lt(x, y)),
                                                  exists(w, conj({lt(w, y), lt(x, w), ins(w)}))))));
    }
    // word shape: successor colours
    {
      std::string v = fresh.var();
      Formula succ = conj(lt(x, y), forall(v, implies(leq(v, y), disj({leq(v, x), eq(v, y)}))));
      auto allowed = [&](const std::string& a, std::vector<Formula> next) {
        return forall(x, forall(y, implies(conj(succ, a == "J" ? ins(x) : col(a, x)), disj(next))));
      };
      parts.push_back(allowed("L1", {col("R1", y)}));
      parts.push_back(allowed("R1", {col("L1", y), col("L2", y), ins(y)}));
      parts.push_back(allowed("L2", {col("R2", y)}));
      parts.push_back(allowed("R2", {col("L2", y), ins(y)}));
      parts.push_back(allowed("J", {col("L1", y), col("L2", y), ins(y)}));
    }
    // condition 1: first vertex 1-coloured, last vertex l-coloured, and the
    // halting colour only at the end
    {
      std::string v = fresh.var();
      parts.push_back(forall(x, implies(forall(v, implies(leq(v, x), eq(v, x))), col("J1", x))));
      parts.push_back(forall(x, forall(y, implies(col("J" + std::to_string(l), x), leq(y, x)))));
      parts.push_back(exists(x, conj(col("J" + std::to_string(l), x), forall(y, leq(y, x)))));
    }
    // condition 2: consecutive blocks ending at w < w2
    {
      std::string w = "w", w2 = "w2", v = fresh.var();
      Formula consec =
          conj({ins(w), ins(w2), lt(w, w2), forall(v, implies(leq(v, w2), disj({leq(v, w), eq(v, w2), neg(ins(v))})))});
      std::vector<Formula> cases;
      for (int j = 1; j < l; ++j) {
        const Instr& I = P.ins[j - 1];
        Formula tr = transition(I, w, w2);
        if (I.op == Instr::Inc) tr = conj(tr, col("J" + std::to_string(j + 1), w2));
        cases.push_back(implies(col("J" + std::to_string(j), w), tr));
      }
      parts.push_back(forall(w, forall(w2, implies(consec, conj(cases)))));
    }
    return conj(parts);
  }
};

}  // namespace

Formula build_sentence(const Program& P) {
  validate(P);
  SentenceBuilder b{P.length(), {}};
  return b.build(P);
}

Formula invariance_reduction(const Formula& phi, const Signature& sig, const std::string& p) {
  if (sig.contains(p)) throw InputError("invariance reduction: symbol " + p + " already in the signature");
  for (auto& r : relation_names(phi))
    if (r == p) throw InputError("invariance reduction: formula already uses " + p);
  return conj(phi, exists("x", forall("y", conj(leq("x", "y"), atom(p, {"x"})))));
}

}  // namespace tdl
