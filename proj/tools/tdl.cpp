// tdl: command-line front end.
//
// exit codes: 0 ok, 1 verification failure, 2 usage / bad input, 3 budget

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tdl/cm2fo.hpp"
#include "tdl/enumerate.hpp"
#include "tdl/eval.hpp"
#include "tdl/fodecomp.hpp"
#include "tdl/lowerbound.hpp"
#include "tdl/qorder.hpp"
#include "tdl/translate.hpp"
#include "tdl/treedepth.hpp"
#include "tdl/types.hpp"

using namespace tdl;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

const char* kVersion = "0.1.0";

struct VerifyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a job reads or writes goes through here, so the manifest sees it.
struct Job {
  bool as_json = false;
  json inputs = json::object();
  json outputs = json::object();
  json out = json::object();  // --json body
  std::string text;           // plain body

  std::string read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    inputs[path] = hex64(fnv1a(ss.str()));
    return ss.str();
  }
  void write(const std::string& path, const std::string& data) {
    if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    f << data;
    outputs[path] = hex64(fnv1a(data));
  }
  Structure structure(const std::string& path) { return parse_structure(read(path)); }
  // a file if one exists, otherwise the text itself
  Formula formula(const std::string& arg) {
    if (fs::is_regular_file(arg)) return parse_formula(read(arg));
    return parse_formula(arg);
  }
  void line(const std::string& s) { text += s + "\n"; }
};

Logic parse_logic(const std::string& s) {
  if (s == "fo") return Logic::FO;
  if (s == "mso") return Logic::MSO;
  throw InputError("logic must be fo or mso: " + s);
}

json structure_json(const Structure& A) {
  json j;
  j["n"] = A.n;
  j["text"] = to_text(A);
  return j;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

struct Cli {
  CLI::App app{"tree-depth logic toolkit"};
  Job job;
  std::function<void()> run;
  std::string manifest_path;

  // option storage
  std::string structure, formula, env, sigma = "E:2", logic = "fo", out, emit, report, from = "oifo";
  std::string thr_mode = "empirical", period = "auto", phi, psi, family, program, manifest_in;
  int max_size = 4, tr_max_size = 5, min_size = 0, td = -1, q = 1, d = 2, n = 0, b = -1, find = -1, verify_size = -1;
  long steps = 100000;
  int64_t budget_ms = -1;
  bool connected = false, graph = false, ordered = false, ordered_side = false, build_model = false;
  bool no_formulas = false;

  Cli() {
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.add_flag("--json", job.as_json, "machine-readable output");
    app.add_option("--manifest", manifest_path, "write a run manifest");
    app.fallthrough();

    auto* c = app.add_subcommand("eval", "evaluate a formula on a structure");
    c->add_option("--structure", structure)->required();
    c->add_option("--formula", formula, "file or inline text")->required();
    c->add_option("--env", env, "x=3,X={0,1}");
    c->callback([this] { run = [this] { cmd_eval(); }; });

    c = app.add_subcommand("enum", "structures up to isomorphism");
    c->add_option("--sigma", sigma);
    c->add_option("--min-size", min_size);
    c->add_option("--max-size", max_size);
    c->add_option("--td", td);
    c->add_flag("--connected", connected);
    c->add_flag("--graph-mode", graph);
    c->add_option("--out", out, "directory for structure files");
    c->callback([this] { run = [this] { cmd_enum(); }; });

    c = app.add_subcommand("td", "tree-depth");
    c->add_option("--structure", structure)->required();
    c->callback([this] { run = [this] { cmd_td(); }; });

    c = app.add_subcommand("roots", "tree-depth roots");
    c->add_option("--structure", structure)->required();
    c->callback([this] { run = [this] { cmd_roots(); }; });

    c = app.add_subcommand("types", "realized types of td <= d structures");
    c->add_option("--sigma", sigma);
    c->add_option("-L", logic)->check(CLI::IsMember({"fo", "mso"}));
    c->add_option("-q", q);
    c->add_option("-d", d);
    c->add_option("--max-size", max_size);
    c->add_option("--budget", budget_ms, "wall time in ms");
    c->add_flag("--connected", connected, "connected types only");
    c->add_flag("--ordered", ordered);
    c->add_flag("--graph-mode", graph);
    c->add_option("--out", out, "directory for representatives");
    c->callback([this] { run = [this] { cmd_types(); }; });

    c = app.add_subcommand("qorder", "q-ordered expansion");
    c->add_option("--structure", structure)->required();
    c->add_option("-L", logic)->check(CLI::IsMember({"fo", "mso"}));
    c->add_option("-q", q);
    c->add_option("--out", out);
    c->callback([this] { run = [this] { cmd_qorder(); }; });

    c = app.add_subcommand("translate", "order-invariant / MSO sentence to FO(+MOD)");
    c->add_option("--from", from)->check(CLI::IsMember({"oifo", "mso", "oimso"}));
    c->add_option("-d", d);
    c->add_option("--formula", formula)->required();
    c->add_option("--sigma", sigma);
    c->add_flag("--graph-mode", graph);
    c->add_option("--max-size", tr_max_size, "connected universe size");
    c->add_option("--verify-size", verify_size, "default: --max-size");
    c->add_option("--threshold-mode", thr_mode)->check(CLI::IsMember({"empirical", "paper"}));
    c->add_option("--period", period)->check(CLI::IsMember({"auto", "types", "automaton"}));
    c->add_option("--b", b, "root-count bound, -1 measured");
    c->add_option("--budget", budget_ms, "wall time in ms");
    c->add_option("--emit", emit);
    c->add_option("--report", report);
    c->callback([this] { run = [this] { cmd_translate(); }; });

    c = app.add_subcommand("verify", "compare two sentences on all small td <= d structures");
    c->add_option("--phi", phi)->required();
    c->add_option("--psi", psi)->required();
    c->add_option("--sigma", sigma);
    c->add_option("-d", d);
    c->add_option("--max-size", max_size);
    c->add_flag("--ordered-side", ordered_side, "evaluate phi on the q-ordered expansion");
    c->add_flag("--graph-mode", graph);
    c->callback([this] { run = [this] { cmd_verify(); }; });

    c = app.add_subcommand("lower", "tree encodings of numbers and the counting sentence");
    c->add_option("--d", d)->required();
    c->add_option("--n", n)->required();
    c->add_option("--emit-family", family, "directory");
    c->add_option("--emit-phi", emit);
    c->callback([this] { run = [this] { cmd_lower(); }; });

    c = app.add_subcommand("decompose", "FO-defined canonical tree decomposition");
    c->add_option("--structure", structure)->required();
    c->add_option("-d", d);
    c->add_flag("--direct-only", no_formulas, "skip the formula path");
    c->add_option("--emit", emit);
    c->callback([this] { run = [this] { cmd_decompose(); }; });

    c = app.add_subcommand("cm2fo", "two-counter machine to an FO[<=] sentence");
    c->add_option("--program", program)->required();
    c->add_option("--emit", emit);
    c->add_option("--find-model", find, "search models up to this size");
    c->add_flag("--build-model", build_model, "run the machine, emit its matching extension");
    c->add_option("--steps", steps);
    c->add_option("--out", out, "model file (default stdout)");
    c->callback([this] { run = [this] { cmd_cm2fo(); }; });

    c = app.add_subcommand("replay", "rerun a manifest and compare hashes");
    c->add_option("manifest", manifest_in)->required();
    c->callback([this] { run = [this] { cmd_replay(); }; });
  }

  Signature sig() const { return Signature::parse_spec(sigma); }

  void cmd_eval() {
    Structure A = job.structure(structure);
    Formula f = job.formula(formula);
    bool v = eval(A, f, env.empty() ? Env{} : parse_env(env));
    job.out["value"] = v;
    job.line(v ? "true" : "false");
  }

  void cmd_enum() {
    EnumOptions o;
    o.min_size = min_size;
    o.max_size = max_size;
    o.td = td;
    o.connected = connected;
    o.graph_mode = graph;
    int count = 0;
    json files = json::array();
    enum_structures(sig(), o, [&](const Structure& A) {
      if (!out.empty()) {
        char name[32];
        std::snprintf(name, sizeof name, "%05d.struct", count);
        std::string p = (fs::path(out) / name).string();
        job.write(p, to_text(A));
        files.push_back(p);
      }
      ++count;
      return true;
    });
    job.out["count"] = count;
    job.out["files"] = files;
    job.line(std::to_string(count));
  }

  void cmd_td() {
    int t = tree_depth(job.structure(structure));
    job.out["td"] = t;
    job.line(std::to_string(t));
  }

  void cmd_roots() {
    auto r = roots_of(job.structure(structure));
    job.out["roots"] = r;
    job.line(join(r));
  }

  void cmd_types() {
    if (budget_ms >= 0) budget::set_ms(budget_ms);
    TableOptions o;
    o.max_size = max_size;
    o.graph_mode = graph;
    auto T = realized_types(sig(), parse_logic(logic), q, d, ordered, o);
    json rows = json::array();
    for (size_t i = 0; i < T.conn.size(); ++i) {
      auto& e = T.conn[i];
      std::string file = "-";
      if (!out.empty()) {
        file = (fs::path(out) / ("type" + std::to_string(i) + ".struct")).string();
        job.write(file, to_text(e.rep));
      }
      rows.push_back({{"hash", type_hash(e.type)}, {"rep", file}, {"rep_size", e.rep.n}, {"threshold", e.threshold}});
      job.line(type_hash(e.type) + " " + file + " " + std::to_string(e.threshold));
    }
    job.out["connected"] = rows;
    job.out["structures_seen"] = T.structures_seen;
    if (!connected) {
      json all = json::array();
      for (TypeId t : T.all) all.push_back(type_hash(t));
      job.out["all"] = all;
      job.out["closed_under_union"] = T.closed_under_union;
      job.line("all " + std::to_string(T.all.size()) + (T.closed_under_union ? " closed" : " open"));
    }
  }

  void cmd_qorder() {
    Structure O = q_order(parse_logic(logic), q, job.structure(structure));
    if (!out.empty()) job.write(out, to_text(O));
    job.out["order"] = O.order.value();
    job.out["structure"] = structure_json(O);
    job.text += out.empty() ? to_text(O) : join(*O.order) + "\n";
  }

  void cmd_translate() {
    if (budget_ms >= 0) budget::set_ms(budget_ms);
    Pipeline kind = parse_pipeline(from);
    Formula f = job.formula(formula);
    TranslateOptions o;
    o.d = d;
    o.max_size = tr_max_size;
    o.graph_mode = graph;
    o.mode = thr_mode == "paper" ? ThresholdMode::Paper : ThresholdMode::Empirical;
    o.b = b;
    o.period = period == "types" ? PeriodSource::Types
               : period == "automaton" ? PeriodSource::Automaton
                                       : PeriodSource::Auto;
    auto r = translate(kind, f, sig(), o);
    int vs = verify_size >= 0 ? verify_size : tr_max_size;
    auto v = verify_equivalence(f, r.psi, sig(), d, vs, kind != Pipeline::MSO, graph);
    if (!emit.empty()) job.write(emit, render(r.psi) + "\n");

    json rep;
    rep["pipeline"] = pipeline_name(kind);
    rep["q"] = r.q;
    rep["d"] = r.d;
    rep["t"] = r.t;
    rep["p"] = r.p;
    rep["b"] = r.b;
    rep["conn_types"] = r.conn_types;
    rep["R_size"] = r.R_size;
    if (!r.period_source.empty()) rep["period_source"] = r.period_source;
    if (r.dfa_states) rep["dfa_states"] = r.dfa_states;
    rep["output"] = {{"qr", r.m.qr}, {"qad", r.m.qad}, {"size", r.m.size}};
    json ver = {{"max_size", vs}, {"td", d}, {"checked", v.checked}, {"ok", v.ok}};
    if (v.mismatch) {
      ver["mismatch_index"] = v.mismatch_index;
      ver["mismatch"] = to_text(*v.mismatch);
      ver["phi_value"] = v.phi_value;
      ver["psi_value"] = v.psi_value;
    }
    rep["verification"] = ver;
    if (!report.empty()) job.write(report, rep.dump(2) + "\n");
    job.out = rep;
    job.line("t=" + std::to_string(r.t) + " p=" + std::to_string(r.p) + " conn=" + std::to_string(r.conn_types) +
             " qr=" + std::to_string(r.m.qr) + " qad=" + std::to_string(r.m.qad) + " size=" + std::to_string(r.m.size));
    job.line(std::string(v.ok ? "verified " : "MISMATCH ") + std::to_string(v.checked) + " structures");
    if (emit.empty()) job.line(render(r.psi));
    if (!v.ok) throw VerifyFailure("translation disagrees at structure " + std::to_string(v.mismatch_index));
  }

  void cmd_verify() {
    Formula a = job.formula(phi), c = job.formula(psi);
    auto v = verify_equivalence(a, c, sig(), d, max_size, ordered_side, graph);
    job.out = {{"ok", v.ok}, {"checked", v.checked}, {"max_size", max_size}};
    if (v.mismatch) {
      job.out["mismatch_index"] = v.mismatch_index;
      job.out["mismatch"] = to_text(*v.mismatch);
    }
    job.line((v.ok ? "equivalent on " : "differ, checked ") + std::to_string(v.checked));
    if (v.mismatch) job.text += to_text(*v.mismatch);
    if (!v.ok) throw VerifyFailure("sentences differ");
  }

  void cmd_lower() {
    Formula f = build_phi_lower(d);
    Structure F = build_family(d, n);
    if (!family.empty()) {
      job.write((fs::path(family) / "family.struct").string(), to_text(F));
      job.write((fs::path(family) / "witness.struct").string(), to_text(build_witness_tree(d)));
    }
    if (!emit.empty()) job.write(emit, render(f) + "\n");
    bool v = eval(F, f);
    auto m = metrics(f);
    job.out = {{"d", d}, {"n", n}, {"tower", tower(d)}, {"family_size", F.n}, {"holds", v},
               {"phi", {{"qr", m.qr}, {"qad", m.qad}, {"size", m.size}}}};
    job.line(std::string(v ? "true" : "false") + " tower=" + std::to_string(tower(d)) +
             " |F|=" + std::to_string(F.n) + " |phi|=" + std::to_string(m.size));
  }

  void cmd_decompose() {
    Structure A = job.structure(structure);
    auto D = decompose(A, d, !no_formulas);
    auto rep = verify_decomposition(A, D.td, d, !no_formulas);
    std::string js = decomposition_json(D.td);
    if (!emit.empty()) job.write(emit, js + "\n");
    job.out = json::parse(js);
    job.out["formula_path"] = D.formula_path;
    job.out["verified"] = rep.ok;
    job.out["failures"] = rep.failures;
    for (size_t c = 0; c < D.td.classes.size(); ++c)
      job.line("class " + std::to_string(c) + " level " + std::to_string(D.td.level[c]) + " parent " +
               std::to_string(D.td.parent[c]) + ": " + join(D.td.classes[c]));
    for (auto& s : rep.failures) job.line("FAIL " + s);
    if (!rep.ok) throw VerifyFailure("decomposition check failed");
  }

  void cmd_cm2fo() {
    Program P = parse_program(job.read(program));
    Formula f = build_sentence(P);
    if (!emit.empty()) job.write(emit, render(f) + "\n");
    auto m = metrics(f);
    job.out["length"] = P.length();
    job.out["phi"] = {{"qr", m.qr}, {"qad", m.qad}, {"size", m.size}};
    job.line("qr=" + std::to_string(m.qr) + " size=" + std::to_string(m.size));
    if (emit.empty() && find < 0 && !build_model) job.line(render(f));
    if (find >= 0) {
      FindModelOptions o;
      o.ordered = true;
      o.graph_mode = true;
      o.max_size = find;
      auto M = find_model(f, cm_sig(P.length()), o);
      job.out["find_model"] = {{"max_size", find}, {"found", M.has_value()}};
      if (M) {
        job.out["find_model"]["size"] = M->n;
        job.out["find_model"]["word"] = word_string(encode_run(decode_word(*M, P.length())));
        job.line("model of size " + std::to_string(M->n));
      } else {
        job.line("no model up to size " + std::to_string(find));
      }
    }
    if (build_model) {
      auto r = run_machine(P, steps);
      job.out["halted"] = r.halted;
      job.out["steps"] = r.trace.size() - 1;
      if (!r.halted) throw VerifyFailure("no halt within " + std::to_string(steps) + " steps");
      Structure M = build_matching_extension(word_structure(encode_run(r.trace), P.length()), P);
      bool sat = eval(M, f);
      job.out["model"] = {{"size", M.n}, {"td", tree_depth(M)}, {"satisfies", sat}};
      if (!out.empty())
        job.write(out, to_text(M));
      else
        job.text += to_text(M);
      job.line("halted after " + std::to_string(r.trace.size() - 1) + " steps, model size " + std::to_string(M.n) +
               (sat ? ", satisfies phi" : ", VIOLATES phi"));
      if (!sat) throw VerifyFailure("matching extension violates the sentence");
    }
  }

  void cmd_replay();
};

json params_of(const CLI::App& sub) {
  json p = json::object();
  for (auto* o : sub.get_options()) {
    if (o->get_name() == "--help" || o->get_name() == "-h") continue;
    auto r = o->results();
    if (r.empty()) r = {o->get_default_str()};
    p[o->get_name()] = r.size() == 1 ? json(r[0]) : json(r);
  }
  return p;
}

int execute(const std::vector<std::string>& args, std::ostream& os, json* manifest);

void Cli::cmd_replay() {
  json m = json::parse(job.read(manifest_in));
  for (auto& [path, h] : m["inputs"].items())
    if (!fs::exists(path) || hex64(fnv1a([&] {
          std::ifstream f(path, std::ios::binary);
          std::stringstream ss;
          ss << f.rdbuf();
          return ss.str();
        }())) != h.get<std::string>())
      throw VerifyFailure("input changed: " + path);
  if (m.contains("budget_ms")) budget::set_ms(m["budget_ms"].get<int64_t>());
  std::ostringstream os;
  json again;
  int code = execute(m["args"].get<std::vector<std::string>>(), os, &again);
  bool same = code == m["exit"].get<int>() && again["outputs"] == m["outputs"];
  job.out = {{"replayed", m["command"]}, {"exit", code}, {"identical", same}};
  job.line(same ? "identical" : "DIFFERENT");
  if (!same) throw VerifyFailure("replay differs");
}

int execute(const std::vector<std::string>& args, std::ostream& os, json* manifest) {
  Cli cli;
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    cli.app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int c = cli.app.exit(e);
    return c == 0 ? 0 : 2;
  }
  std::string sub = cli.app.get_subcommands().front()->get_name();
  int code = 0;
  try {
    budget::reset();
    cli.run();
  } catch (const VerifyFailure& e) {
    std::cerr << "tdl: " << e.what() << "\n";
    code = 1;
  } catch (const BudgetError& e) {
    std::cerr << "tdl: " << e.what() << "\n";
    code = 3;
  } catch (const SyntaxError& e) {
    std::cerr << "tdl: syntax error: " << e.what() << "\n";
    code = 2;
  } catch (const InputError& e) {
    std::cerr << "tdl: " << e.what() << "\n";
    code = 2;
  } catch (const DomainError& e) {
    std::cerr << "tdl: " << e.what() << "\n";
    code = 2;
  }
  std::string body = cli.job.as_json ? cli.job.out.dump(2) + "\n" : cli.job.text;
  if (code != 3) os << body;

  json m;
  m["tool"] = "tdl";
  m["version"] = kVersion;
  m["command"] = sub;
  std::vector<std::string> rec;
  // the manifest flag itself is not part of the job
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--manifest") {
      ++i;
      continue;
    }
    if (args[i].rfind("--manifest=", 0) == 0) continue;
    rec.push_back(args[i]);
  }
  m["args"] = rec;
  m["params"] = params_of(*cli.app.get_subcommands().front());
  m["budget_ms"] = budget::limit_ms();
  m["inputs"] = cli.job.inputs;
  cli.job.outputs["<stdout>"] = hex64(fnv1a(body));
  m["outputs"] = cli.job.outputs;
  m["exit"] = code;
  if (!cli.manifest_path.empty() && sub != "replay") {
    std::ofstream f(cli.manifest_path);
    f << m.dump(2) << "\n";
  }
  if (manifest) *manifest = m;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::cout.setf(std::ios::unitbuf);
  return execute(args, std::cout, nullptr);
}
