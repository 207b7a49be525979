#pragma once

#include <string>
#include <vector>

#include "tdl/formula.hpp"
#include "tdl/structure.hpp"

namespace tdl {

// Two-counter machines. Instructions are numbered from 1.
struct Instr {
  enum Op { Inc, Dec, Halt } op = Halt;
  int counter = 1;     // 1 or 2
  int j0 = 0, j1 = 0;  // Dec: target when zero, target after decrementing
  bool operator==(const Instr&) const = default;
};

struct Program {
  std::vector<Instr> ins;
  int length() const { return static_cast<int>(ins.size()); }
};

// one instruction per line: "inc 1", "dec 1 3 2", "halt"; '#' starts a comment
Program parse_program(const std::string& text);
Program load_program(const std::string& path);
std::string program_text(const Program& P);
void validate(const Program& P);  // InputError unless exactly the last instruction halts

struct Config {
  long n1 = 0, n2 = 0;
  int j = 1;
  bool operator==(const Config&) const = default;
};

struct Run {
  std::vector<Config> trace;
  bool halted = false;
};
Run run_machine(const Program& P, long max_steps);

// Letters L1 R1 L2 R2 (1_L 1_R 2_L 2_R) and J1 .. Jl (instruction colours).
Signature cm_sig(int l);
std::vector<std::string> encode_config(const Config& c);
std::vector<std::string> encode_run(const std::vector<Config>& run);
std::string word_string(const std::vector<std::string>& w);  // "1_L 1_R 2"
// ordered edgeless structure, one element per letter
Structure word_structure(const std::vector<std::string>& w, int l);

// blocks of an ordered coloured word read back as configurations
std::vector<Config> decode_word(const Structure& W, int l);

// w must encode the halting run of P; adds the matching edges (equal ranks
// within consecutive blocks)
Structure build_matching_extension(const Structure& W, const Program& P);

// FO[sigma^<=] sentence whose finite models are the matching extensions of the
// run word of P; satisfiable iff P halts.
Formula build_sentence(const Program& P);

// phi & exists x forall y (x <= y & P(x)) over sig + {P}
Formula invariance_reduction(const Formula& phi, const Signature& sig, const std::string& p = "P");

}  // namespace tdl
