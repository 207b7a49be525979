#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdl/formula.hpp"
#include "tdl/structure.hpp"

namespace tdl {

// Deterministic automaton over letters encoded as bit masks: the low bits are
// the symbols of a signature (R(x,...,x) holds at the position), then one bit
// per variable track.
struct Dfa {
  int bits = 0;  // letters are 0 .. 2^bits - 1
  int start = 0;
  std::vector<bool> accept;
  std::vector<std::vector<int>> delta;  // [state][letter]
  int states() const { return static_cast<int>(accept.size()); }
  bool run(const std::vector<uint32_t>& word) const;
};

Dfa dfa_minimize(const Dfa& a);

// MSO[sigma, <=] over words: structures whose tuples are all loops (td <= 1),
// read in the order. No modulo quantifiers.
Dfa compile_word_sentence(const Formula& phi, const Signature& sig);

// letter of element e of an ordered td <= 1 structure
uint32_t word_letter(const Structure& A, int e);
std::vector<uint32_t> structure_word(const Structure& A);

// least p >= 1 with f^p = f^(2p) for the transition map f of every listed letter
int dfa_letter_period(const Dfa& a, const std::vector<uint32_t>& letters, int max_p = 1024);

}  // namespace tdl
