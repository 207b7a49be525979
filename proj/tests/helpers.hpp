#pragma once

#include <string>
#include <vector>

#include "tdl/structure.hpp"

namespace tdl::testing {

inline Signature graph_sig() { return Signature({{"E", 2}}); }

// undirected graph on {E/2}, both orientations stored
inline Structure graph(int n, const std::vector<std::pair<int, int>>& edges) {
  Structure A(graph_sig(), n);
  for (auto [a, b] : edges) {
    A.add(0, {a, b});
    A.add(0, {b, a});
  }
  return A;
}

inline Structure path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return graph(n, e);
}

inline Structure clique(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j});
  return graph(n, e);
}

inline Structure star(int leaves) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= leaves; ++i) e.push_back({0, i});
  return graph(leaves + 1, e);
}

inline Structure cycle(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return graph(n, e);
}

}  // namespace tdl::testing
