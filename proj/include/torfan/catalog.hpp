#pragma once

#include <string>
#include <vector>

#include "torfan/error.hpp"
#include "torfan/fan.hpp"

namespace torfan {

inline std::vector<std::string> catalog_names() {
  return {"p1", "pn:<n>", "dp6", "hirzebruch:<r>"};
}

// Built-in fans; constructed in trusted mode (selftest revalidates strictly).
inline FanPtr catalog_fan(const std::string& name) {
  FanData d;
  if (name == "p1") {
    d.dim = 1;
    d.rays = {{1}, {-1}};
    d.max_cones = {{0}, {1}};
    return Fan::make(std::move(d), Fan::Check::trusted);
  }
  if (name.rfind("pn:", 0) == 0) {
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(name.substr(3), &used);
      if (used != name.size() - 3) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParseError("catalog: bad projective space selector '" + name + "'");
    }
    if (n < 1 || n > 16) throw ParseError("catalog: pn:<n> needs 1 <= n <= 16");
    d.dim = n;
    for (int i = 0; i < n; ++i) {
      std::vector<Int> e(n, Int(0));
      e[i] = 1;
      d.rays.push_back(std::move(e));
    }
    d.rays.emplace_back(n, Int(-1));
    for (int skip = 0; skip <= n; ++skip) {
      Cone c;
      for (int i = 0; i <= n; ++i)
        if (i != skip) c.push_back(i);
      d.max_cones.push_back(std::move(c));
    }
    return Fan::make(std::move(d), Fan::Check::trusted);
  }
  if (name == "dp6") {
    d.dim = 2;
    d.rays = {{0, 1}, {1, 1}, {1, 0}, {0, -1}, {-1, -1}, {-1, 0}};
    d.labels = {"L1", "E3", "L2", "E1", "L3", "E2"};
    d.max_cones = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}};
    return Fan::make(std::move(d), Fan::Check::trusted);
  }
  if (name.rfind("hirzebruch:", 0) == 0) {
    int r = 0;
    try {
      std::size_t used = 0;
      r = std::stoi(name.substr(11), &used);
      if (used != name.size() - 11) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParseError("catalog: bad Hirzebruch selector '" + name + "'");
    }
    if (r < 0) throw ParseError("catalog: hirzebruch:<r> needs r >= 0");
    d.dim = 2;
    d.rays = {{1, 0}, {0, 1}, {-1, r}, {0, -1}};
    d.max_cones = {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
    return Fan::make(std::move(d), Fan::Check::trusted);
  }
  throw ParseError("catalog: unknown fan '" + name + "'");
}

}  // namespace torfan
