#include "confbound/jet.hpp"

#include <algorithm>

namespace confbound::detail {

MonomialTables::MonomialTables() {
  lookup.fill(-1);
  int n = 0;
  for (int d = 0; d <= kMaxJetOrder; ++d) {
    for (int a = d; a >= 0; --a) {
      for (int b = d - a; b >= 0; --b) {
        for (int c = d - a - b; c >= 0; --c) {
          std::array<int, kJetVars> e{a, b, c, d - a - b - c};
          exps[n] = e;
          degree[n] = d;
          double f = 1.0;
          for (int v : e) {
            for (int k = 2; k <= v; ++k) f *= k;
          }
          factorial[n] = f;
          lookup[((e[0] * 5 + e[1]) * 5 + e[2]) * 5 + e[3]] = n;
          ++n;
        }
      }
    }
  }
  for (int m = 0; m < kCount; ++m) {
    for (int v = 0; v < kJetVars; ++v) {
      if (degree[m] == kMaxJetOrder) {
        up[m][v] = -1;
      } else {
        auto e = exps[m];
        ++e[v];
        up[m][v] = index(e);
      }
    }
  }
  for (int i = 0; i < kCount; ++i) {
    for (int j = 0; j < kCount; ++j) {
      if (degree[i] + degree[j] > kMaxJetOrder) continue;
      std::array<int, kJetVars> e{};
      for (int v = 0; v < kJetVars; ++v) e[v] = exps[i][v] + exps[j][v];
      products.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j),
                          static_cast<std::uint8_t>(index(e))});
    }
  }
  std::stable_sort(products.begin(), products.end(), [this](const Triple& x, const Triple& y) {
    return degree[x.out] < degree[y.out];
  });
  for (int d = 0; d <= kMaxJetOrder; ++d) {
    products_end[d] = static_cast<int>(
        std::count_if(products.begin(), products.end(),
                      [&](const Triple& t) { return degree[t.out] <= d; }));
  }
}

const MonomialTables& monomials() {
  static const MonomialTables tables;
  return tables;
}

}  // namespace confbound::detail
