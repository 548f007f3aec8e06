#pragma once

#include <cstddef>
#include <vector>

#include "chanvese/grid.hpp"

namespace chanvese {

/// 2|A n B| / (|A| + |B|); 1 when both masks are empty.
inline double dice(const Mask& a, const Mask& b) {
  require_same_shape(a, b, "dice");
  std::size_t both = 0, na = 0, nb = 0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t k = 0; k < va.size(); ++k) {
    const bool x = va[k] != 0, y = vb[k] != 0;
    both += x && y;
    na += x;
    nb += y;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

inline Mask complement(const Mask& m) {
  Mask out = m;
  for (auto& v : out.values()) v = v ? 0 : 1;
  return out;
}

/// Number of 8-connected foreground components.
inline int count_components(const Mask& m) {
  const int w = m.width(), h = m.height();
  std::vector<char> seen(m.size(), 0);
  std::vector<int> stack;
  int count = 0;
  for (int start = 0; start < w * h; ++start) {
    if (!m.values()[start] || seen[start]) continue;
    ++count;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      const int i = k / w, j = k % w;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const int ni = i + di, nj = j + dj;
          if (ni < 0 || nj < 0 || ni >= h || nj >= w) continue;
          const int nk = ni * w + nj;
          if (m.values()[nk] && !seen[nk]) {
            seen[nk] = 1;
            stack.push_back(nk);
          }
        }
      }
    }
  }
  return count;
}

}  // namespace chanvese
