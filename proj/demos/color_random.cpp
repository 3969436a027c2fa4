// Generate a random tournament, color it avoiding monochromatic cycles, and
// verify the result.

#include <iostream>

#include "stellar/engine/driver.hpp"
#include "stellar/pattern.hpp"

int main() {
  using namespace stellar;
  auto pattern = pat::catalog("fig3");
  Tournament t = random_tournament(96, 2024);
  auto res = engine::color_h_free(pattern.h, t);
  std::cout << "colored " << t.size() << " vertices with " << res.classes << " classes\n";
  std::cout << "proper: " << (verify_coloring(t, res.coloring) ? "yes" : "no") << "\n";
  return 0;
}
