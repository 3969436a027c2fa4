// Recognition verdicts for every built-in pattern.

#include <iostream>

#include "stellar/pattern.hpp"

int main() {
  using namespace stellar;
  for (const auto& name : pat::catalog_names()) {
    auto p = pat::catalog(name);
    bool constellation = pat::is_constellation_ordering(p.h, p.theta);
    std::optional<Ordering> found;
    if (!constellation && p.h.size() <= 9) found = pat::find_constellation_ordering(p.h);
    std::cout << name << ": ";
    if (constellation) {
      std::cout << "constellation under its canonical ordering, galaxy: "
                << (pat::is_galaxy_ordering(p.h, p.theta) ? "yes" : "no") << "\n";
    } else if (found) {
      std::cout << "constellation under a searched ordering\n";
    } else {
      std::cout << "not a constellation\n";
    }
  }
  return 0;
}
