#include "hop/acceptance.hpp"

#include <iostream>

int main() {
  hop::AcceptanceOptions opts;
  opts.progress = &std::cout;
  const auto results = hop::run_acceptance(opts);
  std::cout << "\n" << hop::acceptance_text(results);
  return hop::all_passed(results) ? 0 : 1;
}
