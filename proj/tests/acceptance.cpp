// One line per acceptance criterion; exit status 1 if any fails.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "eqdec/acceptance.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 20240601;
  std::ifstream in(std::string(EQDEC_DATA_DIR) + "/axioms.horn");
  std::stringstream catalog;
  catalog << in.rdbuf();

  bool all = true;
  for (const auto& c : eqdec::run_acceptance(seed, catalog.str())) {
    all = all && c.status == eqdec::Status::Pass;
    std::cout << (c.status == eqdec::Status::Pass ? "PASS " : "FAIL ") << c.name;
    for (const auto& [k, v] : c.details) std::cout << " | " << k << "=" << v;
    std::cout << std::endl;
  }
  std::cout << (all ? "all criteria pass" : "some criteria fail") << std::endl;
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
