#include <iostream>

#include "fixtures.hpp"

// Regenerates the bundled fixture files.
int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: andor_make_fixtures <dir>\n";
    return 2;
  }
  andor::fixtures::write_all(argv[1]);
  return 0;
}
