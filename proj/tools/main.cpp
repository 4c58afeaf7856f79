#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return andor::cli::run(argc, argv, std::cout, std::cerr); }
