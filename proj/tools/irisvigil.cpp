#include "irisvigil/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return irisvigil::cli::run(argc, argv, std::cout, std::cerr); }
