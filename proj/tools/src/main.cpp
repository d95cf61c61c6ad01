#include "commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return ipower::cli::run(argc, argv, std::cout, std::cerr);
}
