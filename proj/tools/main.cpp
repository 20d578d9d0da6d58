#include <iostream>

#include "cgrem/cli.hpp"

int main(int argc, char** argv) {
  return cgrem::cli_main(argc, argv, std::cout, std::cerr);
}
