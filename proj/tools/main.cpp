#include <iostream>

#include "mcma/cli.hpp"

int main(int argc, char** argv) {
  return mcma::cli::cli_main(argc, argv, std::cout, std::cerr);
}
