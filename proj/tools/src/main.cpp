#include <iostream>

#include "trustsim_cli/cli.hpp"

int main(int argc, char** argv) {
  return trustsim::cli::main({argv + 1, argv + argc}, std::cout, std::cerr);
}
