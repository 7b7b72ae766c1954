#include <iostream>

#include "sdx/cli/cli.h"

int main(int argc, char** argv) {
  return sdx::cli::sdxsim_main({argv + 1, argv + argc}, std::cout, std::cerr);
}
