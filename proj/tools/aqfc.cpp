// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "aqfc/cli.hpp"

int main(int argc, char** argv) {
  return aqfc::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
