#include <iostream>

#include "fjlp_cli.hpp"

int main(int argc, char** argv) {
  return fjlp::cli::run(argc, argv, {std::cout, std::cerr});
}
