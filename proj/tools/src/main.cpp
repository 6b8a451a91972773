#include <iostream>
#include <string>
#include <vector>

#include "app.hpp"
#include "output_file.hpp"

int main(int argc, char** argv) {
  expcorr::cli::install_signal_cleanup();
  const std::vector<std::string> args(argv + 1, argv + argc);
  return expcorr::cli::run(args, std::cout, std::cerr);
}
