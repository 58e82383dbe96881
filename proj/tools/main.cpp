#include <iostream>

#include "tgf/app/commands.hpp"

int main(int argc, char** argv) {
  return tgf::app::run_command(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
