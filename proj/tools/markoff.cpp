#include <iostream>

#include "markoff/cli.hpp"

int main(int argc, char** argv) { return mkf::run_cli(argc, argv, std::cout, std::cerr); }
