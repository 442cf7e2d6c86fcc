#include "dirac6c/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return dirac6c::run_cli(argc, argv, std::cout, std::cerr); }
