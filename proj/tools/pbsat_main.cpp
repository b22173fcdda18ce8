#include <iostream>

#include "pbsat/cli.hpp"

int main(int argc, char** argv) { return pbsat::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
