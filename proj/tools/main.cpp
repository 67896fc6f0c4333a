#include <iostream>

#include "jdac/cli.hpp"

int main(int argc, char** argv) { return jdac::run_cli(argc, argv, std::cout, std::cerr); }
