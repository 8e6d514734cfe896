#include <iostream>

#include "magtrap/cli.hpp"

int main(int argc, char** argv) { return magtrap::run_cli(argc, argv, std::cout, std::cerr); }
