#include "pdav/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pdav::run_cli(argc, argv, std::cout, std::cerr); }
