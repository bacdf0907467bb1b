#include <iostream>

#include "sketchkrr/cli.hpp"

int main(int argc, char** argv) { return sketchkrr::cli_main(argc, argv, std::cout, std::cerr); }
