#include "ebcr/cli_io.hpp"

#include <iostream>

int main(int argc, char** argv) { return ebcr::run_cli(argc, argv, std::cout, std::cerr); }
