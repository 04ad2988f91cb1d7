#include <iostream>

#include "wgm/cli.hpp"

int main(int argc, char** argv) { return wgm::run_cli(argc, argv, std::cout, std::cerr); }
