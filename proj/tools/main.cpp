#include <iostream>

#include "asvobs/cli.hpp"

int main(int argc, char** argv) { return asvobs::run_cli(argc, argv, std::cout, std::cerr); }
