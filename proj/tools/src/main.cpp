#include <iostream>

#include "boundsmith/cli.hpp"

int main(int argc, char** argv) { return boundsmith::run_cli(argc, argv, std::cout, std::cerr); }
