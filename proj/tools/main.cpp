#include "rabitherm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return rabitherm::run_cli(argc, argv, std::cout, std::cerr); }
