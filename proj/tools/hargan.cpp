#include <iostream>

#include "hargan/cli/commands.hpp"

int main(int argc, char** argv) { return hargan::cli::run(argc, argv, std::cout, std::cerr); }
