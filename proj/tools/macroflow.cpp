#include <iostream>

#include "macroflow/cli.hpp"

int main(int argc, char** argv) { return macroflow::cli::run(argc, argv, std::cout, std::cerr); }
