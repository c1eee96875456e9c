#include <iostream>

#include "multimatch/cli.hpp"

int main(int argc, char** argv) { return multimatch::run_cli(argc, argv, std::cout, std::cerr); }
