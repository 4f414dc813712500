#include <iostream>

#include "phi4lab/cli.h"

int main(int argc, char** argv) { return phi4lab::run_cli(argc, argv, std::cout, std::cerr); }
