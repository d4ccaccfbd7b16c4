#include <iostream>

#include "disene/cli.hpp"

int main(int argc, char** argv) { return disene::RunCli(argc, argv, std::cout, std::cerr); }
