#include "snc/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return snc::run_cli(argc, argv, std::cout, std::cerr); }
