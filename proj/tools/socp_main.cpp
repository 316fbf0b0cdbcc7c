#include <iostream>

#include "socp/cli.hpp"

int main(int argc, char** argv) { return socp::cli::run(argc, argv, std::cout, std::cerr); }
