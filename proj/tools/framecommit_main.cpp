#include <iostream>

#include "framecommit/cli.hpp"

int main(int argc, char** argv) { return framecommit::cli::run(argc, argv, std::cout, std::cerr); }
