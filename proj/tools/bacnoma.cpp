#include <bacnoma/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return bacnoma::cli::run(argc, argv, std::cout, std::cerr); }
