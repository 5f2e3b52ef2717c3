#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return timexplain::cli::run(argc, argv, std::cerr); }
