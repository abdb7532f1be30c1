#include <iostream>

#include "aqfs/cli/app.hpp"

int main(int argc, char** argv) { return aqfs::cli::run(argc, argv, std::cout, std::cerr); }
