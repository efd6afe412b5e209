#include <iostream>

#include "pmedian_cli/run.hpp"

int main(int argc, char** argv) { return pmedian::cli::main_entry(argc, argv, std::cout, std::cerr); }
