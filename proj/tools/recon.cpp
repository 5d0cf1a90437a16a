#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return recon::cli::main(argc, argv, std::cout, std::cerr); }
