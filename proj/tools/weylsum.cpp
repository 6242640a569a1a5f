#include "cli.hpp"

int main(int argc, char** argv) { return weylsum::cli::run(argc, argv, std::cout, std::cerr); }
