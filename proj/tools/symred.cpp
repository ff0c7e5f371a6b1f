#include "symred/cli.hpp"

int main(int argc, char** argv) { return symred::cli::run(argc, argv); }
