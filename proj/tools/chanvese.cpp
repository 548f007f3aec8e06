#include "chanvese/cli.hpp"

int main(int argc, char** argv) { return chanvese::cli::main(argc, argv); }
