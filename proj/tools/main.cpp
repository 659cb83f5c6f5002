#include "symnet/cli.hpp"

int main(int argc, char** argv) { return symnet::cli_main(argc, argv); }
