#include "tsbench/cli.hpp"

int main(int argc, char** argv) { return tsbench::cli_main(argc, argv); }
