#include "cli.hpp"

int main(int argc, char** argv) { return wabe::cli_main(argc, argv); }
