#include "gausspath/cli.hpp"

int main(int argc, char** argv) { return gausspath::cli::cli_main(argc, argv); }
