#include "idcode/cli.hpp"

int main(int argc, char** argv) { return idcode::cli::run_cli(argc, argv); }
