#include "cli.hpp"

int main(int argc, char** argv) { return pnpsvgd::cli::run_cli(argc, argv); }
