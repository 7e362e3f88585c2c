#include "cli.hpp"

int main(int argc, char** argv) { return ctmap::cli::cli_dispatch(argc, argv); }
