#include "ikgate/cli/commands.hpp"

int main(int argc, char** argv) { return ikgate::cli::run_cli(argc, argv); }
