#include "gnav/cli_commands.hpp"

int main(int argc, char** argv) { return gnav::run_cli(argc, argv); }
