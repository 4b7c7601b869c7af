#include <torusbesov/cli.hpp>

int main(int argc, char** argv) { return torusbesov::run_command_line(argc, argv); }
