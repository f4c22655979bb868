#include "bifurc/cli.hpp"

int main(int argc, char** argv) { return bifurc::cli::main_entry(argc, argv); }
