#include "hbarsim/cli.hpp"

int main(int argc, char** argv) { return hbarsim::cli::main_entry(argc, argv); }
