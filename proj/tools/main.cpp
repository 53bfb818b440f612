#include "cli.hpp"

int main(int argc, char **argv) { return nlab::cli::main_entry(argc, argv); }
