#include "aqec/cli.hpp"

int main(int argc, char** argv) { return aqec::cli::main_entry(argc, argv); }
