#include "tfcomm/cli_io.hpp"

int main(int argc, char** argv) { return tfcomm::cli::main_entry(argc, argv); }
