#include "metrokit/cli.hpp"

int main(int argc, char** argv) { return metrokit::cli::main_entry(argc, argv); }
