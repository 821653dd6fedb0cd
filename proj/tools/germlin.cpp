#include "germlin/cli.hpp"

int main(int argc, char** argv) { return germlin::cli::cli_main(argc, argv); }
