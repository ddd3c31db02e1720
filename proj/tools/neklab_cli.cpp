#include "neklab/cli.hpp"

int main(int argc, char** argv) { return neklab::cli_main(argc, argv); }
