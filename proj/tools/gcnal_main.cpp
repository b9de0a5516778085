#include "gcnal/cli.hpp"

int main(int argc, char** argv) { return gcnal::cli_main(argc, argv); }
