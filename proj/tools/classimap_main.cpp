#include "classimap/cli.hpp"

int main(int argc, char** argv) { return classimap::cli_main(argc, argv); }
