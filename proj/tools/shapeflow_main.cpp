#include "shapeflow/cli.hpp"

int main(int argc, char** argv) { return shapeflow::cli_main(argc, argv); }
