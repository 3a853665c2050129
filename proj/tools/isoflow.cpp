#include "isoflow/cli.hpp"

int main(int argc, char** argv) { return isoflow::run_command(argc, argv); }
