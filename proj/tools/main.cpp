#include "densitylab/cli.hpp"

int main(int argc, char** argv) { return densitylab::run_cli(argc, argv); }
