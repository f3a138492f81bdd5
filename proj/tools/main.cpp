#include "csit/cli.hpp"

int main(int argc, char** argv) { return csit::run_cli(argc, argv); }
