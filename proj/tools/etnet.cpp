#include "etnet/cli.hpp"

int main(int argc, char** argv) { return etnet::run_command(argc, argv); }
