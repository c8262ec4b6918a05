#include "mindex/cli.hpp"

int main(int argc, char** argv) { return mindex::run_cli(argc, argv); }
