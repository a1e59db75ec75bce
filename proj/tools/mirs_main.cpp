#include "mirs/cli.hpp"

int main(int argc, char** argv) { return mirs::run_cli(argc, argv); }
