#include "nagd/commands.hpp"

int main(int argc, char** argv) { return nagd::run_cli(argc, argv); }
