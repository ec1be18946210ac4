#include "commands.hpp"

int main(int argc, char** argv) { return bdsfix::cli::run(argc, argv); }
