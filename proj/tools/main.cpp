#include "myosynth/cli.hpp"

int main(int argc, char** argv) { return myosynth::cli::run(argc, argv); }
