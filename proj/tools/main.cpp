#include "psg/cli.hpp"

int main(int argc, char* argv[]) { return psg::cli::run(argc, argv); }
