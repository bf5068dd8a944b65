#include "mjpot/cli.hpp"

int main(int argc, char** argv) { return mjpot::cli::run(argc, argv); }
