#include "qdemux/cli.hpp"

int main(int argc, char** argv) { return qdemux::cli::run(argc, argv); }
