#include "tfdw/commands.hpp"

int main(int argc, char** argv) { return tfdw::cli::run(argc, argv); }
