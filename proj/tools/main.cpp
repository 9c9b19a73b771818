#include "critwave/cli.hpp"

int main(int argc, char** argv) { return critwave::cli::parse_and_dispatch(argc, argv); }
