#include "amol_cli.hpp"

int main(int argc, char** argv) { return amol::cli::parse_and_dispatch(argc, argv); }
