#include "ragcheck/cli_app.hpp"

int main(int argc, char** argv) { return ragcheck::cli::run_command(argc, argv); }
