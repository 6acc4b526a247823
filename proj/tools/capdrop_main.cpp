#include "capdrop/cli.hpp"

int main(int argc, char** argv) { return capdrop::cli::run(argc, argv); }
