#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return mu3::cli::run(argc, argv, std::cout, std::cerr); }
