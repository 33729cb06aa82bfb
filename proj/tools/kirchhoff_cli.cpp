#include <iostream>

#include "kirchhoff/app.hpp"

int main(int argc, char** argv) { return kirchhoff::app::main(argc, argv, std::cout, std::cerr); }
