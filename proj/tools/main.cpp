#include "tvsimplex/cli.hpp"

int main(int argc, char **argv) {
  return tvsimplex::cli::run(argc, argv, {std::cout, std::cerr});
}
