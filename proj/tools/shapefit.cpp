#include "shapefit/cli.hpp"

int
main(int argc, char** argv)
{
  return shapefit::cli::run(argc, argv);
}
