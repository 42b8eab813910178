#include <string>
#include <vector>

#include "gupnoise/io/cli.hpp"

int main(int argc, char** argv) {
  return gupnoise::cli::run(std::vector<std::string>(argv, argv + argc));
}
