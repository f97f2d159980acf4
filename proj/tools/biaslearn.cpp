#include <string>
#include <vector>

#include "biaslearn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return biaslearn::cli::run(args);
}
