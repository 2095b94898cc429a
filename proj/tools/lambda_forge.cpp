#include <string>
#include <vector>

#include "lambda_forge/commands.hpp"

int main(int argc, char** argv) {
  return lf::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
