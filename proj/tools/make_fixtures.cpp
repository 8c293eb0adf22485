// Writes the bundled example networks to <dir> (default: fixtures).
//
//   make_fixtures [dir]

#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "signnet/fixtures.hpp"
#include "signnet/serialize.hpp"

int main(int argc, char** argv) {
  namespace fx = signnet::fixtures;
  const std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures";
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, signnet::Network>> nets{
      {"fig1a_flipped", fx::fig1a_flipped()},
      {"fig1a_unflipped", fx::fig1a_unflipped()},
      {"fig1b_closed", fx::fig1b_closed()},
      {"xor_fig1c", fx::xor_fig1c()},
      {"xor_fig1c_unflipped", fx::xor_fig1c_unflipped()},
      {"linear_antidiagonal", fx::linear_antidiagonal()},
      {"dnnplus_example", fx::dnnplus_example()},
  };
  for (const auto& [name, net] : nets) {
    const auto path = dir / (name + ".json");
    signnet::save_network(net, path.string());
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}
