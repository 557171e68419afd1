#include "qrc/rng.hpp"

namespace qrc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ fnv1a(stream)) + splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::vector<double> draw_inputs(std::size_t count, std::uint64_t seed) {
  auto engine = make_engine(seed, "inputs");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> inputs(count);
  for (auto& s : inputs) s = uniform(engine);
  return inputs;
}

}  // namespace qrc
