#include "rlos/rng.hpp"

#include <cmath>
#include <numbers>

namespace rlos {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    : key_(splitmix64(seed)) {
    for (auto k : path) key_ = splitmix64(key_ ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
}

std::uint64_t CounterRng::next_u64() {
    return splitmix64(key_ ^ (kGolden * ++counter_));
}

double CounterRng::next_uniform() {
    // (m + 0.5) / 2^53 never hits 0 or 1
    const auto m = next_u64() >> 11;
    return (static_cast<double>(m) + 0.5) * 0x1.0p-53;
}

std::complex<double> CounterRng::next_complex_gaussian() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(theta), radius * std::sin(theta)};
}

}  // namespace rlos
