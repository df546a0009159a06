#pragma once

#include "rffid/signal.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace testing_support {

inline std::filesystem::path source_dir() { return RFFID_SOURCE_DIR; }

inline std::filesystem::path profile_path(int k)
{
    return source_dir() / "profiles" / ("T" + std::to_string(k) + ".profile");
}

// Scratch directory under the build tree, emptied on creation.
inline std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::current_path() / "scratch" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline rffid::ComplexSequence random_waveform(std::size_t n, std::uint32_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    rffid::ComplexSequence x(n);
    for (auto& v : x)
        v = {g(gen), g(gen)};
    return x;
}

inline double max_abs_diff(std::span<const rffid::Complex> a, std::span<const rffid::Complex> b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace testing_support
