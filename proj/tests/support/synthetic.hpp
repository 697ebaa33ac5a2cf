#ifndef KWSFCM_TESTS_SYNTHETIC_HPP
#define KWSFCM_TESTS_SYNTHETIC_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "kwsfcm/image.hpp"
#include "kwsfcm/rng.hpp"

namespace testsupport {

/// Absolute-tolerance comparison for CHECK sites where a fixed margin is
/// the contract (doctest's Approx is relative).
inline bool near(double actual, double expected, double tolerance) {
    return std::abs(actual - expected) <= tolerance;
}

/// Left half `low`, right half `high`; the standard two-region fixture.
inline kwsfcm::GrayImage two_region(int w, int h, std::uint8_t low = 60, std::uint8_t high = 180) {
    kwsfcm::GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(x, y) = x < w / 2 ? low : high;
    return img;
}

inline kwsfcm::GrayImage random_image(int w, int h, std::uint64_t seed) {
    kwsfcm::GrayImage img(w, h);
    kwsfcm::CounterRng rng(seed, 0x7357u);
    for (auto& px : img.pixels) px = static_cast<std::uint8_t>(rng.next_u64() % 256);
    return img;
}

/// 5x5 box filter with replicated borders.
inline kwsfcm::GrayImage box_blur5(const kwsfcm::GrayImage& img) {
    kwsfcm::GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx) acc += img.at_clamped(x + dx, y + dy);
            out.at(x, y) = static_cast<std::uint8_t>(std::lround(acc / 25.0));
        }
    return out;
}

/// Scratch directory under the system temp root, unique per tag.
inline std::string scratch_dir(const std::string& tag) {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / ("kwsfcm_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testsupport

#endif
