#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kwsfcm/metrics.hpp"
#include "kwsfcm/rng.hpp"
#include "support/synthetic.hpp"

using namespace kwsfcm;
using testsupport::near;

namespace {

SegmentationMap map_from(int w, int h, int c, std::vector<int> labels) {
    SegmentationMap m(w, h, c);
    m.labels = std::move(labels);
    return m;
}

}  // namespace

TEST_CASE("SA of a map against itself is 100") {
    SegmentationMap m = map_from(2, 2, 2, {0, 1, 1, 0});
    CHECK(segmentation_accuracy(m, m) == 100.0);
}

TEST_CASE("SA is invariant under global label swaps") {
    SegmentationMap m = map_from(2, 2, 2, {0, 1, 1, 0});
    SegmentationMap swapped = map_from(2, 2, 2, {1, 0, 0, 1});
    CHECK(segmentation_accuracy(swapped, m) == 100.0);
}

TEST_CASE("SA counts a single differing pixel as one percent of 10x10") {
    std::vector<int> a(100, 0), b(100, 0);
    for (int k = 50; k < 100; ++k) a[k] = b[k] = 1;
    b[0] = 1;
    CHECK(segmentation_accuracy(map_from(10, 10, 2, a), map_from(10, 10, 2, b)) == 99.0);
}

TEST_CASE("SA relabeling invariance on random maps") {
    CounterRng rng(5, 0);
    std::vector<int> a(144), perm_a(144);
    const int c = 4;
    const int perm[4] = {2, 0, 3, 1};
    for (int k = 0; k < 144; ++k) {
        a[k] = static_cast<int>(rng.next_u64() % c);
        perm_a[k] = perm[a[k]];
    }
    std::vector<int> ref(144);
    for (int k = 0; k < 144; ++k) ref[k] = static_cast<int>(rng.next_u64() % c);
    const double direct = segmentation_accuracy(map_from(12, 12, c, a), map_from(12, 12, c, ref));
    const double relabeled =
        segmentation_accuracy(map_from(12, 12, c, perm_a), map_from(12, 12, c, ref));
    CHECK(direct == relabeled);
    CHECK(segmentation_accuracy(map_from(12, 12, c, perm_a), map_from(12, 12, c, a)) == 100.0);
}

TEST_CASE("SA below 100 whenever the matched partitions differ") {
    SegmentationMap a = map_from(2, 2, 2, {0, 0, 1, 1});
    SegmentationMap b = map_from(2, 2, 2, {0, 1, 1, 1});
    CHECK(segmentation_accuracy(a, b) < 100.0);
}

TEST_CASE("SA handles unequal cluster counts by partial matching") {
    SegmentationMap fine = map_from(4, 1, 4, {0, 1, 2, 3});
    SegmentationMap coarse = map_from(4, 1, 2, {0, 0, 1, 1});
    CHECK(segmentation_accuracy(fine, coarse) == 50.0);
    CHECK(segmentation_accuracy(coarse, fine) == 50.0);
}

TEST_CASE("SA rejects mismatched dimensions") {
    CHECK_THROWS_AS(
        segmentation_accuracy(map_from(2, 2, 1, {0, 0, 0, 0}), map_from(4, 1, 1, {0, 0, 0, 0})),
        DimensionMismatch);
}

TEST_CASE("entropy of one uniform region is zero") {
    GrayImage img(4, 4, 9);
    SegmentationMap m(4, 4, 1);
    EntropyReport r = entropy_measure(img, m);
    CHECK(r.region_entropy == 0.0);
    CHECK(r.layout_entropy == 0.0);
    CHECK(r.combined == 0.0);
}

TEST_CASE("two equal internally-uniform regions score E = log 2") {
    GrayImage img = testsupport::two_region(8, 4, 10, 200);
    SegmentationMap m(8, 4, 2);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 8; ++x) m.at(x, y) = x < 4 ? 0 : 1;
    EntropyReport r = entropy_measure(img, m);
    CHECK(near(r.region_entropy, 0.0, 1e-12));
    CHECK(near(r.layout_entropy, std::log(2.0), 1e-12));
    CHECK(near(r.combined, std::log(2.0), 1e-12));
}

TEST_CASE("a region holding two gray levels in equal counts has entropy log 2") {
    GrayImage img(4, 2);
    img.pixels = {5, 5, 5, 5, 9, 9, 9, 9};
    SegmentationMap m(4, 2, 1);
    EntropyReport r = entropy_measure(img, m);
    REQUIRE(r.regions.size() == 1);
    CHECK(near(r.regions[0].entropy, std::log(2.0), 1e-12));
    CHECK(r.regions[0].size == 8);
}

TEST_CASE("entropy respects the configured log base") {
    GrayImage img(4, 2);
    img.pixels = {5, 5, 5, 5, 9, 9, 9, 9};
    SegmentationMap m(4, 2, 1);
    EntropyReport r2 = entropy_measure(img, m, 2.0);
    CHECK(near(r2.regions[0].entropy, 1.0, 1e-12));
}

TEST_CASE("layout entropy is bounded by log c and E = H_r + H_l") {
    GrayImage img = testsupport::random_image(12, 12, 3);
    SegmentationMap m(12, 12, 3);
    for (std::size_t k = 0; k < m.size(); ++k) m.labels[k] = static_cast<int>(k % 3);
    EntropyReport r = entropy_measure(img, m);
    CHECK(r.layout_entropy <= std::log(3.0) + 1e-12);
    CHECK(r.combined == r.region_entropy + r.layout_entropy);
    for (const RegionEntropy& region : r.regions) CHECK(region.entropy >= 0.0);
}

TEST_CASE("entropy reports an empty region") {
    GrayImage img(4, 2, 1);
    SegmentationMap m(4, 2, 3);  // labels all zero, clusters 1 and 2 empty
    CHECK_THROWS_AS(entropy_measure(img, m), EmptyRegion);
}

TEST_CASE("region sizes add up to the pixel count") {
    GrayImage img = testsupport::random_image(9, 7, 8);
    SegmentationMap m(9, 7, 2);
    for (std::size_t k = 0; k < m.size(); ++k) m.labels[k] = static_cast<int>(k) % 2;
    EntropyReport r = entropy_measure(img, m);
    long long total = 0;
    for (const RegionEntropy& region : r.regions) total += region.size;
    CHECK(total == static_cast<long long>(img.size()));
}

TEST_CASE("the direction table is closed under negation with perpendicular companions") {
    const auto& dirs = edge_directions();
    CHECK(dirs.size() == 8);
    for (const EdgeDirection& d : dirs) {
        CHECK(d.vx * d.px + d.vy * d.py == 0);   // p is perpendicular to v
        CHECK((d.px == -d.vy && d.py == d.vx));  // quarter-turn rotation
        bool has_opposite = false;
        for (const EdgeDirection& o : dirs)
            if (o.vx == -d.vx && o.vy == -d.vy && o.px == -d.px && o.py == -d.py)
                has_opposite = true;
        CHECK(has_opposite);
    }
}

TEST_CASE("inverse blurriness arithmetic: f=128, grad_h=64 gives BR 3.0") {
    GrayImage img(9, 9, 128);
    img.at(3, 4) = 96;
    img.at(5, 4) = 160;
    DirectionalBlurriness br = inverse_blurriness(img, 4, 4);
    REQUIRE(br.defined[0]);
    CHECK(near(br.br[0], 3.0, 1e-12));  // |128 - 32| / 32
    CHECK_FALSE(br.defined[1]);         // zero-gradient directions carry no evidence
    CHECK_FALSE(br.defined[2]);
    CHECK_FALSE(br.defined[3]);
}

TEST_CASE("EQF is 1 when every kept edge has a sharp direction") {
    GrayImage step(32, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) step.at(x, y) = x < 16 ? 0 : 255;
    EqfReport r = eqf(step, EqfParams{});
    CHECK(r.blur_count == 0);
    CHECK(r.eqf == 1.0);
    CHECK(r.edge_count > 0);
}

TEST_CASE("a hard step outscores its box-blurred copy for every gamma") {
    GrayImage step(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) step.at(x, y) = x < 32 ? 0 : 255;
    GrayImage blurred = testsupport::box_blur5(step);
    for (double gamma : {20.0, 40.0, 80.0, 160.0}) {
        EqfParams p;
        p.gamma = gamma;
        const EqfReport sharp = eqf(step, p);
        const EqfReport soft = eqf(blurred, p);
        CHECK(sharp.eqf > soft.eqf);
    }
}

TEST_CASE("EQF stays within [0,1] on random images") {
    for (int i = 0; i < 25; ++i) {
        GrayImage img = testsupport::random_image(24, 24, 700 + i);
        EqfReport r = eqf(img, EqfParams{});
        CHECK(r.eqf >= 0.0);
        CHECK(r.eqf <= 1.0);
        CHECK(r.blur_count <= r.edge_count);
        CHECK(r.eqf == 1.0 - double(r.blur_count) / double(r.edge_count));
    }
}

TEST_CASE("a flat image has no edges and EQF is undefined") {
    GrayImage img(16, 16, 80);
    CHECK_THROWS_AS(eqf(img, EqfParams{}), NoEdges);
}

TEST_CASE("EQF is deterministic and schedule independent") {
    GrayImage img = testsupport::random_image(40, 40, 55);
    thread_override() = 1;
    EqfReport serial = eqf(img, EqfParams{});
    thread_override() = 4;
    EqfReport parallel = eqf(img, EqfParams{});
    thread_override() = 0;
    CHECK(serial.edge_count == parallel.edge_count);
    CHECK(serial.blur_count == parallel.blur_count);
    CHECK(serial.eqf == parallel.eqf);
    CHECK(serial.candidates == parallel.candidates);
}

TEST_CASE("EQF rejects images smaller than the homogeneity window") {
    GrayImage img(4, 4, 0);
    CHECK_THROWS(eqf(img, EqfParams{}));
}
