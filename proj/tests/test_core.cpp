#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lanemb/core.hpp"
#include "oracles.hpp"

using namespace lanemb;

TEST_CASE("coordinate maps use the pixel-center convention") {
    auto m = make_coordinate_maps(1, 1);
    CHECK(m.x.at(0, 0) == 0.5f);
    CHECK(m.y.at(0, 0) == 0.5f);

    auto m2 = make_coordinate_maps(2, 3);
    CHECK(m2.x.at(0, 0) == 0.5f);
    CHECK(m2.x.at(0, 1) == 1.5f);
    CHECK(m2.x.at(0, 2) == 2.5f);
    CHECK(m2.y.at(0, 0) == 0.5f);
    CHECK(m2.y.at(1, 0) == 1.5f);

    auto m3 = make_coordinate_maps(4, 4);
    CHECK(m3.x.at(3, 3) == 3.5f);
    CHECK(m3.y.at(3, 3) == 3.5f);
}

TEST_CASE("coordinate maps reject zero dimensions") {
    CHECK_THROWS_AS(make_coordinate_maps(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_coordinate_maps(4, 0), std::invalid_argument);
}

TEST_CASE("spatial embedding: zero offsets give coords") {
    auto coords = make_coordinate_maps(3, 3);
    FieldF32 off(3, 3, 2, 0.0f);
    auto e = spatial_embedding(off, coords);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            CHECK(e.e.at(r, c, 0) == coords.x.at(r, c));
            CHECK(e.e.at(r, c, 1) == coords.y.at(r, c));
        }
}

TEST_CASE("spatial embedding: uniform translation") {
    auto coords = make_coordinate_maps(2, 2);
    FieldF32 off(2, 2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            off.at(r, c, 0) = 1.0f;
            off.at(r, c, 1) = -1.0f;
        }
    auto e = spatial_embedding(off, coords);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            CHECK(e.e.at(r, c, 0) == coords.x.at(r, c) + 1.0f);
            CHECK(e.e.at(r, c, 1) == coords.y.at(r, c) - 1.0f);
        }
}

TEST_CASE("spatial embedding: e - coords == offsets on random 8x8") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<float> dist(-5.0f, 5.0f);
    auto coords = make_coordinate_maps(8, 8);
    FieldF32 off(8, 8, 2);
    for (auto& v : off.data) v = dist(rng);
    auto e = spatial_embedding(off, coords);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            // one float add/sub round trip, so allow a ulp-scale tolerance
            CHECK(e.e.at(r, c, 0) - coords.x.at(r, c) ==
                  doctest::Approx(off.at(r, c, 0)).epsilon(1e-5));
            CHECK(e.e.at(r, c, 1) - coords.y.at(r, c) ==
                  doctest::Approx(off.at(r, c, 1)).epsilon(1e-5));
        }
}

TEST_CASE("spatial embedding: shape errors") {
    auto coords = make_coordinate_maps(2, 2);
    CHECK_THROWS_AS(spatial_embedding(FieldF32(2, 2, 1), coords), std::invalid_argument);
    CHECK_THROWS_AS(spatial_embedding(FieldF32(3, 2, 2), coords), std::invalid_argument);
}

namespace {

InstanceLabeling all_one_instance(int h, int w) {
    return InstanceLabeling(h, w, 1, std::vector<uint16_t>(static_cast<size_t>(h) * w, 1));
}

}  // namespace

TEST_CASE("instance stats: constant fields") {
    auto lab = all_one_instance(3, 3);
    EmbeddingField e{FieldF32(3, 3, 2)};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            e.e.at(r, c, 0) = 3.0f;
            e.e.at(r, c, 1) = 4.0f;
        }
    FieldF32 sigma(3, 3, 1, 2.0f);
    auto st = instance_stats(e, sigma, lab);
    REQUIRE(st.num_instances() == 1);
    CHECK(st.centroid_x[0] == doctest::Approx(3.0));
    CHECK(st.centroid_y[0] == doctest::Approx(4.0));
    CHECK(st.sigma_mean[0] == doctest::Approx(2.0));
    CHECK(st.pixel_count[0] == 9);
}

TEST_CASE("instance stats: two-pixel midpoint") {
    std::vector<uint16_t> labels(4, 0);
    labels[0] = 1;
    labels[1] = 1;
    InstanceLabeling lab(2, 2, 1, labels);
    EmbeddingField e{FieldF32(2, 2, 2, 0.0f)};
    e.e.at(0, 1, 0) = 2.0f;  // (0,0) and (2,0)
    FieldF32 sigma(2, 2, 1, 1.0f);
    auto st = instance_stats(e, sigma, lab);
    CHECK(st.centroid_x[0] == doctest::Approx(1.0));
    CHECK(st.centroid_y[0] == doctest::Approx(0.0));
}

TEST_CASE("instance stats: centroid matches brute-force mean on random instance") {
    auto lab = oracles::random_labeling(5, 4, 1, 42);
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> dist(-10.0f, 10.0f);
    EmbeddingField e{FieldF32(5, 4, 2)};
    for (auto& v : e.e.data) v = dist(rng);
    FieldF32 sigma(5, 4, 1, 1.5f);

    double sx = 0, sy = 0;
    size_t n = 0;
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 4; ++c)
            if (lab.at(r, c) == 1) {
                sx += e.e.at(r, c, 0);
                sy += e.e.at(r, c, 1);
                ++n;
            }
    auto st = instance_stats(e, sigma, lab);
    CHECK(st.centroid_x[0] == doctest::Approx(sx / n).epsilon(1e-12));
    CHECK(st.centroid_y[0] == doctest::Approx(sy / n).epsilon(1e-12));
    CHECK(st.pixel_count[0] == n);
}

TEST_CASE("instance stats: sigma <= 0 on foreground is a domain error") {
    auto lab = all_one_instance(2, 2);
    EmbeddingField e{FieldF32(2, 2, 2, 0.0f)};
    FieldF32 sigma(2, 2, 1, 1.0f);
    sigma.at(1, 1) = 0.0f;
    CHECK_THROWS_AS(instance_stats(e, sigma, lab), std::domain_error);
}

TEST_CASE("translation equivariance: shifting offsets shifts centroids") {
    auto lab = oracles::random_labeling(6, 6, 2, 11);
    auto coords = make_coordinate_maps(6, 6);
    std::mt19937 rng(5);
    std::uniform_real_distribution<float> dist(-2.0f, 2.0f);
    FieldF32 off(6, 6, 2);
    for (auto& v : off.data) v = dist(rng);
    FieldF32 sigma(6, 6, 1, 1.0f);

    auto st0 = instance_stats(spatial_embedding(off, coords), sigma, lab);
    FieldF32 off2 = off;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            off2.at(r, c, 0) += 3.25f;
            off2.at(r, c, 1) -= 1.5f;
        }
    auto st1 = instance_stats(spatial_embedding(off2, coords), sigma, lab);
    for (size_t k = 0; k < st0.num_instances(); ++k) {
        CHECK(st1.centroid_x[k] == doctest::Approx(st0.centroid_x[k] + 3.25).epsilon(1e-5));
        CHECK(st1.centroid_y[k] == doctest::Approx(st0.centroid_y[k] - 1.5).epsilon(1e-5));
    }
}

TEST_CASE("pixel counts sum to foreground size") {
    for (uint64_t seed : {1u, 2u, 3u}) {
        auto lab = oracles::random_labeling(7, 5, 3, seed);
        EmbeddingField e{FieldF32(7, 5, 2, 0.0f)};
        FieldF32 sigma(7, 5, 1, 1.0f);
        auto st = instance_stats(e, sigma, lab);
        size_t total = 0;
        for (size_t n : st.pixel_count) total += n;
        CHECK(total == lab.foreground_count());
    }
}
