#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "odma_ura/channel.hpp"
#include "odma_ura/rng.hpp"
#include "support.hpp"

using namespace odma_ura;

TEST_SUITE("channel") {

TEST_CASE("no rate, no arrivals")
{
    auto cfg = desk_profile(0.0);
    Rng rng(1);
    for (int t = 0; t < 50; ++t)
        CHECK(draw_arrivals(cfg, rng).empty());
}

TEST_CASE("poisson mean")
{
    auto cfg = desk_profile(75.0);
    const double mean = 75.0 * 10.0;
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng(derive_seed(123, Stream::Trial, s));
        const auto arr = draw_arrivals(cfg, rng);
        sum += static_cast<double>(arr.size());
        for (const auto& a : arr) {
            CHECK(a.delta >= 0);
            CHECK(a.delta < cfg.T);
        }
    }
    // sd of the mean over 200 draws
    const double sigma = std::sqrt(mean / 200.0);
    CHECK(std::abs(sum / 200.0 - mean) <= 3.0 * sigma);
}

TEST_CASE("arrivals are sorted and consistent")
{
    auto cfg = desk_profile(5.0);
    Rng rng(4);
    const auto arr = draw_arrivals(cfg, rng);
    for (std::size_t i = 1; i < arr.size(); ++i)
        CHECK(arr[i - 1].delta <= arr[i].delta);
    for (const auto& a : arr) {
        CHECK(a.message.size() == 100);
        CHECK(a.pattern_index == pattern_index_of(a.message, cfg));
        CHECK(a.group_power == group_power(a.pattern_index, cfg));
    }
}

TEST_CASE("fixed arrivals per block")
{
    auto cfg = desk_profile(3.0);
    cfg.arrival_model = ArrivalModel::FixedPerBlock;
    Rng rng(4);
    const auto arr = draw_arrivals(cfg, rng);
    CHECK(arr.size() == 30);
}

TEST_CASE("pure noise variance")
{
    auto cfg = desk_profile(0.0);
    cfg.T = 29 * cfg.n;  // T + n = 60000 samples
    const auto pm = gen_pattern_matrix(cfg);
    const auto code = make_code(cfg);
    Rng rng(77);
    const auto r = synthesize({}, pm, code, cfg, {}, rng);
    REQUIRE(r.y.size() == 60000);
    const double mean = std::accumulate(r.y.begin(), r.y.end(), 0.0) / 60000.0;
    double var = 0.0;
    for (double v : r.y)
        var += (v - mean) * (v - mean);
    var /= 59999.0;
    CHECK(std::abs(var - 1.0) <= 0.02);
}

TEST_CASE("single clean packet energy")
{
    auto cfg = testing::noiseless_desk();
    const auto pm = gen_pattern_matrix(cfg);
    const auto code = make_code(cfg);
    std::mt19937_64 bits(8);
    const auto a = make_arrival(testing::random_bits(bits, 100), 12345, cfg);
    Rng rng(1);
    const auto r = synthesize({a}, pm, code, cfg, {}, rng);
    const double e = std::inner_product(r.y.begin(), r.y.end(), r.y.begin(), 0.0);
    CHECK(e == doctest::Approx(256 * a.group_power).epsilon(1e-12));
}

TEST_CASE("superposition of shifted packets")
{
    auto cfg = testing::noiseless_desk();
    const auto pm = gen_pattern_matrix(cfg);
    const auto code = make_code(cfg);
    std::mt19937_64 bits(19);
    auto m1 = testing::random_bits(bits, 100);
    auto m2 = testing::random_bits(bits, 100);
    for (int i = 0; i < 4; ++i)
        m2[static_cast<std::size_t>(i)] = m1[static_cast<std::size_t>(i)];  // same pattern
    const auto a1 = make_arrival(m1, 500, cfg);
    const auto a2 = make_arrival(m2, 501, cfg);
    REQUIRE(a1.pattern_index == a2.pattern_index);
    Rng rng(1);
    const auto r = synthesize({a1, a2}, pm, code, cfg, {}, rng);

    // Direct summation over the binary mask of the column.
    std::vector<double> expect(r.y.size(), 0.0);
    for (const auto* a : {&a1, &a2}) {
        const auto cw = message_codeword(a->message, code, cfg);
        std::vector<std::uint8_t> mask(2000, 0);
        for (auto idx : pm.column(a->pattern_index))
            mask[static_cast<std::size_t>(idx)] = 1;
        std::size_t j = 0;
        for (std::size_t t = 0; t < 2000; ++t) {
            if (!mask[t])
                continue;
            expect[static_cast<std::size_t>(a->delta) + t] += (cw[j++] ? -1.0 : 1.0) * std::sqrt(a->group_power);
        }
    }
    CHECK(r.y == expect);
}

TEST_CASE("start time outside the horizon")
{
    auto cfg = testing::noiseless_desk();
    const auto pm = gen_pattern_matrix(cfg);
    const auto code = make_code(cfg);
    Rng rng(1);
    const auto a = make_arrival(BitVector(100, 0), cfg.T, cfg);
    CHECK_THROWS(synthesize({a}, pm, code, cfg, {}, rng));
}

}
