#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <chrono>
#include <thread>

#include "chaingraph/errors.hpp"
#include "chaingraph/parallel.hpp"

using namespace chaingraph;

TEST_CASE("results come back in index order despite uneven work") {
    OrderedParallel<std::uint64_t> pipe(200, 4, 16, [](std::uint64_t i) {
        // make later items often finish first
        std::this_thread::sleep_for(std::chrono::microseconds((i * 7919) % 500));
        return i * 3;
    });
    std::uint64_t expect = 0;
    while (auto v = pipe.pull()) {
        CHECK(*v == expect * 3);
        ++expect;
    }
    CHECK(expect == 200);
}

TEST_CASE("exceptions surface at their index and drain the pipeline") {
    OrderedParallel<int> pipe(50, 3, 8, [](std::uint64_t i) {
        if (i == 17) throw Error("boom at 17");
        return static_cast<int>(i);
    });
    for (int i = 0; i < 17; ++i) {
        auto v = pipe.pull();
        REQUIRE(v.has_value());
        CHECK(*v == i);
    }
    CHECK_THROWS_WITH(pipe.pull(), Catch::Matchers::ContainsSubstring("boom at 17"));
}

TEST_CASE("in-flight work is bounded by the window") {
    std::atomic<int> in_flight{0};
    std::atomic<int> max_in_flight{0};
    OrderedParallel<int> pipe(150, 8, 4, [&](std::uint64_t i) {
        int now = ++in_flight;
        int seen = max_in_flight.load();
        while (now > seen && !max_in_flight.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::microseconds(200));
        --in_flight;
        return static_cast<int>(i);
    });
    // consume slowly so the window matters
    int count = 0;
    while (auto v = pipe.pull()) {
        ++count;
        std::this_thread::sleep_for(std::chrono::microseconds(100));
    }
    CHECK(count == 150);
    CHECK(max_in_flight.load() <= 4 + 1);  // claimed window plus the item being emitted
}

TEST_CASE("destruction mid-stream does not hang") {
    auto pipe = std::make_unique<OrderedParallel<int>>(1000, 4, 8, [](std::uint64_t i) {
        std::this_thread::sleep_for(std::chrono::microseconds(50));
        return static_cast<int>(i);
    });
    CHECK(pipe->pull() == 0);
    pipe.reset();  // abandons the rest
    SUCCEED("destructor returned");
}
