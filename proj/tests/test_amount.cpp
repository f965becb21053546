#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "chaingraph/amount.hpp"

using namespace chaingraph;

TEST_CASE("decimal BTC strings parse to exact satoshis") {
    CHECK(parse_btc_decimal("52.01") == 5'201'000'000);
    CHECK(parse_btc_decimal("34.93") == 3'493'000'000);
    CHECK(parse_btc_decimal("0.00000001") == 1);
    CHECK(parse_btc_decimal("1.0") == 100'000'000);
    CHECK(parse_btc_decimal("0.01") == 1'000'000);
    CHECK(parse_btc_decimal("50") == 5'000'000'000);
    CHECK(parse_btc_decimal("0") == 0);
    CHECK(parse_btc_decimal("20999999.9769") == 2'099'999'997'690'000);
    CHECK(parse_btc_decimal("49.98999999") == 4'998'999'999);
}

TEST_CASE("scientific notation stays exact") {
    CHECK(parse_btc_decimal("5.201e1") == 5'201'000'000);
    CHECK(parse_btc_decimal("1e-8") == 1);
    CHECK(parse_btc_decimal("1E2") == 10'000'000'000);
}

TEST_CASE("signs parse and validation happens downstream") {
    CHECK(parse_btc_decimal("-1.5") == -150'000'000);
    CHECK(parse_btc_decimal("+0.5") == 50'000'000);
    CHECK(parse_btc_decimal("-0") == 0);
}

TEST_CASE("more than eight fraction digits is a precision error") {
    CHECK_THROWS_AS(parse_btc_decimal("0.000000001"), ValuePrecisionError);
    CHECK_THROWS_AS(parse_btc_decimal("1.123456789"), ValuePrecisionError);
    CHECK_THROWS_AS(parse_btc_decimal("1e-9"), ValuePrecisionError);
}

TEST_CASE("malformed decimals are rejected") {
    CHECK_THROWS_AS(parse_btc_decimal(""), ValuePrecisionError);
    CHECK_THROWS_AS(parse_btc_decimal("1.2.3"), ValuePrecisionError);
    CHECK_THROWS_AS(parse_btc_decimal("abc"), ValuePrecisionError);
    CHECK_THROWS_AS(parse_btc_decimal("1e"), ValuePrecisionError);
    CHECK_THROWS_AS(parse_btc_decimal("."), ValuePrecisionError);
    CHECK_THROWS_AS(parse_btc_decimal("99999999999999999999999"), ValuePrecisionError);
}

TEST_CASE("format renders canonical eight-decimal form") {
    CHECK(format_btc(5'201'000'000) == "52.01000000");
    CHECK(format_btc(1) == "0.00000001");
    CHECK(format_btc(0) == "0.00000000");
    CHECK(format_btc(-150'000'000) == "-1.50000000");
}

namespace {

// Canonicalization used by the lossless-parse property, computed by string
// surgery alone: strip sign, pad/trim the fraction to eight digits, strip
// leading zeros on the whole part.
std::string canonical_decimal(const std::string& s) {
    std::string body = s;
    bool neg = false;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
        neg = body[0] == '-';
        body = body.substr(1);
    }
    auto dot = body.find('.');
    std::string whole = dot == std::string::npos ? body : body.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : body.substr(dot + 1);
    frac.resize(8, '0');
    while (whole.size() > 1 && whole.front() == '0') whole.erase(whole.begin());
    bool zero = whole.find_first_not_of('0') == std::string::npos &&
                frac.find_first_not_of('0') == std::string::npos;
    return (neg && !zero ? "-" : "") + whole + "." + frac;
}

}  // namespace

TEST_CASE("parsing is lossless over random eight-decimal strings") {
    std::mt19937_64 rng(20817);
    for (int i = 0; i < 5000; ++i) {
        unsigned long long whole = rng() % 21'000'000;
        unsigned long long frac = rng() % 100'000'000;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%llu.%08llu", whole, frac);
        std::string s(buf);
        CHECK(format_btc(parse_btc_decimal(s)) == canonical_decimal(s));
    }
}

TEST_CASE("round trip through format and parse is identity") {
    std::mt19937_64 rng(777);
    for (int i = 0; i < 5000; ++i) {
        Amount v = static_cast<Amount>(rng() % 2'100'000'000'000'000ULL);
        CHECK(parse_btc_decimal(format_btc(v)) == v);
    }
}
