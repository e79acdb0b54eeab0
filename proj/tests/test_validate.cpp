#include <catch2/catch.hpp>

#include <cstdio>
#include <fstream>

#include "canopar/validate.hpp"
#include "support/oracles.hpp"

using namespace canopar;

TEST_CASE("perfect fit gives R^2 of 1") {
    std::vector<ValidationRecord> records;
    for (int i = 0; i < 10; ++i)
        records.push_back({"g" + std::to_string(i), 0.4 + 0.05 * i, 0.4 + 0.05 * i});
    CHECK(r_squared(records) == Approx(1.0).margin(1e-12));
}

TEST_CASE("predicting the mean gives R^2 of 0") {
    std::vector<ValidationRecord> records;
    double mean = 0.0;
    for (int i = 0; i < 8; ++i) mean += 0.3 + 0.07 * i;
    mean /= 8;
    for (int i = 0; i < 8; ++i) records.push_back({"g", 0.3 + 0.07 * i, mean});
    CHECK(r_squared(records) == Approx(0.0).margin(1e-12));
}

TEST_CASE("frozen spreadsheet example") {
    const double meas[10] = {0.42, 0.55, 0.61, 0.68, 0.73, 0.79, 0.84, 0.88, 0.93, 0.96};
    const double sim[10] = {0.46, 0.50, 0.65, 0.64, 0.78, 0.74, 0.86, 0.84, 0.90, 0.99};
    std::vector<ValidationRecord> records;
    for (int i = 0; i < 10; ++i) records.push_back({"g" + std::to_string(i), meas[i], sim[i]});
    CHECK(r_squared(records) == Approx(0.941601073669701).margin(1e-9));
}

TEST_CASE("matches an independent formula on random data") {
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ValidationRecord> records;
        int n = 5 + trial;
        for (int i = 0; i < n; ++i) {
            double m = oracles::unit(900, trial, i, 0);
            double s = m + 0.2 * (oracles::unit(900, trial, i, 1) - 0.5);
            records.push_back({"g", m, s});
        }
        // Independent accumulation: expand the squares in one pass.
        double sm = 0, smm = 0, sres = 0;
        for (const auto& r : records) {
            sm += r.measured;
            smm += r.measured * r.measured;
            sres += (r.measured - r.simulated) * (r.measured - r.simulated);
        }
        double ss_tot = smm - sm * sm / n;
        double expected = 1.0 - sres / ss_tot;
        CHECK(r_squared(records) == Approx(expected).margin(1e-9));
    }
}

TEST_CASE("validation errors") {
    std::vector<ValidationRecord> two = {{"a", 0.1, 0.1}, {"b", 0.2, 0.2}};
    CHECK_THROWS_AS(r_squared(two), Error);
    std::vector<ValidationRecord> flat = {{"a", 0.5, 0.4}, {"b", 0.5, 0.5}, {"c", 0.5, 0.6}};
    CHECK_THROWS_AS(r_squared(flat), Error);
    std::vector<ValidationRecord> nan = {{"a", 0.5, 0.4}, {"b", 0.6, 0.5},
                                         {"c", std::nan(""), 0.6}};
    CHECK_THROWS_AS(r_squared(nan), Error);
}

TEST_CASE("loads pairs from CSV") {
    const char* path = "validate_pairs_test.csv";
    {
        std::ofstream out(path);
        out << "genotype,measured_fraction,simulated_fraction\n";
        out << "\"B73, line\",0.42,0.46\n";
        out << "Mo17,0.96,0.91\n";
        out << "W22,0.73,0.70\n";
    }
    auto records = load_validation_csv(path);
    REQUIRE(records.size() == 3);
    CHECK(records[0].genotype == "B73, line");
    CHECK(records[0].measured == Approx(0.42));
    CHECK(records[1].simulated == Approx(0.91));
    CHECK_NOTHROW(r_squared(records));
    std::remove(path);

    {
        std::ofstream out(path);
        out << "foo,bar\n1,2\n";
    }
    CHECK_THROWS_AS(load_validation_csv(path), Error);
    std::remove(path);
}
