#include <catch2/catch_amalgamated.hpp>

#include <ngramstat/experiment.hpp>

#include <algorithm>
#include <sstream>

using namespace ngramstat;

namespace {

std::vector<uint32_t> chars(const char* s) {
    std::vector<uint32_t> v;
    for (const char* p = s; *p; ++p) v.push_back(static_cast<uint32_t>(*p));
    return v;
}

// Strip the wall_ms column (index 11) from every data row so timing noise
// does not enter byte comparisons.
std::string strip_wall(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::size_t start = 0;
        while (true) {
            auto pos = line.find(',', start);
            cols.push_back(line.substr(start, pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (cols.size() > 11 && cols[0] != "summary") cols.erase(cols.begin() + 11);
        for (std::size_t i = 0; i < cols.size(); ++i)
            out += (i ? "," : "") + cols[i];
        out += '\n';
    }
    return out;
}

ExperimentConfig small_config(uint32_t n, uint64_t m, uint32_t runs, uint64_t seed) {
    ExperimentConfig cfg;
    cfg.hash.family = HashFamily::general;
    cfg.hash.n = n;
    cfg.hash.width_bits = 19;
    cfg.capacity = m;
    cfg.runs = runs;
    cfg.base_seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("percentile picks the k-th largest", "[experiment]") {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    CHECK(percentile(v, 95) == 96.0);  // 5th largest of 100
    CHECK(percentile(v, 100) == 100.0);
    CHECK(percentile(v, 50) == 51.0);
    CHECK(percentile(v, 0) == 1.0);

    std::vector<double> same(40, 7.5);
    for (double q : {0.0, 25.0, 50.0, 95.0, 100.0}) CHECK(percentile(same, q) == 7.5);

    CHECK(percentile({3.0, 1.0, 2.0}, 95) == 3.0);
    CHECK_THROWS_AS(percentile({}, 95), usage_error);
}

TEST_CASE("percentile agrees with a sorted recomputation", "[experiment]") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 20; ++round) {
        std::vector<double> v(1 + rng() % 200);
        for (auto& x : v) x = static_cast<double>(rng() % 10000) / 100.0;
        for (double q : {25.0, 50.0, 75.0, 95.0}) {
            std::vector<double> sorted = v;
            std::sort(sorted.begin(), sorted.end(), std::greater<>());
            auto k = static_cast<std::size_t>(
                v.size() - std::floor(q * v.size() / 100.0));
            if (k < 1) k = 1;
            REQUIRE(percentile(v, q) == sorted[k - 1]);
        }
    }
}

TEST_CASE("single run with ample capacity has zero error", "[experiment]") {
    MemoryStream stream(chars("abracadabra abracadabra"));
    auto cfg = small_config(3, 4096, 1, 11);
    auto out = run_experiment(stream, cfg);
    REQUIRE(out.have_exact);
    CHECK(out.runs.size() == 1);
    CHECK(out.runs[0].distinct_error == 0.0);
    CHECK(out.runs[0].level == 0);
    CHECK(out.distinct_errors.p95 == 0.0);
}

TEST_CASE("identical configurations yield identical results", "[experiment]") {
    ZipfConfig zc;
    zc.skew = 1.0;
    zc.alphabet = 64;
    zc.length = 4000;
    zc.seed = 5;
    ZipfStream s1(zc), s2(zc);
    auto cfg = small_config(4, 64, 8, 77);
    auto o1 = run_experiment(s1, cfg);
    auto o2 = run_experiment(s2, cfg);

    std::ostringstream c1, c2;
    write_csv(c1, o1);
    write_csv(c2, o2);
    CHECK(strip_wall(c1.str()) == strip_wall(c2.str()));
    for (std::size_t i = 0; i < o1.runs.size(); ++i) {
        CHECK(o1.runs[i].estimate == o2.runs[i].estimate);
        CHECK(o1.runs[i].seed == o2.runs[i].seed);
    }
}

TEST_CASE("runs use distinct derived seeds", "[experiment]") {
    MemoryStream stream(chars("mississippi river runs deep"));
    auto cfg = small_config(2, 8, 6, 13);
    auto out = run_experiment(stream, cfg);
    for (std::size_t i = 0; i < out.runs.size(); ++i) {
        CHECK(out.runs[i].seed == run_seed(13, static_cast<uint32_t>(i)));
        for (std::size_t j = i + 1; j < out.runs.size(); ++j)
            CHECK(out.runs[i].seed != out.runs[j].seed);
    }
}

TEST_CASE("summary percentiles match a direct recomputation", "[experiment]") {
    ZipfConfig zc;
    zc.skew = 1.4;
    zc.alphabet = 40;
    zc.length = 3000;
    zc.seed = 21;
    ZipfStream stream(zc);
    auto cfg = small_config(3, 32, 25, 3);
    auto out = run_experiment(stream, cfg);
    std::vector<double> errs;
    for (const auto& r : out.runs) errs.push_back(r.distinct_error);
    CHECK(out.distinct_errors.p95 == percentile(errs, 95));
    CHECK(out.distinct_errors.p25 == percentile(errs, 25));
    double mean = 0;
    for (double e : errs) mean += e;
    mean /= static_cast<double>(errs.size());
    CHECK_THAT(out.distinct_errors.mean, Catch::Matchers::WithinRel(mean, 1e-12));
}

TEST_CASE("median-of-q grouping", "[experiment]") {
    MemoryStream stream(chars("abcdabcdabcdabcdzzzzyyyy"));
    auto cfg = small_config(2, 4, 9, 17);
    cfg.median_of = 3;
    auto out = run_experiment(stream, cfg);
    REQUIRE(out.median_group.has_value());
    REQUIRE(*out.median_group == 3);

    // recompute by hand: medians of consecutive triples
    std::vector<double> med_errs;
    for (std::size_t g = 0; g + 3 <= out.runs.size(); g += 3) {
        std::vector<double> grp{out.runs[g].estimate, out.runs[g + 1].estimate,
                                out.runs[g + 2].estimate};
        std::sort(grp.begin(), grp.end());
        med_errs.push_back(std::abs(grp[1] - out.exact_distinct) / out.exact_distinct);
    }
    CHECK(out.median_errors.p95 == percentile(med_errs, 95));
}

TEST_CASE("iceberg queries flow through the harness", "[experiment]") {
    MemoryStream stream(chars("aabaabb"));
    auto cfg = small_config(2, 64, 2, 1);
    cfg.iceberg.kind = IcebergQuery::Kind::exact_count;
    cfg.iceberg.threshold = 2;
    auto out = run_experiment(stream, cfg);
    CHECK(out.exact_iceberg == 2);
    CHECK(out.runs[0].iceberg_estimate == 2.0);
    CHECK(out.runs[0].iceberg_error == 0.0);

    cfg.iceberg.kind = IcebergQuery::Kind::min_count;
    cfg.iceberg.threshold = 1;
    MemoryStream stream2(chars("aabaabb"));
    auto out2 = run_experiment(stream2, cfg);
    CHECK(out2.exact_iceberg == 4);  // every key occurs at least once
}

TEST_CASE("zero exact iceberg reports absolute error with a flag", "[experiment]") {
    MemoryStream stream(chars("abcdefg"));
    auto cfg = small_config(2, 64, 1, 1);
    cfg.iceberg.kind = IcebergQuery::Kind::min_count;
    cfg.iceberg.threshold = 100;
    auto out = run_experiment(stream, cfg);
    CHECK(out.exact_iceberg == 0);
    CHECK(out.runs[0].iceberg_absolute);
    CHECK(out.runs[0].iceberg_error == 0.0);  // estimate is also 0
    std::ostringstream csv;
    write_csv(csv, out);
    CHECK(csv.str().find("iceberg_abs_error") != std::string::npos);
}

TEST_CASE("mean estimate lands near the exact count on zipfian data",
          "[experiment][stats]") {
    ZipfConfig zc;
    zc.skew = 1.0;
    zc.alphabet = 1000;
    zc.length = 100000;
    zc.seed = 1234;
    ZipfStream stream(zc);
    auto cfg = small_config(5, 1024, 40, 6);
    auto out = run_experiment(stream, cfg);
    double mean_estimate = 0.0;
    for (const auto& r : out.runs) mean_estimate += r.estimate;
    mean_estimate /= static_cast<double>(out.runs.size());
    CHECK(std::abs(mean_estimate - out.exact_distinct) / out.exact_distinct < 0.05);
}

TEST_CASE("estimates still run when the oracle hits its memory guard",
          "[experiment]") {
    std::vector<uint32_t> data;
    for (uint32_t i = 0; i < 300; ++i) data.push_back(i);
    MemoryStream stream(data);
    auto cfg = small_config(2, 4096, 2, 8);
    cfg.oracle_max_keys = 16;  // force the guard
    auto out = run_experiment(stream, cfg);
    CHECK_FALSE(out.have_exact);
    CHECK(out.runs.size() == 2);
    CHECK(out.runs[0].estimate == 299.0);  // sketch is exact here, no reference though
    CHECK(std::isnan(out.runs[0].distinct_error));
    std::ostringstream csv;
    write_csv(csv, out);
    CHECK(csv.str().find("no_exact") != std::string::npos);
}

TEST_CASE("level exhaustion is surfaced per run", "[experiment]") {
    // 3-bit hashes cannot separate 200+ distinct keys with capacity 2
    std::vector<uint32_t> data;
    for (uint32_t i = 0; i < 400; ++i) data.push_back(i % 211);
    MemoryStream stream(data);
    ExperimentConfig cfg;
    cfg.hash.family = HashFamily::cyclic;
    cfg.hash.n = 2;
    cfg.hash.width_bits = 3;
    cfg.capacity = 2;
    cfg.runs = 3;
    cfg.base_seed = 5;
    auto out = run_experiment(stream, cfg);
    bool any_exhausted = false;
    for (const auto& r : out.runs) any_exhausted = any_exhausted || r.level_exhausted;
    CHECK(any_exhausted);
    std::ostringstream csv;
    write_csv(csv, out);
    CHECK(csv.str().find("level_exhausted") != std::string::npos);
}

TEST_CASE("multi runner matches brute force per length", "[experiment][multi]") {
    MemoryStream stream(chars("aabaabb"));
    ExperimentConfig cfg;
    cfg.hash.family = HashFamily::nwise;
    cfg.hash.n = 2;
    cfg.hash.width_bits = 19;
    cfg.capacity = 16;
    cfg.runs = 2;
    cfg.base_seed = 9;
    auto results = run_multi(stream, 2, cfg);
    REQUIRE(results.size() == 2);
    CHECK(results[0].exact_distinct == 2.0);
    CHECK(results[1].exact_distinct == 4.0);
    for (const auto& r : results[0].runs) CHECK(r.estimate == 2.0);
    for (const auto& r : results[1].runs) CHECK(r.estimate == 4.0);
}

TEST_CASE("multi of depth one equals the single-length harness", "[experiment][multi]") {
    auto data = chars("mississippi");
    MemoryStream s1(data), s2(data);
    ExperimentConfig cfg;
    cfg.hash.family = HashFamily::nwise;
    cfg.hash.n = 1;
    cfg.hash.width_bits = 19;
    cfg.capacity = 8;
    cfg.runs = 4;
    cfg.base_seed = 23;
    auto multi = run_multi(s1, 1, cfg);
    auto single = run_experiment(s2, cfg);
    REQUIRE(multi.size() == 1);
    for (std::size_t i = 0; i < single.runs.size(); ++i)
        CHECK(multi[0].runs[i].estimate == single.runs[i].estimate);
}

TEST_CASE("multi runner rejects recursive-only families", "[experiment][multi]") {
    MemoryStream stream(chars("abcabc"));
    ExperimentConfig cfg;
    cfg.hash.family = HashFamily::id37;
    cfg.hash.n = 2;
    cfg.hash.width_bits = 19;
    CHECK_THROWS_AS(run_multi(stream, 2, cfg), usage_error);
}

TEST_CASE("csv layout", "[experiment]") {
    MemoryStream stream(chars("aabaabb"));
    auto cfg = small_config(2, 16, 2, 4);
    auto out = run_experiment(stream, cfg);
    std::ostringstream csv;
    write_csv(csv, out);
    const std::string text = csv.str();
    CHECK(text.rfind("run,seed,estimate,exact,rel_error,t,m_prime,entropy_est,"
                     "entropy_exact,iceberg_est,iceberg_exact,wall_ms,flags\n",
                     0) == 0);
    CHECK(text.find("summary,exact,") != std::string::npos);
    CHECK(text.find("summary,p95,") != std::string::npos);
    CHECK(text.find("summary,mean,") != std::string::npos);
}
