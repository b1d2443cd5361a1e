#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "catastrank/dataset.hpp"
#include "catastrank/errors.hpp"
#include "catastrank/relief.hpp"
#include "catastrank/rng.hpp"
#include "oracles.hpp"
#include "tmpdir.hpp"

using catastrank::Dataset;
using catastrank::NormalizeMode;
using catastrank::ReliefWeights;
using catastrank::Rng;

namespace {

Dataset random_dataset(int n, int p, std::uint64_t seed, NormalizeMode mode) {
    Rng rng(seed);
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (int j = 0; j < p; ++j) {
        std::vector<double> c(n);
        for (double& v : c) v = rng.next_double();
        names.push_back("f" + std::to_string(j + 1));
        cols.push_back(std::move(c));
    }
    std::vector<double> z(n);
    for (double& v : z) v = rng.next_double();
    names.push_back("z");
    cols.push_back(std::move(z));
    return Dataset::from_columns(std::move(names), std::move(cols), p, mode);
}

}  // namespace

TEST_CASE("diff divides by the normalization unit") {
    CHECK(catastrank::diff(0.8, 0.3, 0.5) == doctest::Approx(1.0));
    CHECK(catastrank::diff(0.25, 0.75, 1.0) == doctest::Approx(-0.5));
    CHECK(catastrank::diff(0.4, 0.4, 2.0) == 0.0);
    CHECK_THROWS_AS(catastrank::diff(1.0, 0.0, 0.0), catastrank::InvalidArgument);
    CHECK_THROWS_AS(catastrank::diff(1.0, 0.0, -1.0), catastrank::InvalidArgument);
}

TEST_CASE("equal-frequency bins balance sizes and respect ties by index") {
    const std::vector<int> b = catastrank::equal_frequency_bins({0.4, 0.1, 0.3, 0.2}, 2);
    CHECK(b == std::vector<int>{1, 0, 1, 0});

    const std::vector<int> b3 = catastrank::equal_frequency_bins({5, 5, 5, 5, 5, 5}, 3);
    std::vector<int> count(3, 0);
    for (int x : b3) ++count[x];
    CHECK(count == std::vector<int>{2, 2, 2});
    CHECK(b3 == std::vector<int>{0, 0, 1, 1, 2, 2});  // ties resolved by index

    CHECK_THROWS_AS(catastrank::equal_frequency_bins({1, 2, 3}, 1), catastrank::InvalidArgument);
}

TEST_CASE("perfectly aligned feature gets weight 1, constant feature 0") {
    Dataset ds = Dataset::from_columns(
        {"f1", "f2", "z"},
        {{0, 0, 1, 1}, {0.5, 0.5, 0.5, 0.5}, {0, 0, 1, 1}}, 2, NormalizeMode::None);
    const ReliefWeights rw = catastrank::relief_rank(ds, 4, 0.5, 2, 42);
    CHECK(rw.feature_ids == std::vector<int>{1, 2});
    CHECK(rw.weights[0] == 1.0);
    CHECK(rw.weights[1] == 0.0);
    CHECK(rw.relevant[0]);
    CHECK_FALSE(rw.relevant[1]);
    CHECK(catastrank::ranked_ids(rw) == std::vector<int>{1, 2});
}

TEST_CASE("exhaustive mode matches the reference pass bit for bit") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const int n = 8 + static_cast<int>(seed % 13);
        const int p = 2 + static_cast<int>(seed % 4);
        Dataset ds = random_dataset(n, p, 1000 + seed, NormalizeMode::MinMax);
        const ReliefWeights rw = catastrank::relief_rank(ds, n, 0.0, 2, 7);
        const std::vector<double> ref = oracle::relief_exhaustive(ds, 2);
        REQUIRE(rw.weights.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(rw.weights[i] == ref[i]);
    }
}

TEST_CASE("weights of normalized data stay in [-1, 1]") {
    for (std::uint64_t seed = 20; seed < 25; ++seed) {
        Dataset ds = random_dataset(16, 4, seed, NormalizeMode::MinMax);
        const ReliefWeights rw = catastrank::relief_rank(ds, 16, 0.0, 2, seed);
        for (double w : rw.weights) {
            CHECK(w >= -1.0);
            CHECK(w <= 1.0);
        }
    }
}

TEST_CASE("all-singleton binning is an error") {
    Dataset ds = Dataset::from_columns(
        {"f", "z"}, {{0.1, 0.2, 0.3, 0.4}, {1, 2, 3, 4}}, 1, NormalizeMode::None);
    CHECK_THROWS_AS(catastrank::relief_rank(ds, 4, 0.0, 4, 1), catastrank::InvalidArgument);
}

TEST_CASE("samples in singleton bins are skipped, not counted") {
    Dataset ds = Dataset::from_columns(
        {"f", "g", "z"},
        {{0.1, 0.9, 0.4, 0.6, 0.2}, {0.3, 0.1, 0.8, 0.5, 0.9}, {1, 2, 3, 4, 5}}, 2,
        NormalizeMode::MinMax);
    // bins of size {2,1,1,1}: only the two lowest-z samples update the weights
    const ReliefWeights rw = catastrank::relief_rank(ds, 5, 0.0, 4, 1);
    const std::vector<double> ref = oracle::relief_exhaustive(ds, 4);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(rw.weights[i] == ref[i]);
}

TEST_CASE("weights are invariant to sample order when distances are unique") {
    Dataset ds = random_dataset(18, 3, 99, NormalizeMode::None);
    std::vector<int> perm(18);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(5);
    for (int i = 17; i > 0; --i)
        std::swap(perm[i], perm[rng.next_below(static_cast<std::uint64_t>(i + 1))]);
    Dataset shuffled = ds.subset_rows(perm);

    const ReliefWeights a = catastrank::relief_rank(ds, 18, 0.0, 2, 3);
    const ReliefWeights b = catastrank::relief_rank(shuffled, 18, 0.0, 2, 3);
    for (std::size_t i = 0; i < a.weights.size(); ++i)
        CHECK(a.weights[i] == doctest::Approx(b.weights[i]).epsilon(1e-12));
}

TEST_CASE("sampled mode is deterministic in the seed") {
    Dataset ds = random_dataset(30, 4, 11, NormalizeMode::MinMax);
    const ReliefWeights a = catastrank::relief_rank(ds, 12, 0.1, 2, 77);
    const ReliefWeights b = catastrank::relief_rank(ds, 12, 0.1, 2, 77);
    CHECK(a.weights == b.weights);
    CHECK(a.m == 12);
    CHECK(a.seed == 77);

    const ReliefWeights c = catastrank::relief_rank(ds, 12, 0.1, 2, 78);
    CHECK(a.weights != c.weights);
}

TEST_CASE("argument validation") {
    Dataset ds = random_dataset(10, 2, 1, NormalizeMode::MinMax);
    CHECK_THROWS_AS(catastrank::relief_rank(ds, 0, 0.0, 2, 1), catastrank::InvalidArgument);
    CHECK_THROWS_AS(catastrank::relief_rank(ds, 10, -0.1, 2, 1), catastrank::InvalidArgument);
    CHECK_THROWS_AS(catastrank::relief_rank(ds, 10, 1.5, 2, 1), catastrank::InvalidArgument);
    CHECK_THROWS_AS(catastrank::relief_rank(ds, 10, 0.0, 1, 1), catastrank::InvalidArgument);
}

TEST_CASE("export writes weight-sorted rows with fixed precision") {
    Dataset ds = Dataset::from_columns(
        {"f1", "f2", "z"},
        {{0, 0, 1, 1}, {0.5, 0.5, 0.5, 0.5}, {0, 0, 1, 1}}, 2, NormalizeMode::None);
    const ReliefWeights rw = catastrank::relief_rank(ds, 4, 0.5, 2, 42);

    testutil::TmpDir tmp;
    const std::string path = tmp.file("relief.csv");
    catastrank::export_relief(rw, path);
    CHECK(testutil::read_file(path) ==
          "attribute_id,weight,relevant\n"
          "1,1.000000,true\n"
          "2,0.000000,false\n");
}
