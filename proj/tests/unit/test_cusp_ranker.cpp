#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "catastrank/cusp_ranker.hpp"
#include "catastrank/errors.hpp"
#include "synth.hpp"
#include "tmpdir.hpp"

using catastrank::Dataset;
using catastrank::RankEntry;
using catastrank::RankingTable;

namespace {

RankingTable toy_table() {
    RankingTable rt;
    RankEntry a;
    a.feature_id = 3;
    a.aic = 318.066;
    a.rank_score = 1.0 / 318.066;
    a.kept = true;
    rt.entries.push_back(a);
    RankEntry b;
    b.feature_id = 1;
    b.aic = 452.5;
    b.rank_score = 1.0 / 452.5;
    rt.entries.push_back(b);
    RankEntry c;
    c.feature_id = 2;
    c.aic = std::numeric_limits<double>::infinity();
    rt.entries.push_back(c);
    RankEntry asym;
    asym.feature_id = 5;
    asym.aic = std::numeric_limits<double>::quiet_NaN();
    asym.rank_score = std::numeric_limits<double>::quiet_NaN();
    rt.entries.push_back(asym);
    rt.threshold_t = 0.0;
    rt.n_requested = 1;
    rt.asymmetry_feature = 5;
    return rt;
}

}  // namespace

TEST_CASE("the bifurcation-driving feature ranks first") {
    const synth::PlantedData pd = synth::make_planted(200, 3, 321);
    const RankingTable rt =
        catastrank::rank_features(pd.ds, 1, 0.0, pd.asymmetry_id, 42);
    CHECK(rt.entries.front().feature_id == pd.planted_id);
    CHECK(rt.entries.front().kept);
    CHECK(catastrank::kept_ids(rt) == std::vector<int>{pd.planted_id});

    // candidates ascending by AIC, asymmetry appended with n/a scores
    REQUIRE(rt.entries.size() == 4);
    for (std::size_t i = 1; i + 1 < rt.entries.size(); ++i)
        CHECK(rt.entries[i - 1].aic <= rt.entries[i].aic);
    CHECK(rt.entries.back().feature_id == pd.asymmetry_id);
    CHECK(std::isnan(rt.entries.back().aic));
    CHECK_FALSE(rt.entries.back().kept);
}

TEST_CASE("top n_f survivors are kept at threshold zero") {
    const synth::PlantedData pd = synth::make_planted(120, 3, 11);
    const RankingTable rt =
        catastrank::rank_features(pd.ds, 2, 0.0, pd.asymmetry_id, 42);
    const std::vector<int> kept = catastrank::kept_ids(rt);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0] == rt.entries[0].feature_id);
    CHECK(kept[1] == rt.entries[1].feature_id);

    const std::vector<int> prio = catastrank::priority_ids(rt);
    REQUIRE(prio.size() == 4);
    CHECK(prio.back() == pd.asymmetry_id);
    for (std::size_t i = 0; i < 3; ++i) CHECK(prio[i] == rt.entries[i].feature_id);
}

TEST_CASE("a high threshold eliminates every positive-AIC feature") {
    const synth::PlantedData pd = synth::make_planted(120, 3, 13);
    const RankingTable rt =
        catastrank::rank_features(pd.ds, 3, 1e9, pd.asymmetry_id, 42);
    for (const RankEntry& e : rt.entries)
        if (e.aic > 0.0) CHECK_FALSE(e.kept);
}

TEST_CASE("ranking is bitwise deterministic and thread-count independent") {
    const synth::PlantedData pd = synth::make_planted(120, 3, 29);
    const RankingTable a = catastrank::rank_features(pd.ds, 2, 0.0, pd.asymmetry_id, 42, 1);
    const RankingTable b = catastrank::rank_features(pd.ds, 2, 0.0, pd.asymmetry_id, 42, 2);
    const RankingTable c = catastrank::rank_features(pd.ds, 2, 0.0, pd.asymmetry_id, 42, 0);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i + 1 < a.entries.size(); ++i) {
        CHECK(a.entries[i].feature_id == b.entries[i].feature_id);
        CHECK(a.entries[i].aic == b.entries[i].aic);
        CHECK(a.entries[i].feature_id == c.entries[i].feature_id);
        CHECK(a.entries[i].aic == c.entries[i].aic);
    }
}

TEST_CASE("per-feature AICs do not depend on unrelated columns") {
    const synth::PlantedData pd = synth::make_planted(120, 3, 57);
    const RankingTable full =
        catastrank::rank_features(pd.ds, 1, 0.0, pd.asymmetry_id, 42);

    // drop the worst-ranked noise candidate and re-rank the survivors
    const int dropped = full.entries[2].feature_id;
    std::vector<int> keep;
    for (int id : pd.ds.feature_ids())
        if (id != dropped) keep.push_back(id);
    const Dataset reduced = pd.ds.select_features(keep);
    const RankingTable rerun =
        catastrank::rank_features(reduced, 1, 0.0, pd.asymmetry_id, 42);

    REQUIRE(rerun.entries.size() == full.entries.size() - 1);
    for (std::size_t i = 0; i + 1 < rerun.entries.size(); ++i) {
        CHECK(rerun.entries[i].feature_id == full.entries[i].feature_id);
        CHECK(rerun.entries[i].aic == full.entries[i].aic);
    }
}

TEST_CASE("defaulted asymmetry id is the last feature") {
    const synth::PlantedData pd = synth::make_planted(120, 2, 71);
    const RankingTable rt = catastrank::rank_features(pd.ds, 1, 0.0, 0, 42);
    CHECK(rt.asymmetry_feature == pd.ds.feature_ids().back());
}

TEST_CASE("argument validation") {
    const synth::PlantedData pd = synth::make_planted(60, 2, 5);
    CHECK_THROWS_AS(catastrank::rank_features(pd.ds, 0, 0.0, pd.asymmetry_id, 1),
                    catastrank::InvalidArgument);
    CHECK_THROWS_AS(catastrank::rank_features(pd.ds, 3, 0.0, pd.asymmetry_id, 1),
                    catastrank::InvalidArgument);
    CHECK_THROWS_AS(catastrank::rank_features(pd.ds, 1, -0.5, pd.asymmetry_id, 1),
                    catastrank::InvalidArgument);
    CHECK_THROWS_AS(catastrank::rank_features(pd.ds, 1, 0.0, 99, 1),
                    catastrank::InvalidArgument);
}

TEST_CASE("export writes fixed-precision rows with n/a for the asymmetry slot") {
    testutil::TmpDir tmp;
    const std::string path = tmp.file("ranking.csv");
    catastrank::export_ranking(toy_table(), path);
    CHECK(testutil::read_file(path) ==
          "attribute_id,aic,rank,kept\n"
          "3,318.066000,0.003144,true\n"
          "1,452.500000,0.002210,false\n"
          "2,inf,0.000000,false\n"
          "5,n/a,n/a,false\n");
}

TEST_CASE("export, load, export round-trips byte for byte") {
    testutil::TmpDir tmp;
    const std::string p1 = tmp.file("r1.csv");
    const std::string p2 = tmp.file("r2.csv");
    catastrank::export_ranking(toy_table(), p1);

    const RankingTable loaded = catastrank::load_ranking(p1);
    CHECK(loaded.asymmetry_feature == 5);
    CHECK(loaded.n_requested == 1);
    CHECK(catastrank::kept_ids(loaded) == std::vector<int>{3});

    catastrank::export_ranking(loaded, p2);
    CHECK(testutil::read_file(p1) == testutil::read_file(p2));
}

TEST_CASE("loading rejects malformed ranking files") {
    testutil::TmpDir tmp;
    const std::string bad_header = tmp.file("h.csv");
    testutil::write_file(bad_header, "id,aic\n1,2\n");
    CHECK_THROWS_AS(catastrank::load_ranking(bad_header), catastrank::CsvError);

    const std::string bad_row = tmp.file("r.csv");
    testutil::write_file(bad_row, "attribute_id,aic,rank,kept\n1,2.0\n");
    CHECK_THROWS_AS(catastrank::load_ranking(bad_row), catastrank::CsvError);

    const std::string bad_cell = tmp.file("c.csv");
    testutil::write_file(bad_cell, "attribute_id,aic,rank,kept\n1,abc,0.1,true\n");
    CHECK_THROWS_AS(catastrank::load_ranking(bad_cell), catastrank::CsvError);

    CHECK_THROWS_AS(catastrank::load_ranking(tmp.file("missing.csv")), catastrank::IoError);
}
