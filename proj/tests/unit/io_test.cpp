#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

#include "hnswlab/hash.hpp"
#include "hnswlab/io.hpp"
#include "test_support.hpp"

using namespace hnswlab;
using hnswlab::fixtures::TempDir;

namespace {

// Float32-representable data so fvecs round trips are exact.
Dataset float_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
    Matrix m = fixtures::normal_matrix(n, d, seed);
    for (double& x : m.data()) x = static_cast<double>(static_cast<float>(x));
    return Dataset(std::move(m));
}

void write_raw(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream(p, std::ios::binary) << bytes;
}

template <typename T>
void expect_error_mentioning(T&& fn, const std::string& needle) {
    try {
        fn();
        FAIL() << "expected DataError mentioning '" << needle << "'";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

// Rewrites the trailing checksum so header edits get past integrity checks.
void reseal(std::string& bytes) {
    const std::size_t body = bytes.size() - 64;
    bytes.replace(body, 64, sha256_hex(std::as_bytes(std::span(bytes.data(), body))));
}

}  // namespace

TEST(Fvecs, WriteThenReadIsIdentical) {
    TempDir dir("fvecs");
    const auto data = float_dataset(37, 9, 1);
    io::write_fvecs(data, dir / "a.fvecs");
    EXPECT_EQ(io::read_fvecs(dir / "a.fvecs"), data);
    io::write_fvecs(io::read_fvecs(dir / "a.fvecs"), dir / "b.fvecs");
    EXPECT_EQ(io::read_file(dir / "a.fvecs"), io::read_file(dir / "b.fvecs"));
}

TEST(Fvecs, DimensionMismatchNamesRecord) {
    TempDir dir("fvecs");
    std::string bytes;
    auto record = [&](std::int32_t d) {
        bytes.append(reinterpret_cast<const char*>(&d), 4);
        for (std::int32_t i = 0; i < d; ++i) {
            const float f = 1.0f;
            bytes.append(reinterpret_cast<const char*>(&f), 4);
        }
    };
    for (int i = 0; i < 7; ++i) record(4);
    record(5);
    write_raw(dir / "bad.fvecs", bytes);
    expect_error_mentioning([&] { io::read_fvecs(dir / "bad.fvecs"); }, "record 7 at byte offset 140");
}

TEST(Fvecs, EmptyAndTruncatedFilesAreErrors) {
    TempDir dir("fvecs");
    write_raw(dir / "empty.fvecs", "");
    EXPECT_THROW(io::read_fvecs(dir / "empty.fvecs"), DataError);
    io::write_fvecs(float_dataset(3, 4, 2), dir / "t.fvecs");
    auto bytes = io::read_file(dir / "t.fvecs");
    bytes.pop_back();
    write_raw(dir / "t.fvecs", bytes);
    expect_error_mentioning([&] { io::read_fvecs(dir / "t.fvecs"); }, "record 2");
    EXPECT_THROW(io::read_fvecs(dir / "missing.fvecs"), DataError);
}

TEST(Categories, JoinValidatesIds) {
    TempDir dir("cat");
    write_raw(dir / "ok.jsonl", "{\"id\":1,\"category\":\"B\"}\n{\"id\":0,\"category\":\"A\"}\n");
    EXPECT_EQ(io::read_categories(dir / "ok.jsonl", 2), (CategoryLabels{"A", "B"}));
    EXPECT_THROW(io::read_categories(dir / "ok.jsonl", 3), DataError);  // id 2 unlabelled
    EXPECT_THROW(io::read_categories(dir / "ok.jsonl", 1), DataError);  // id 1 unknown
    write_raw(dir / "dup.jsonl", "{\"id\":0,\"category\":\"A\"}\n{\"id\":0,\"category\":\"B\"}\n");
    expect_error_mentioning([&] { io::read_category_map(dir / "dup.jsonl"); }, "duplicate id 0");
}

TEST(Categories, WriteReadRoundTrip) {
    TempDir dir("cat");
    const CategoryLabels labels{"x", "y", "x"};
    io::write_categories(labels, dir / "c.jsonl");
    EXPECT_EQ(io::read_categories(dir / "c.jsonl", 3), labels);
}

TEST(Qrels, ParsesThreeAndFourColumnForms) {
    TempDir dir("qrels");
    write_raw(dir / "q3.tsv", "query-id\tcorpus-id\tscore\nq1\td1\t2\nq1\td2\t0\nq2\td9\t1\n");
    write_raw(dir / "q4.tsv", "q1 0 d1 2\nq1 0 d2 0\nq2 0 d9 1\n");
    const metrics::Qrels expected{{"q1", {{"d1", 2}, {"d2", 0}}}, {"q2", {{"d9", 1}}}};
    EXPECT_EQ(io::read_qrels(dir / "q3.tsv"), expected);
    EXPECT_EQ(io::read_qrels(dir / "q4.tsv"), expected);
    io::write_qrels(expected, dir / "out.tsv");
    EXPECT_EQ(io::read_qrels(dir / "out.tsv"), expected);
    write_raw(dir / "bad.tsv", "q1\td1\thigh\n");
    expect_error_mentioning([&] { io::read_qrels(dir / "bad.tsv"); }, "bad.tsv:1");
}

TEST(Baseline, RoundTripIsExact) {
    TempDir dir("baseline");
    const auto data = fixtures::random_dataset(200, 5, 1);
    const auto queries = fixtures::random_dataset(15, 5, 2);
    const io::Baseline b{data.content_hash(), queries.content_hash(), 7, Metric::Cosine,
                         knn::exact_search_batch(data, queries, 7, Metric::Cosine)};
    io::save_baseline(b, dir / "b.hlb");
    EXPECT_EQ(io::load_baseline(dir / "b.hlb"), b);
}

TEST(Baseline, CorruptionAndVersionAreRejected) {
    TempDir dir("baseline");
    const auto data = fixtures::random_dataset(20, 3, 1);
    const io::Baseline b{data.content_hash(), data.content_hash(), 2, Metric::L2,
                         knn::exact_search_batch(data, data, 2, Metric::L2)};
    io::save_baseline(b, dir / "b.hlb");
    const auto good = io::read_file(dir / "b.hlb");

    auto flipped = good;
    flipped[20] ^= 0x1;
    write_raw(dir / "b.hlb", flipped);
    expect_error_mentioning([&] { io::load_baseline(dir / "b.hlb"); }, "checksum");

    auto magic = good;
    magic[0] = 'X';
    write_raw(dir / "b.hlb", magic);
    expect_error_mentioning([&] { io::load_baseline(dir / "b.hlb"); }, "bad magic");

    auto version = good;
    const std::uint32_t v2 = 2;
    std::memcpy(version.data() + 8, &v2, 4);
    reseal(version);
    write_raw(dir / "b.hlb", version);
    expect_error_mentioning([&] { io::load_baseline(dir / "b.hlb"); }, "version 2");

    write_raw(dir / "b.hlb", good.substr(0, 30));
    EXPECT_THROW(io::load_baseline(dir / "b.hlb"), DataError);
}

TEST(LidProfile, RoundTripIsExactAndWritesSummary) {
    TempDir dir("lid");
    const auto profile = dimest::lid_profile(fixtures::random_dataset(120, 4, 3), 10);
    io::save_lid_profile(profile, dir / "p.bin");
    const auto back = io::load_lid_profile(dir / "p.bin");
    EXPECT_EQ(back.lid, profile.lid);
    EXPECT_EQ(back.neighbour_distances, profile.neighbour_distances);
    EXPECT_EQ(back.dataset_hash, profile.dataset_hash);
    EXPECT_EQ(back.k_neighbours, profile.k_neighbours);
    const auto summary = io::read_json(dir / "p.bin.json");
    EXPECT_EQ(summary.at("count"), 120);
    EXPECT_EQ(summary.at("sentinel_count"), 0);
}

TEST(OrderPlan, RoundTripAndTamperDetection) {
    TempDir dir("order");
    const CategoryLabels labels{"a", "b", "a", "b"};
    const std::vector<std::string> seq{"b", "a"};
    const auto plan = orders::order_by_category(labels, seq, 4);
    io::save_order_plan(plan, dir / "o.txt");
    EXPECT_EQ(io::load_order_plan(dir / "o.txt"), plan);
    auto text = io::read_file(dir / "o.txt");
    const auto last = text.find_last_of('\n', text.size() - 2);
    text[last + 1] = text[last + 1] == '0' ? '1' : '0';
    write_raw(dir / "o.txt", text);
    EXPECT_THROW(io::load_order_plan(dir / "o.txt"), DataError);
}

TEST(Index, SaveLoadSearchIsIdentical) {
    TempDir dir("index");
    const auto data = fixtures::random_dataset(500, 8, 5);
    const auto index = hnsw::build(data, orders::order_random(data.ids(), 2), hnsw::HnswParams::with_M(6));
    io::save_index(index, data.content_hash(), dir / "i.bin");
    EXPECT_EQ(io::index_dataset_hash(dir / "i.bin"), data.content_hash());
    const auto back = io::load_index(dir / "i.bin", data);
    EXPECT_EQ(back.params(), index.params());
    EXPECT_EQ(back.parts().links, index.parts().links);
    EXPECT_EQ(back.parts().levels, index.parts().levels);
    EXPECT_EQ(back.entry_point(), index.entry_point());
    const auto queries = fixtures::random_dataset(20, 8, 6);
    for (VectorId q = 0; q < queries.size(); ++q) {
        EXPECT_EQ(back.search(queries[q], 10, 10).result, index.search(queries[q], 10, 10).result);
        EXPECT_EQ(back.search(queries[q], 10, 10).stats.distance_evals,
                  index.search(queries[q], 10, 10).stats.distance_evals);
    }
}

TEST(Index, RejectsForeignDataset) {
    TempDir dir("index");
    const auto data = fixtures::random_dataset(50, 3, 5);
    io::save_index(hnsw::build(data, orders::order_identity(50), hnsw::HnswParams::with_M(4)), data.content_hash(),
                   dir / "i.bin");
    expect_error_mentioning([&] { io::load_index(dir / "i.bin", fixtures::random_dataset(50, 3, 6)); },
                            "hash mismatch");
}

TEST(AtomicWrite, LeavesNoTempFiles) {
    TempDir dir("atomic");
    io::write_file_atomic(dir / "x.txt", "one");
    io::write_file_atomic(dir / "x.txt", "two");
    EXPECT_EQ(io::read_file(dir / "x.txt"), "two");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
    EXPECT_EQ(files, 1u);
}

TEST(ParamsJson, RoundTrip) {
    auto p = hnsw::HnswParams::with_M(12);
    p.metric = Metric::InnerProduct;
    p.neighbor_select = hnsw::NeighborSelect::Simple;
    p.seed = 77;
    EXPECT_EQ(io::params_from_json(io::to_json(p)), p);
}
