#include "hnswlab/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unistd.h>

#include "hnswlab/hash.hpp"

namespace hnswlab::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

constexpr std::size_t kMagicSize = 8;
constexpr std::size_t kChecksumSize = 64;  // hex SHA-256 trailer
constexpr std::string_view kBaselineMagic = "HNSWLBSL";
constexpr std::string_view kLidMagic = "HNSWLLID";
constexpr std::string_view kIndexMagic = "HNSWLIDX";

class ByteWriter {
public:
    explicit ByteWriter(std::string_view magic) {
        buf_.append(magic);
        put_u32(kFormatVersion);
    }

    template <typename T>
    void put(T value) {
        static_assert(std::is_trivially_copyable_v<T>);
        char raw[sizeof(T)];
        std::memcpy(raw, &value, sizeof(T));
        buf_.append(raw, sizeof(T));
    }
    void put_u32(std::uint32_t v) { put(v); }
    void put_u64(std::uint64_t v) { put(v); }
    void put_string(std::string_view s) {
        put_u64(s.size());
        buf_.append(s);
    }
    template <typename T>
    void put_array(std::span<const T> values) {
        const auto bytes = std::as_bytes(values);
        buf_.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    }

    /// Appends the checksum trailer and returns the finished file.
    std::string finish() && {
        const std::string digest = sha256_hex(std::as_bytes(std::span(buf_)));
        buf_.append(digest);
        return std::move(buf_);
    }

private:
    std::string buf_;
};

class ByteReader {
public:
    ByteReader(std::string data, std::string_view magic, const fs::path& path)
        : data_(std::move(data)), path_(path.string()) {
        if (data_.size() < kMagicSize + 4 + kChecksumSize) {
            fail("file too short for a header");
        }
        if (std::string_view(data_).substr(0, kMagicSize) != magic) {
            fail("bad magic (expected " + std::string(magic) + ")");
        }
        const std::size_t body = data_.size() - kChecksumSize;
        const std::string expected = data_.substr(body);
        const std::string actual = sha256_hex(std::as_bytes(std::span(data_.data(), body)));
        if (expected != actual) {
            fail("checksum mismatch; file is corrupted");
        }
        end_ = body;
        offset_ = kMagicSize;
        const auto version = get<std::uint32_t>();
        if (version != kFormatVersion) {
            fail("format version " + std::to_string(version) + " is not supported (expected " +
                 std::to_string(kFormatVersion) + ")");
        }
    }

    template <typename T>
    T get() {
        need(sizeof(T));
        T value;
        std::memcpy(&value, data_.data() + offset_, sizeof(T));
        offset_ += sizeof(T);
        return value;
    }
    std::string get_string() {
        const auto n = get<std::uint64_t>();
        need(n);
        std::string s = data_.substr(offset_, n);
        offset_ += n;
        return s;
    }
    template <typename T>
    std::vector<T> get_array(std::uint64_t count) {
        if (count > (end_ - offset_) / sizeof(T)) {
            fail("truncated array of " + std::to_string(count) + " elements");
        }
        std::vector<T> out(count);
        std::memcpy(out.data(), data_.data() + offset_, count * sizeof(T));
        offset_ += count * sizeof(T);
        return out;
    }
    void expect_end() {
        if (offset_ != end_) {
            fail("trailing bytes after payload");
        }
    }
    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream msg;
        msg << path_ << ": " << what << " (byte offset " << offset_ << ")";
        throw DataError(msg.str());
    }

private:
    void need(std::uint64_t n) {
        if (n > end_ - offset_) {
            fail("truncated; needed " + std::to_string(n) + " more bytes");
        }
    }

    std::string data_;
    std::string path_;
    std::size_t offset_ = 0;
    std::size_t end_ = 0;
};

std::uint32_t metric_tag(Metric m) { return static_cast<std::uint32_t>(m); }

Metric metric_from_tag(std::uint32_t tag, const ByteReader& r) {
    if (tag > static_cast<std::uint32_t>(Metric::InnerProduct)) {
        r.fail("unknown metric tag " + std::to_string(tag));
    }
    return static_cast<Metric>(tag);
}

}  // namespace

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(path.string() + ": cannot open for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError(path.string() + ": cannot open for writing");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            throw DataError(path.string() + ": write failed");
        }
    }
    fs::rename(tmp, path);
}

nlohmann::json read_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
}

void write_json_atomic(const fs::path& path, const nlohmann::json& doc) {
    write_file_atomic(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------- fvecs

Dataset read_fvecs(const fs::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.empty()) {
        throw DataError(path.string() + ": empty fvecs file (datasets must be non-empty)");
    }
    std::size_t offset = 0;
    std::size_t record = 0;
    std::int32_t dim = -1;
    std::vector<double> values;
    while (offset < bytes.size()) {
        std::ostringstream where;
        where << path.string() << ": record " << record << " at byte offset " << offset;
        if (bytes.size() - offset < 4) {
            throw DataError(where.str() + ": truncated dimension field");
        }
        std::int32_t d;
        std::memcpy(&d, bytes.data() + offset, 4);
        if (d <= 0) {
            throw DataError(where.str() + ": invalid dimension " + std::to_string(d));
        }
        if (dim < 0) {
            dim = d;
        } else if (d != dim) {
            throw DataError(where.str() + ": dimension " + std::to_string(d) + " differs from " +
                            std::to_string(dim));
        }
        offset += 4;
        const std::size_t payload = 4 * static_cast<std::size_t>(d);
        if (bytes.size() - offset < payload) {
            throw DataError(where.str() + ": truncated payload");
        }
        for (std::int32_t i = 0; i < d; ++i) {
            float f;
            std::memcpy(&f, bytes.data() + offset + 4 * static_cast<std::size_t>(i), 4);
            if (!std::isfinite(f)) {
                throw DataError(where.str() + ": non-finite value");
            }
            values.push_back(static_cast<double>(f));
        }
        offset += payload;
        ++record;
    }
    return Dataset(Matrix(record, static_cast<std::size_t>(dim), std::move(values)));
}

void write_fvecs(const Dataset& data, const fs::path& path) {
    if (data.empty()) {
        throw DataError("write_fvecs: dataset is empty");
    }
    if (data.dim() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
        throw DataError("write_fvecs: dimension too large");
    }
    std::string out;
    out.reserve(data.size() * (4 + 4 * data.dim()));
    const auto dim = static_cast<std::int32_t>(data.dim());
    for (std::size_t i = 0; i < data.size(); ++i) {
        out.append(reinterpret_cast<const char*>(&dim), 4);
        for (double v : data[static_cast<VectorId>(i)]) {
            const auto f = static_cast<float>(v);
            if (!std::isfinite(f)) {
                throw DataError("write_fvecs: value out of float32 range in row " + std::to_string(i));
            }
            out.append(reinterpret_cast<const char*>(&f), 4);
        }
    }
    write_file_atomic(path, out);
}

// ---------------------------------------------------------------- categories

std::map<VectorId, std::string> read_category_map(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::map<VectorId, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(where + ": invalid JSON: " + e.what());
        }
        if (!obj.is_object() || !obj.contains("id") || !obj.contains("category") ||
            !obj["id"].is_number_unsigned() || !obj["category"].is_string()) {
            throw DataError(where + ": expected {\"id\": <non-negative int>, \"category\": <string>}");
        }
        const auto id = obj["id"].get<std::uint64_t>();
        if (id > std::numeric_limits<VectorId>::max()) {
            throw DataError(where + ": id out of range");
        }
        if (!out.emplace(static_cast<VectorId>(id), obj["category"].get<std::string>()).second) {
            throw DataError(where + ": duplicate id " + std::to_string(id));
        }
    }
    return out;
}

CategoryLabels join_categories(const std::map<VectorId, std::string>& labels, std::size_t n) {
    CategoryLabels out(n);
    std::vector<bool> seen(n, false);
    for (const auto& [id, name] : labels) {
        if (id >= n) {
            throw DataError("categories: id " + std::to_string(id) + " is not in the dataset (size " +
                            std::to_string(n) + ")");
        }
        out[id] = name;
        seen[id] = true;
    }
    const auto missing = std::find(seen.begin(), seen.end(), false);
    if (missing != seen.end()) {
        throw DataError("categories: dataset id " + std::to_string(missing - seen.begin()) + " has no label");
    }
    return out;
}

CategoryLabels read_categories(const fs::path& path, std::size_t n) {
    return join_categories(read_category_map(path), n);
}

void write_categories(const CategoryLabels& labels, const fs::path& path) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += nlohmann::json{{"id", i}, {"category", labels[i]}}.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

// ---------------------------------------------------------------- qrels

metrics::Qrels read_qrels(const fs::path& path) {
    std::istringstream in(read_file(path));
    metrics::Qrels out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        for (std::string f; ls >> f;) {
            fields.push_back(f);
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (line_no == 1 && (fields.size() == 3 || fields.size() == 4) && fields.back() == "score") {
            continue;  // header row
        }
        std::string query, doc, grade_text;
        if (fields.size() == 3) {
            query = fields[0], doc = fields[1], grade_text = fields[2];
        } else if (fields.size() == 4) {
            query = fields[0], doc = fields[2], grade_text = fields[3];
        } else {
            throw DataError(where + ": expected query_id, doc_id and grade columns");
        }
        int grade = 0;
        std::size_t used = 0;
        try {
            grade = std::stoi(grade_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != grade_text.size() || grade < 0) {
            throw DataError(where + ": grade must be a non-negative integer, got '" + grade_text + "'");
        }
        out[query][doc] = grade;
    }
    return out;
}

void write_qrels(const metrics::Qrels& qrels, const fs::path& path) {
    std::string out;
    for (const auto& [query, docs] : qrels) {
        for (const auto& [doc, grade] : docs) {
            out += query + '\t' + doc + '\t' + std::to_string(grade) + '\n';
        }
    }
    write_file_atomic(path, out);
}

// ---------------------------------------------------------------- baselines

void save_baseline(const Baseline& baseline, const fs::path& path) {
    ByteWriter w(kBaselineMagic);
    w.put_string(baseline.dataset_hash);
    w.put_string(baseline.query_hash);
    w.put_u64(baseline.results.size());
    w.put_u64(baseline.k);
    w.put_u32(metric_tag(baseline.metric));
    for (const auto& r : baseline.results) {
        w.put_u64(r.ids.size());
        w.put_array(std::span<const VectorId>(r.ids));
        w.put_array(std::span<const double>(r.distances));
    }
    write_file_atomic(path, std::move(w).finish());
}

Baseline load_baseline(const fs::path& path) {
    ByteReader r(read_file(path), kBaselineMagic, path);
    Baseline b;
    b.dataset_hash = r.get_string();
    b.query_hash = r.get_string();
    const auto n = r.get<std::uint64_t>();
    b.k = r.get<std::uint64_t>();
    b.metric = metric_from_tag(r.get<std::uint32_t>(), r);
    b.results.resize(n);
    for (auto& res : b.results) {
        const auto count = r.get<std::uint64_t>();
        if (count > b.k) {
            r.fail("query result longer than k");
        }
        res.ids = r.get_array<VectorId>(count);
        res.distances = r.get_array<double>(count);
    }
    r.expect_end();
    return b;
}

// ---------------------------------------------------------------- LID profiles

nlohmann::json lid_summary_json(const dimest::LidProfile& profile) {
    const auto s = dimest::summarize(profile);
    return {
        {"format", "hnswlab-lid-summary"},
        {"version", kFormatVersion},
        {"dataset_hash", profile.dataset_hash},
        {"metric", to_string(profile.metric)},
        {"k_neighbours", profile.k_neighbours},
        {"count", s.count},
        {"sentinel_count", s.sentinel_count},
        {"mean", s.mean},
        {"median", s.median},
        {"min", s.min},
        {"max", s.max},
    };
}

void save_lid_profile(const dimest::LidProfile& profile, const fs::path& path) {
    if (profile.neighbour_distances.rows() != profile.lid.size() ||
        profile.neighbour_distances.cols() != profile.k_neighbours) {
        throw InvariantError("save_lid_profile: distance table shape does not match the profile");
    }
    ByteWriter w(kLidMagic);
    w.put_string(profile.dataset_hash);
    w.put_u32(metric_tag(profile.metric));
    w.put_u64(profile.lid.size());
    w.put_u64(profile.k_neighbours);
    w.put_array(std::span<const double>(profile.lid));
    w.put_array(std::span<const double>(profile.neighbour_distances.data()));
    write_file_atomic(path, std::move(w).finish());
    fs::path summary = path;
    summary += ".json";
    write_json_atomic(summary, lid_summary_json(profile));
}

dimest::LidProfile load_lid_profile(const fs::path& path) {
    ByteReader r(read_file(path), kLidMagic, path);
    dimest::LidProfile p;
    p.dataset_hash = r.get_string();
    p.metric = metric_from_tag(r.get<std::uint32_t>(), r);
    const auto n = r.get<std::uint64_t>();
    p.k_neighbours = r.get<std::uint64_t>();
    p.lid = r.get_array<double>(n);
    if (p.k_neighbours != 0 && n > std::numeric_limits<std::uint64_t>::max() / p.k_neighbours) {
        r.fail("distance table size overflows");
    }
    p.neighbour_distances = Matrix(n, p.k_neighbours, r.get_array<double>(n * p.k_neighbours));
    r.expect_end();
    return p;
}

// ---------------------------------------------------------------- order plans

void save_order_plan(const orders::OrderPlan& plan, const fs::path& path) {
    nlohmann::json header = {
        {"format", "hnswlab-order"},
        {"version", kFormatVersion},
        {"strategy", orders::to_string(plan.strategy)},
        {"seed", plan.seed},
        {"detail", {{"category_sequence", plan.category_sequence}, {"tie_break", plan.tie_break}}},
        {"count", plan.ids.size()},
        {"hash", plan.content_hash()},
    };
    std::string out = header.dump() + "\n";
    for (VectorId id : plan.ids) {
        out += std::to_string(id);
        out += '\n';
    }
    write_file_atomic(path, out);
}

orders::OrderPlan load_order_plan(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path.string() + ": empty order file");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ":1: invalid header: " + e.what());
    }
    if (header.value("format", "") != "hnswlab-order") {
        throw DataError(path.string() + ":1: not an order plan");
    }
    if (header.value("version", 0U) != kFormatVersion) {
        throw DataError(path.string() + ":1: unsupported order plan version");
    }
    orders::OrderPlan plan;
    try {
        plan.strategy = orders::parse_strategy(header.at("strategy").get<std::string>());
        plan.seed = header.at("seed").get<std::uint64_t>();
        plan.category_sequence = header.at("detail").at("category_sequence").get<std::vector<std::string>>();
        plan.tie_break = header.at("detail").at("tie_break").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ":1: malformed header: " + e.what());
    }
    const auto count = header.at("count").get<std::uint64_t>();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::size_t used = 0;
        unsigned long long id = 0;
        try {
            id = std::stoull(line, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != line.size() || id > std::numeric_limits<VectorId>::max()) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": invalid id '" + line + "'");
        }
        plan.ids.push_back(static_cast<VectorId>(id));
    }
    if (plan.ids.size() != count) {
        throw DataError(path.string() + ": header promises " + std::to_string(count) + " ids, found " +
                        std::to_string(plan.ids.size()));
    }
    if (plan.content_hash() != header.value("hash", "")) {
        throw DataError(path.string() + ": content hash mismatch");
    }
    orders::require_permutation(plan.ids, plan.ids.size());
    return plan;
}

// ---------------------------------------------------------------- indexes

namespace {

void put_params(ByteWriter& w, const hnsw::HnswParams& p) {
    w.put_u64(p.M);
    w.put_u64(p.M0);
    w.put_u64(p.ef_construction);
    w.put(p.mL);
    w.put_u64(p.seed);
    w.put_u32(metric_tag(p.metric));
    w.put_u32(static_cast<std::uint32_t>(p.neighbor_select));
}

hnsw::HnswParams get_params(ByteReader& r) {
    hnsw::HnswParams p;
    p.M = r.get<std::uint64_t>();
    p.M0 = r.get<std::uint64_t>();
    p.ef_construction = r.get<std::uint64_t>();
    p.mL = r.get<double>();
    p.seed = r.get<std::uint64_t>();
    p.metric = metric_from_tag(r.get<std::uint32_t>(), r);
    const auto select = r.get<std::uint32_t>();
    if (select > 1) {
        r.fail("unknown neighbour selection tag");
    }
    p.neighbor_select = static_cast<hnsw::NeighborSelect>(select);
    return p;
}

struct IndexHeader {
    hnsw::HnswParams params;
    std::uint64_t dim = 0;
    std::string dataset_hash;
};

IndexHeader get_index_header(ByteReader& r) {
    IndexHeader h;
    h.params = get_params(r);
    h.dim = r.get<std::uint64_t>();
    h.dataset_hash = r.get_string();
    return h;
}

}  // namespace

void save_index(const hnsw::HnswIndex& index, std::string_view dataset_hash, const fs::path& path) {
    const hnsw::GraphParts parts = index.parts();
    const std::size_t n = parts.insertion_log.size();
    ByteWriter w(kIndexMagic);
    put_params(w, parts.params);
    w.put_u64(parts.dim);
    w.put_string(dataset_hash);
    w.put_u64(n);
    w.put_u32(parts.entry_point);
    w.put(static_cast<std::int32_t>(index.max_level()));
    w.put_array(std::span<const VectorId>(parts.insertion_log));
    std::vector<std::int32_t> levels(parts.levels.begin(), parts.levels.end());
    w.put_array(std::span<const std::int32_t>(levels));
    for (int layer = 0; layer <= index.max_level(); ++layer) {
        const auto L = static_cast<std::size_t>(layer);
        std::vector<std::uint64_t> offsets(n + 1, 0);
        std::vector<VectorId> targets;
        for (std::size_t s = 0; s < n; ++s) {
            if (L < parts.links[s].size()) {
                targets.insert(targets.end(), parts.links[s][L].begin(), parts.links[s][L].end());
            }
            offsets[s + 1] = targets.size();
        }
        w.put_array(std::span<const std::uint64_t>(offsets));
        w.put_array(std::span<const VectorId>(targets));
    }
    write_file_atomic(path, std::move(w).finish());
}

std::string index_dataset_hash(const fs::path& path) {
    ByteReader r(read_file(path), kIndexMagic, path);
    return get_index_header(r).dataset_hash;
}

hnsw::HnswIndex load_index(const fs::path& path, const Dataset& data) {
    ByteReader r(read_file(path), kIndexMagic, path);
    const IndexHeader header = get_index_header(r);
    if (header.dataset_hash != data.content_hash()) {
        throw DataError(path.string() + ": index was built over a different dataset (hash mismatch)");
    }
    hnsw::GraphParts parts;
    parts.params = header.params;
    parts.dim = header.dim;
    const auto n = r.get<std::uint64_t>();
    parts.entry_point = r.get<VectorId>();
    const auto max_level = r.get<std::int32_t>();
    if (n > 0 && max_level < 0) {
        r.fail("negative max level");
    }
    parts.insertion_log = r.get_array<VectorId>(n);
    const auto levels = r.get_array<std::int32_t>(n);
    parts.levels.assign(levels.begin(), levels.end());
    parts.links.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        if (levels[s] < 0 || levels[s] > max_level) {
            r.fail("level out of range");
        }
        parts.links[s].resize(static_cast<std::size_t>(levels[s]) + 1);
    }
    for (std::int32_t layer = 0; layer <= max_level && n > 0; ++layer) {
        const auto offsets = r.get_array<std::uint64_t>(n + 1);
        const auto targets = r.get_array<VectorId>(offsets.back());
        for (std::size_t s = 0; s < n; ++s) {
            if (offsets[s] > offsets[s + 1] || offsets[s + 1] > targets.size()) {
                r.fail("corrupt adjacency offsets");
            }
            if (offsets[s] == offsets[s + 1]) {
                continue;
            }
            if (layer > levels[s]) {
                r.fail("edges above a node's level");
            }
            parts.links[s][static_cast<std::size_t>(layer)].assign(
                targets.begin() + static_cast<std::ptrdiff_t>(offsets[s]),
                targets.begin() + static_cast<std::ptrdiff_t>(offsets[s + 1]));
        }
    }
    r.expect_end();
    try {
        parts.params.validate();
    } catch (const UsageError& e) {
        r.fail(e.what());
    }
    return hnsw::HnswIndex::from_parts(parts, data);
}

// ---------------------------------------------------------------- JSON helpers

nlohmann::json to_json(const hnsw::HnswParams& p) {
    return {
        {"M", p.M},
        {"M0", p.M0},
        {"ef_construction", p.ef_construction},
        {"mL", p.mL},
        {"seed", p.seed},
        {"metric", to_string(p.metric)},
        {"neighbor_select", hnsw::to_string(p.neighbor_select)},
    };
}

hnsw::HnswParams params_from_json(const nlohmann::json& doc) {
    static const std::set<std::string> known = {"M", "M0", "ef_construction", "mL", "seed", "metric",
                                                "neighbor_select"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) {
            throw UsageError("hnsw params: unknown key '" + key + "'");
        }
    }
    hnsw::HnswParams p = hnsw::HnswParams::with_M(doc.value("M", std::size_t{16}));
    p.M0 = doc.value("M0", p.M0);
    p.ef_construction = doc.value("ef_construction", p.ef_construction);
    p.mL = doc.value("mL", p.mL);
    p.seed = doc.value("seed", p.seed);
    if (doc.contains("metric")) {
        p.metric = parse_metric(doc["metric"].get<std::string>());
    }
    if (doc.contains("neighbor_select")) {
        p.neighbor_select = hnsw::parse_neighbor_select(doc["neighbor_select"].get<std::string>());
    }
    return p;
}

nlohmann::json to_json(const hnsw::GraphStats& s) {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& layer : s.degree_histogram) {
        nlohmann::json h = nlohmann::json::object();
        for (const auto& [degree, count] : layer) {
            h[std::to_string(degree)] = count;
        }
        hist.push_back(h);
    }
    return {
        {"avg_path_length_layer0", s.avg_path_length_layer0},
        {"reachable_pairs", s.reachable_pairs},
        {"sampled_sources", s.sampled_sources},
        {"connected_components_layer0", s.connected_components_layer0},
        {"nodes_per_layer", s.nodes_per_layer},
        {"degree_histogram", hist},
    };
}

nlohmann::json to_json(const dimest::PcaReport& r) {
    return {
        {"theta", r.theta},
        {"k_intrinsic", r.k_intrinsic},
        {"explained_variance_ratios", r.explained_variance_ratios},
        {"cumulative", r.cumulative},
    };
}

}  // namespace hnswlab::io
