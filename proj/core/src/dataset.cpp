#include "sdcor/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <unordered_map>

namespace sdcor {

namespace {

// Parses one CSV line into `out` (size = expected field count).
// `row` is 1-based and used only for error messages.
void parse_line(const std::string& line, std::size_t row, std::vector<double>& out) {
    std::size_t field = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (true) {
        const char* comma = std::find(p, end, ',');
        const char* a = p;
        const char* b = comma;
        while (a < b && (*a == ' ' || *a == '\t')) ++a;
        while (b > a && (b[-1] == ' ' || b[-1] == '\t' || b[-1] == '\r')) --b;
        if (field >= out.size())
            throw InputError("row " + std::to_string(row) + ": expected " +
                             std::to_string(out.size()) + " fields, found more");
        double v = 0.0;
        auto res = std::from_chars(a, b, v);
        if (res.ec != std::errc() || res.ptr != b)
            throw InputError("row " + std::to_string(row) + ", column " +
                             std::to_string(field + 1) + ": not a number: '" +
                             std::string(a, b) + "'");
        out[field++] = v;
        if (comma == end) break;
        p = comma + 1;
    }
    if (field != out.size())
        throw InputError("row " + std::to_string(row) + ": expected " +
                         std::to_string(out.size()) + " fields, found " +
                         std::to_string(field));
}

std::size_t count_fields(const std::string& line) {
    return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

bool blank_line(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

struct ChunkedDataset::Reader::LineSource {
    std::ifstream in;
    std::string line;
    std::size_t file_row = 0;  // 1-based row of the last line read

    explicit LineSource(const std::string& path) : in(path) {
        if (!in) throw InputError("cannot open dataset file: " + path);
    }

    bool next_data_line() {
        while (std::getline(in, line)) {
            ++file_row;
            if (!blank_line(line)) return true;
        }
        return false;
    }
};

ChunkedDataset ChunkedDataset::open(const std::string& path, std::size_t chunk_rows,
                                    bool label_column) {
    if (chunk_rows == 0) throw InputError("chunk_rows must be positive");
    ChunkedDataset ds;
    ds.path_ = path;
    ds.chunk_rows_ = chunk_rows;
    ds.label_column_ = label_column;

    std::ifstream in(path);
    if (!in) throw InputError("cannot open dataset file: " + path);

    std::string line;
    std::size_t file_row = 0;
    std::size_t n = 0;
    std::size_t width = 0;
    std::vector<double> fields;
    while (std::getline(in, line)) {
        ++file_row;
        if (blank_line(line)) continue;
        if (n == 0) {
            width = count_fields(line);
            if (label_column && width < 2)
                throw InputError("dataset with label column needs at least 2 columns");
            fields.resize(width);
        }
        parse_line(line, file_row, fields);
        if (label_column) {
            double lab = fields[width - 1];
            if (lab != 0.0 && lab != 1.0)
                throw InputError("row " + std::to_string(file_row) +
                                 ": label must be 0 or 1, got " + std::to_string(lab));
        }
        ++n;
    }
    if (n == 0) throw InputError("empty dataset: " + path);
    ds.n_ = n;
    ds.p_ = label_column ? width - 1 : width;
    if (ds.p_ == 0) throw InputError("dataset has no feature columns");
    return ds;
}

ChunkedDataset::Reader::Reader(const ChunkedDataset* ds)
    : ds_(ds), next_row_(0), src_(std::make_shared<LineSource>(ds->path_)) {}

bool ChunkedDataset::Reader::next(Chunk& out) {
    if (next_row_ >= ds_->n_) return false;
    const std::size_t want = std::min(ds_->chunk_rows_, ds_->n_ - next_row_);
    const std::size_t p = ds_->p_;
    out.rows.resize(static_cast<Eigen::Index>(want), static_cast<Eigen::Index>(p));
    if (ds_->label_column_)
        out.labels.resize(static_cast<Eigen::Index>(want));
    else
        out.labels.resize(0);
    out.first_row = next_row_;

    std::vector<double> fields(p + (ds_->label_column_ ? 1 : 0));
    for (std::size_t r = 0; r < want; ++r) {
        if (!src_->next_data_line())
            throw InputError("dataset truncated at row " + std::to_string(next_row_ + r + 1));
        parse_line(src_->line, src_->file_row, fields);
        for (std::size_t c = 0; c < p; ++c)
            out.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = fields[c];
        if (ds_->label_column_)
            out.labels(static_cast<Eigen::Index>(r)) = fields[p];
    }
    next_row_ += want;
    return true;
}

Eigen::MatrixXd ChunkedDataset::gather_rows(const std::vector<std::size_t>& indices) const {
    std::unordered_map<std::size_t, std::vector<std::size_t>> slot_of;
    slot_of.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= n_)
            throw InputError("row index out of range: " + std::to_string(indices[i]));
        slot_of[indices[i]].push_back(i);
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()),
                        static_cast<Eigen::Index>(p_));
    Reader rd = reader();
    Chunk chunk;
    std::size_t filled = 0;
    while (filled < indices.size() && rd.next(chunk)) {
        for (Eigen::Index r = 0; r < chunk.rows.rows(); ++r) {
            auto it = slot_of.find(chunk.first_row + static_cast<std::size_t>(r));
            if (it == slot_of.end()) continue;
            for (std::size_t slot : it->second) {
                out.row(static_cast<Eigen::Index>(slot)) = chunk.rows.row(r);
                ++filled;
            }
        }
    }
    if (filled != indices.size())
        throw InvariantError("gather_rows: pass ended before all indices were found");
    return out;
}

SampleSet random_sample(const ChunkedDataset& ds, double rate, std::uint64_t seed) {
    if (!(rate > 0.0) || rate > 1.0)
        throw InputError("sampling rate must be in (0, 1]");
    const std::size_t n = ds.rows();
    const auto s = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
    if (s < 1)
        throw InputError("sample size round(rate*n) is below 1; raise the rate");

    // Partial Fisher-Yates over an index array.
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < s; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(s);

    SampleSet set;
    set.rate = rate;
    set.source_indices = idx;
    set.rows = ds.gather_rows(idx);
    return set;
}

void write_scores(const ScoreTable& table, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw InputError("cannot open for writing: " + path);
    std::fputs("index,score,cluster,label\n", f);
    for (const ScoreEntry& e : table.entries) {
        if (e.label)
            std::fprintf(f, "%zu,%.17g,%d,%d\n", e.row_index, e.score, e.cluster_id, *e.label);
        else
            std::fprintf(f, "%zu,%.17g,%d,\n", e.row_index, e.score, e.cluster_id);
    }
    if (std::fclose(f) != 0) throw InputError("write failed: " + path);
}

ScoreTable read_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scores file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty scores file: " + path);
    if (line.rfind("index,score,cluster,label", 0) != 0)
        throw InputError("bad scores header in " + path);
    ScoreTable table;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (blank_line(line)) continue;
        ScoreEntry e;
        const char* p = line.data();
        const char* end = p + line.size();
        auto next_field = [&](bool last) {
            const char* comma = last ? end : std::find(p, end, ',');
            if (!last && comma == end)
                throw InputError("scores row " + std::to_string(row) + ": missing field");
            std::pair<const char*, const char*> span{p, comma};
            p = last ? end : comma + 1;
            return span;
        };
        auto [a0, b0] = next_field(false);
        auto [a1, b1] = next_field(false);
        auto [a2, b2] = next_field(false);
        auto [a3, b3] = next_field(true);
        while (b3 > a3 && (b3[-1] == '\r' || b3[-1] == ' ')) --b3;
        std::uint64_t ri = 0;
        if (std::from_chars(a0, b0, ri).ec != std::errc())
            throw InputError("scores row " + std::to_string(row) + ": bad index");
        e.row_index = ri;
        if (std::from_chars(a1, b1, e.score).ec != std::errc())
            throw InputError("scores row " + std::to_string(row) + ": bad score");
        if (std::from_chars(a2, b2, e.cluster_id).ec != std::errc())
            throw InputError("scores row " + std::to_string(row) + ": bad cluster");
        if (a3 != b3) {
            int lab = 0;
            if (std::from_chars(a3, b3, lab).ec != std::errc())
                throw InputError("scores row " + std::to_string(row) + ": bad label");
            e.label = lab;
        }
        table.entries.push_back(e);
    }
    return table;
}

void write_sample_indices(const std::vector<std::size_t>& indices, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw InputError("cannot open for writing: " + path);
    for (std::size_t i : indices) std::fprintf(f, "%zu\n", i);
    if (std::fclose(f) != 0) throw InputError("write failed: " + path);
}

}  // namespace sdcor
