#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdcor/common.hpp"

namespace sdcor {

/// One memory load of rows. `labels` is empty unless the dataset carries a
/// ground-truth column.
struct Chunk {
    Eigen::MatrixXd rows;    // r x p feature block
    Eigen::VectorXd labels;  // size r, or 0 when absent
    std::size_t first_row = 0;
};

/// Bounded-memory accessor over a headerless CSV of doubles. When
/// `label_column` is set the last column holds {0,1} ground truth and is kept
/// out of the feature matrix. Opening validates the whole file streaming-wise
/// (row count, width, numeric cells) without materializing it.
class ChunkedDataset {
public:
    static ChunkedDataset open(const std::string& path, std::size_t chunk_rows,
                               bool label_column);

    const std::string& path() const { return path_; }
    std::size_t rows() const { return n_; }
    std::size_t cols() const { return p_; }
    bool has_labels() const { return label_column_; }
    std::size_t chunk_rows() const { return chunk_rows_; }
    std::size_t chunk_count() const { return (n_ + chunk_rows_ - 1) / chunk_rows_; }

    /// Streaming pass over the file. Each reader owns an independent handle;
    /// a full pass yields exactly rows() rows in stable file order.
    class Reader {
    public:
        /// Fills `out` with the next chunk; returns false at end of pass.
        bool next(Chunk& out);

    private:
        friend class ChunkedDataset;
        Reader(const ChunkedDataset* ds);
        const ChunkedDataset* ds_;
        std::size_t next_row_;
        struct LineSource;
        std::shared_ptr<LineSource> src_;
    };

    Reader reader() const { return Reader(this); }

    /// Gathers the given distinct row indices (any order) in one streaming
    /// pass; result row i corresponds to indices[i].
    Eigen::MatrixXd gather_rows(const std::vector<std::size_t>& indices) const;

private:
    std::string path_;
    std::size_t n_ = 0;
    std::size_t p_ = 0;
    std::size_t chunk_rows_ = 0;
    bool label_column_ = false;
};

/// Uniform random sample without replacement, s = round(rate * n).
struct SampleSet {
    Eigen::MatrixXd rows;                      // s x p
    std::vector<std::size_t> source_indices;   // distinct, each < n, draw order
    double rate = 0.0;
};

SampleSet random_sample(const ChunkedDataset& ds, double rate, std::uint64_t seed);

struct ScoreEntry {
    std::size_t row_index = 0;
    double score = 0.0;
    int cluster_id = 0;  // 1-based final-cluster id
    std::optional<int> label;
};

struct ScoreTable {
    std::vector<ScoreEntry> entries;
};

/// CSV with header `index,score,cluster,label`; scores round-trip at full
/// binary precision. Entry order is preserved as given.
void write_scores(const ScoreTable& table, const std::string& path);
ScoreTable read_scores(const std::string& path);

/// One index per line, in sample draw order.
void write_sample_indices(const std::vector<std::size_t>& indices, const std::string& path);

}  // namespace sdcor
