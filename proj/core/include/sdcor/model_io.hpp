#pragma once

#include <map>
#include <string>

#include "sdcor/pipeline.hpp"

namespace sdcor {

/// Run parameters stored alongside the model for score-only reuse.
struct ModelMeta {
    double eta = 0.0;
    double lambda = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::uint64_t seed = 0;
};

/// Versioned self-describing JSON document: format tag, parameters, and the
/// per-cluster mean and row-major covariance.
void save_model(const FinalModel& fm, const ModelMeta& meta, const std::string& path);

struct LoadedModel {
    FinalModel model;
    ModelMeta meta;
};

LoadedModel load_model(const std::string& path);

/// Flat key=value report, written in insertion order.
class Report {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, std::size_t value);
    void set(const std::string& key, int value);
    void write(const std::string& path) const;
    std::string to_string() const;

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

}  // namespace sdcor
