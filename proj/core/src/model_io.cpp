#include "sdcor/model_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace sdcor {

using nlohmann::json;

void save_model(const FinalModel& fm, const ModelMeta& meta, const std::string& path) {
    if (fm.clusters.empty()) throw InputError("save_model: empty model");
    const Eigen::Index p = fm.clusters.front().mu.size();
    json doc;
    doc["format"] = "sdcor-model";
    doc["version"] = 1;
    doc["t"] = fm.clusters.size();
    doc["p"] = p;
    doc["eta"] = meta.eta;
    doc["lambda"] = meta.lambda;
    doc["alpha"] = meta.alpha;
    doc["beta"] = meta.beta;
    doc["seed"] = meta.seed;
    json clusters = json::array();
    for (const FinalCluster& fc : fm.clusters) {
        json c;
        c["mu"] = std::vector<double>(fc.mu.data(), fc.mu.data() + fc.mu.size());
        std::vector<double> sigma;
        sigma.reserve(static_cast<std::size_t>(p * p));
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < p; ++j) sigma.push_back(fc.sigma(i, j));
        c["sigma"] = sigma;  // row-major
        clusters.push_back(std::move(c));
    }
    doc["clusters"] = std::move(clusters);

    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw InputError("write failed: " + path);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InputError("bad model JSON in " + path + ": " + e.what());
    }
    if (doc.value("format", "") != "sdcor-model")
        throw InputError("not an sdcor model file: " + path);
    if (doc.value("version", 0) != 1)
        throw InputError("unsupported model version in " + path);

    LoadedModel loaded;
    loaded.meta.eta = doc.value("eta", 0.0);
    loaded.meta.lambda = doc.value("lambda", 0.0);
    loaded.meta.alpha = doc.value("alpha", 0.0);
    loaded.meta.beta = doc.value("beta", 0.0);
    loaded.meta.seed = doc.value("seed", std::uint64_t{0});

    const auto p = doc.at("p").get<Eigen::Index>();
    for (const json& c : doc.at("clusters")) {
        FinalCluster fc;
        const auto mu = c.at("mu").get<std::vector<double>>();
        const auto sigma = c.at("sigma").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(mu.size()) != p ||
            static_cast<Eigen::Index>(sigma.size()) != p * p)
            throw InputError("model cluster has inconsistent dimensions");
        fc.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), p);
        fc.sigma.resize(p, p);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < p; ++j)
                fc.sigma(i, j) = sigma[static_cast<std::size_t>(i * p + j)];
        fc.basis = derive_basis_cov(fc.mu, fc.sigma, 1.0);
        loaded.model.clusters.push_back(std::move(fc));
    }
    if (loaded.model.clusters.empty())
        throw InputError("model file lists no clusters: " + path);
    return loaded;
}

void Report::set(const std::string& key, const std::string& value) {
    items_.emplace_back(key, value);
}

void Report::set(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    items_.emplace_back(key, buf);
}

void Report::set(const std::string& key, std::size_t value) {
    items_.emplace_back(key, std::to_string(value));
}

void Report::set(const std::string& key, int value) {
    items_.emplace_back(key, std::to_string(value));
}

std::string Report::to_string() const {
    std::string out;
    for (const auto& [k, v] : items_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

void Report::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << to_string();
    if (!out) throw InputError("write failed: " + path);
}

}  // namespace sdcor
