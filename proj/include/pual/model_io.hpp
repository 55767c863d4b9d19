#ifndef PUAL_MODEL_IO_HPP
#define PUAL_MODEL_IO_HPP

#include "pual/common.hpp"
#include "pual/dataset.hpp"
#include "pual/error.hpp"
#include "pual/evaluation.hpp"
#include "pual/gllc.hpp"
#include "pual/hyperparams.hpp"
#include "pual/pual_kernel.hpp"
#include "pual/pual_linear.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

namespace pual {

inline constexpr int model_format_version = 1;

/// A trained model of any kind with the settings that produced it.
struct ModelEnvelope {
    ModelKind kind{ModelKind::pual_linear};
    Hyperparams hyperparams;
    std::variant<LinearModel, KernelModel> params;
    SolveReport report;  // PUAL kinds only; GLLC leaves it empty

    [[nodiscard]] Prediction predict(const Matrix &features) const {
        if (const auto *linear = std::get_if<LinearModel>(&params)) {
            return predict_linear(*linear, features);
        }
        return predict_kernel(std::get<KernelModel>(params), features);
    }
};

namespace detail {

using nlohmann::json;

inline json to_json(const Vector &v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline json to_json(const Matrix &M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(M.cols()));
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            row[static_cast<std::size_t>(j)] = M(i, j);
        }
        rows.push_back(std::move(row));
    }
    return json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", std::move(rows)}};
}

inline const json &field(const json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        throw Error(ErrorKind::Format, std::string("model file lacks '") + key + "'");
    }
    return j.at(key);
}

inline Vector vector_from(const json &j) {
    if (!j.is_array()) {
        throw Error(ErrorKind::Format, "expected a number array");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

inline Matrix matrix_from(const json &j) {
    const auto rows = field(j, "rows").get<Eigen::Index>();
    const auto cols = field(j, "cols").get<Eigen::Index>();
    const json &data = field(j, "data");
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows) {
        throw Error(ErrorKind::Format, "matrix row count disagrees with its data");
    }
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json &row = data[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw Error(ErrorKind::Format, "ragged matrix row " + std::to_string(i));
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            M(i, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return M;
}

inline json to_json(const Hyperparams &hp) {
    return json{{"cp", hp.cp},       {"cu", hp.cu}, {"lambda", hp.lambda},
                {"mu1", hp.mu1},     {"k", hp.knn.k}, {"sigma", hp.knn.sigma}};
}

inline Hyperparams hyperparams_from(const json &j) {
    Hyperparams hp;
    hp.cp = field(j, "cp").get<double>();
    hp.cu = field(j, "cu").get<double>();
    hp.lambda = field(j, "lambda").get<double>();
    hp.mu1 = field(j, "mu1").get<double>();
    hp.knn.k = field(j, "k").get<int>();
    hp.knn.sigma = field(j, "sigma").get<double>();
    return hp;
}

inline json to_json(const Standardizer &s) {
    return json{{"means", to_json(s.means)}, {"std_devs", to_json(s.std_devs)}, {"constant", s.constant}};
}

inline Standardizer standardizer_from(const json &j) {
    Standardizer s{vector_from(field(j, "means")), vector_from(field(j, "std_devs")),
                   field(j, "constant").get<std::vector<bool>>()};
    if (s.std_devs.size() != s.means.size() || static_cast<Eigen::Index>(s.constant.size()) != s.means.size()) {
        throw Error(ErrorKind::Format, "standardizer arrays differ in length");
    }
    return s;
}

inline json to_json(const KernelSpec &k) {
    json j{{"kind", std::string(to_string(k.kind))}, {"width", k.width}, {"ridge", k.ridge}};
    j["b_params"] = k.b_params ? to_json(*k.b_params) : json(nullptr);
    return j;
}

inline KernelSpec kernel_from(const json &j) {
    KernelSpec k;
    const auto kind = field(j, "kind").get<std::string>();
    if (kind == "rbf") {
        k.kind = KernelKind::rbf;
    } else if (kind == "linear-via-b") {
        k.kind = KernelKind::linear_via_b;
    } else if (kind == "precomputed") {
        k.kind = KernelKind::precomputed;
    } else {
        throw Error(ErrorKind::Format, "unknown kernel kind '" + kind + "'");
    }
    k.width = field(j, "width").get<double>();
    k.ridge = field(j, "ridge").get<double>();
    if (const json &b = field(j, "b_params"); !b.is_null()) {
        k.b_params = hyperparams_from(b);
    }
    return k;
}

}  // namespace detail

inline nlohmann::json envelope_to_json(const ModelEnvelope &env) {
    using detail::to_json;
    nlohmann::json j;
    j["format_version"] = model_format_version;
    j["model_kind"] = std::string(to_string(env.kind));
    j["hyperparams"] = to_json(env.hyperparams);
    if (const auto *linear = std::get_if<LinearModel>(&env.params)) {
        j["params"] = {{"beta", to_json(linear->beta)}, {"beta0", linear->beta0}};
        j["kernel"] = nullptr;
        j["standardizer"] = to_json(linear->standardizer);
    } else {
        const auto &k = std::get<KernelModel>(env.params);
        j["params"] = {{"omega", to_json(k.omega)},
                       {"beta0", k.beta0},
                       {"train_features", to_json(k.train_features)},
                       {"projection", to_json(k.projection)},
                       {"coef", to_json(k.coef)}};
        j["kernel"] = to_json(k.kernel);
        j["standardizer"] = to_json(k.standardizer);
    }
    j["report"] = {{"iterations", env.report.iterations},
                   {"converged", env.report.converged},
                   {"final_primal_residual", env.report.final_primal_residual},
                   {"final_dual_residual", env.report.final_dual_residual}};
    return j;
}

inline ModelEnvelope envelope_from_json(const nlohmann::json &j) {
    using namespace detail;
    const int version = field(j, "format_version").get<int>();
    if (version != model_format_version) {
        throw Error(ErrorKind::Format, "unsupported model format_version " + std::to_string(version));
    }
    ModelEnvelope env;
    env.kind = parse_model_kind(field(j, "model_kind").get<std::string>());
    env.hyperparams = hyperparams_from(field(j, "hyperparams"));
    const json &p = field(j, "params");
    Standardizer s = standardizer_from(field(j, "standardizer"));
    if (is_kernel(env.kind)) {
        KernelModel k;
        k.omega = vector_from(field(p, "omega"));
        k.beta0 = field(p, "beta0").get<double>();
        k.train_features = matrix_from(field(p, "train_features"));
        k.projection = matrix_from(field(p, "projection"));
        k.coef = vector_from(field(p, "coef"));
        k.kernel = kernel_from(field(j, "kernel"));
        k.standardizer = std::move(s);
        env.params = std::move(k);
    } else {
        env.params = LinearModel{vector_from(field(p, "beta")), field(p, "beta0").get<double>(), std::move(s)};
    }
    const json &r = field(j, "report");
    env.report.iterations = field(r, "iterations").get<int>();
    env.report.converged = field(r, "converged").get<bool>();
    env.report.final_primal_residual = field(r, "final_primal_residual").get<double>();
    env.report.final_dual_residual = field(r, "final_dual_residual").get<double>();
    return env;
}

inline void save_model(const std::string &path, const ModelEnvelope &env) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    }
    out << envelope_to_json(env).dump(1) << '\n';
    if (!out) {
        throw Error(ErrorKind::Io, "write to '" + path + "' failed");
    }
}

inline ModelEnvelope load_model(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot read '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::Format, "'" + path + "' is not valid JSON: " + e.what());
    }
    try {
        return envelope_from_json(j);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::Format, "'" + path + "': " + e.what());
    }
}

}  // namespace pual

#endif  // PUAL_MODEL_IO_HPP
