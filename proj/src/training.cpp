#include "relink/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "relink/util.hpp"

namespace relink {

using json = nlohmann::json;

double imputation_error(double v, std::span<const double> coupled_observed,
                        std::span<const double> uncoupled_observed) {
    // Coupled mass strictly below v risks false negatives; uncoupled mass at
    // or above v risks false positives (the inclusive side mirrors the
    // downstream score >= threshold acceptance rule).
    double below = 0.0;
    for (double x : coupled_observed)
        if (x < v) below += 1.0;
    double above = 0.0;
    for (double x : uncoupled_observed)
        if (x >= v) above += 1.0;
    return below / double(coupled_observed.size()) + above / double(uncoupled_observed.size());
}

std::pair<TrainingSet, ImputationTable> build_training_set(
    std::span<const std::pair<SimilarityVector, bool>> pairs) {
    if (pairs.empty()) throw DataError("build_training_set: no pairs");
    const FeatureLayout* layout = pairs.front().first.layout;
    const std::size_t m = layout->size();
    bool any_coupled = false, any_uncoupled = false;
    for (const auto& [sv, coupled] : pairs) {
        if (sv.layout != layout) throw DataError("build_training_set: mixed feature layouts");
        (coupled ? any_coupled : any_uncoupled) = true;
    }
    if (!any_coupled || !any_uncoupled)
        throw DataError("build_training_set: need at least one coupled and one uncoupled pair");

    ImputationTable imp;
    imp.values.resize(m, 0.5);
    imp.fallback_used.resize(m, false);
    for (std::size_t f = 0; f < m; ++f) {
        std::vector<double> coupled_obs, uncoupled_obs;
        for (const auto& [sv, coupled] : pairs)
            if (sv.values[f]) (coupled ? coupled_obs : uncoupled_obs).push_back(*sv.values[f]);
        if (coupled_obs.empty() || uncoupled_obs.empty()) {
            imp.fallback_used[f] = true;
            double sum = 0.0;
            std::size_t n = coupled_obs.size() + uncoupled_obs.size();
            for (double x : coupled_obs) sum += x;
            for (double x : uncoupled_obs) sum += x;
            imp.values[f] = n ? sum / double(n) : 0.5;
            continue;
        }
        double best_err = std::numeric_limits<double>::infinity();
        double best_v = 0.0;
        for (int g = 0; g <= 100; ++g) {
            double v = double(g) / 100.0;
            double err = imputation_error(v, coupled_obs, uncoupled_obs);
            if (err < best_err - 1e-12) {
                best_err = err;
                best_v = v;
            }
        }
        imp.values[f] = best_v;
    }

    TrainingSet ts;
    ts.feature_names = layout->names;
    ts.rows.reserve(pairs.size());
    ts.labels.reserve(pairs.size());
    for (const auto& [sv, coupled] : pairs) {
        std::vector<double> row(m);
        for (std::size_t f = 0; f < m; ++f)
            row[f] = sv.values[f] ? *sv.values[f] : imp.values[f];
        ts.rows.push_back(std::move(row));
        ts.labels.push_back(coupled ? 1 : 0);
    }
    return {std::move(ts), std::move(imp)};
}

TrainingSet restrict_features(const TrainingSet& ts, const ImputationTable& imp,
                              std::span<const std::string> features, ImputationTable* imp_out) {
    std::vector<std::size_t> cols;
    for (const std::string& f : features) {
        auto it = std::find(ts.feature_names.begin(), ts.feature_names.end(), f);
        if (it == ts.feature_names.end())
            throw DataError("restrict_features: unknown feature '" + f + "'");
        cols.push_back(std::size_t(it - ts.feature_names.begin()));
    }
    TrainingSet out;
    out.feature_names.assign(features.begin(), features.end());
    out.labels = ts.labels;
    out.rows.reserve(ts.rows.size());
    for (const auto& row : ts.rows) {
        std::vector<double> r(cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i) r[i] = row[cols[i]];
        out.rows.push_back(std::move(r));
    }
    if (imp_out) {
        imp_out->values.clear();
        imp_out->fallback_used.clear();
        for (std::size_t c : cols) {
            imp_out->values.push_back(imp.values[c]);
            imp_out->fallback_used.push_back(imp.fallback_used[c]);
        }
    }
    return out;
}

OlsFit ols_fit(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
    const std::size_t n = rows.size();
    if (n == 0 || y.size() != n) throw DataError("ols_fit: empty or mismatched inputs");
    const std::size_t m = rows.front().size();

    Eigen::MatrixXd design(n, m + 1);
    Eigen::VectorXd target(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != m) throw DataError("ols_fit: ragged rows");
        design(Eigen::Index(i), 0) = 1.0;
        for (std::size_t j = 0; j < m; ++j)
            design(Eigen::Index(i), Eigen::Index(j + 1)) = rows[i][j];
        target(Eigen::Index(i)) = y[i];
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    Eigen::VectorXd theta = cod.solve(target);

    OlsFit fit;
    fit.w0 = theta(0);
    fit.weights.resize(m);
    for (std::size_t j = 0; j < m; ++j) fit.weights[j] = theta(Eigen::Index(j + 1));
    fit.rank_deficient = std::size_t(cod.rank()) < m + 1;
    return fit;
}

WeightModel train_linear(const TrainingSet& ts) {
    std::vector<double> y(ts.labels.begin(), ts.labels.end());
    OlsFit fit = ols_fit(ts.rows, y);

    WeightModel model;
    model.kind = TrainerKind::linear_regression;
    model.w0 = fit.w0;
    model.weights = std::move(fit.weights);
    model.feature_names = ts.feature_names;
    model.rank_deficient = fit.rank_deficient;
    return model;
}

namespace {

// Dual objective of the augmented-bias formulation, for the duality gap.
double svr_dual_objective(std::span<const double> beta, std::span<const double> w_aug,
                          std::span<const int> labels, double epsilon) {
    double norm2 = 0.0;
    for (double w : w_aug) norm2 += w * w;
    double value = -0.5 * norm2;
    for (std::size_t i = 0; i < beta.size(); ++i)
        value += double(labels[i]) * beta[i] - epsilon * std::abs(beta[i]);
    return value;
}

}  // namespace

double svr_primal_objective(const WeightModel& model, const TrainingSet& ts) {
    const double epsilon = model.svm_params ? model.svm_params->epsilon : 0.0;
    const double c = model.svm_params ? model.svm_params->c : 1.0;
    double norm2 = model.w0 * model.w0;  // bias is regularized in this formulation
    for (double w : model.weights) norm2 += w * w;
    double slack = 0.0;
    for (std::size_t i = 0; i < ts.rows.size(); ++i) {
        double pred = model.w0;
        for (std::size_t j = 0; j < model.weights.size(); ++j)
            pred += model.weights[j] * ts.rows[i][j];
        slack += std::max(0.0, std::abs(pred - double(ts.labels[i])) - epsilon);
    }
    return 0.5 * norm2 + c * slack;
}

WeightModel train_svr(const TrainingSet& ts, double c, double epsilon) {
    const std::size_t n = ts.rows.size();
    if (n < 2) throw DataError("train_svr: need at least 2 rows");
    if (c <= 0.0) throw DataError("train_svr: C must be positive");
    if (epsilon < 0.0) throw DataError("train_svr: epsilon must be nonnegative");
    const std::size_t m = ts.feature_names.size();
    const std::size_t maug = m + 1;  // trailing constant-1 feature carries the bias

    std::vector<double> beta(n, 0.0);
    std::vector<double> w(maug, 0.0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 1.0;  // bias feature
        for (double x : ts.rows[i]) d += x * x;
        diag[i] = d;
    }

    WeightModel model;
    model.kind = TrainerKind::svm_regression;
    model.svm_params = SvmParams{c, epsilon};
    model.feature_names = ts.feature_names;

    constexpr double kGapTol = 1e-6;
    constexpr std::size_t kMaxPasses = 100000;
    bool converged = false;
    for (std::size_t pass = 0; pass < kMaxPasses; ++pass) {
        for (std::size_t i = 0; i < n; ++i) {
            // residual gradient with beta_i removed
            double dot = w[m];  // bias feature value is 1
            for (std::size_t j = 0; j < m; ++j) dot += w[j] * ts.rows[i][j];
            const double r = dot - diag[i] * beta[i] - double(ts.labels[i]);
            double t;
            if (-(r + epsilon) / diag[i] > 0.0)
                t = std::clamp(-(r + epsilon) / diag[i], 0.0, c);
            else if (-(r - epsilon) / diag[i] < 0.0)
                t = std::clamp(-(r - epsilon) / diag[i], -c, 0.0);
            else
                t = 0.0;
            const double delta = t - beta[i];
            if (delta != 0.0) {
                for (std::size_t j = 0; j < m; ++j) w[j] += delta * ts.rows[i][j];
                w[m] += delta;
                beta[i] = t;
            }
        }
        // duality gap check
        model.w0 = w[m];
        model.weights.assign(w.begin(), w.begin() + std::ptrdiff_t(m));
        const double primal = svr_primal_objective(model, ts);
        const double dual = svr_dual_objective(beta, w, ts.labels, epsilon);
        if (primal - dual <= kGapTol) {
            converged = true;
            break;
        }
    }
    model.w0 = w[m];
    model.weights.assign(w.begin(), w.begin() + std::ptrdiff_t(m));
    model.converged = converged;
    return model;
}

double score_pair(const WeightModel& model, const SimilarityVector& v) {
    if (!v.layout) throw DataError("score_pair: similarity vector has no layout");
    double score = model.w0;
    for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
        auto idx = v.layout->index_of(model.feature_names[j]);
        double x;
        if (idx && v.values[*idx])
            x = *v.values[*idx];
        else
            x = model.imputation.values.empty() ? 0.0 : model.imputation.values[j];
        score += model.weights[j] * x;
    }
    return score;
}

std::vector<std::size_t> resolve_feature_indices(const WeightModel& model,
                                                 const FeatureLayout& layout) {
    std::vector<std::size_t> indices;
    indices.reserve(model.feature_names.size());
    for (const std::string& f : model.feature_names) {
        auto idx = layout.index_of(f);
        indices.push_back(idx ? *idx : std::size_t(-1));
    }
    return indices;
}

double score_resolved(const WeightModel& model, std::span<const std::size_t> indices,
                      std::span<const std::optional<double>> values) {
    double score = model.w0;
    for (std::size_t j = 0; j < indices.size(); ++j) {
        double x;
        if (indices[j] != std::size_t(-1) && values[indices[j]])
            x = *values[indices[j]];
        else
            x = model.imputation.values.empty() ? 0.0 : model.imputation.values[j];
        score += model.weights[j] * x;
    }
    return score;
}

void save_model(const WeightModel& model, const std::filesystem::path& path) {
    json j;
    j["kind"] = model.kind == TrainerKind::linear_regression ? "linear_regression"
                                                             : "svm_regression";
    j["w0"] = model.w0;
    j["weights"] = model.weights;
    j["feature_names"] = model.feature_names;
    j["imputation"] = {{"values", model.imputation.values},
                       {"fallback_used", model.imputation.fallback_used}};
    if (model.svm_params)
        j["svm_params"] = {{"C", model.svm_params->c}, {"epsilon", model.svm_params->epsilon}};
    j["rank_deficient"] = model.rank_deficient;
    j["converged"] = model.converged;
    write_text_file(path, j.dump(2) + "\n");
}

WeightModel load_model(const std::filesystem::path& path) {
    json j = json::parse(read_text_file(path));
    WeightModel model;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear_regression") model.kind = TrainerKind::linear_regression;
    else if (kind == "svm_regression") model.kind = TrainerKind::svm_regression;
    else throw DataError("model: unknown trainer kind '" + kind + "'");
    model.w0 = j.at("w0").get<double>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.imputation.values = j.at("imputation").at("values").get<std::vector<double>>();
    model.imputation.fallback_used =
        j.at("imputation").at("fallback_used").get<std::vector<bool>>();
    if (j.contains("svm_params"))
        model.svm_params = SvmParams{j["svm_params"].at("C").get<double>(),
                                     j["svm_params"].at("epsilon").get<double>()};
    model.rank_deficient = j.value("rank_deficient", false);
    model.converged = j.value("converged", true);
    if (model.weights.size() != model.feature_names.size())
        throw DataError("model: weights length != feature name count");
    return model;
}

std::uint64_t model_content_hash(const WeightModel& model) {
    std::uint64_t h = fnv1a64(model.kind == TrainerKind::linear_regression ? "linreg" : "svr");
    auto mix_double = [&h](double x) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, sizeof(bits));
        h = fnv1a64_mix(h, bits);
    };
    mix_double(model.w0);
    for (double w : model.weights) mix_double(w);
    for (const std::string& f : model.feature_names) h = fnv1a64(f, h);
    for (double v : model.imputation.values) mix_double(v);
    return h;
}

}  // namespace relink
