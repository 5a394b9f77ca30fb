#include "relink/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "relink/util.hpp"

namespace relink {

using json = nlohmann::json;

EvalReport evaluate(const MatchResult& result, std::span<const PairLabel> labels,
                    AttackKind kind) {
    EvalReport report;
    report.threshold = result.threshold;
    report.attack_kind = kind;

    std::unordered_set<std::string> aux_universe(result.aux_ids.begin(), result.aux_ids.end());
    std::unordered_set<std::string> target_universe(result.target_ids.begin(),
                                                    result.target_ids.end());

    // coupled partner per profile, restricted to the evaluated universe
    std::unordered_map<std::string, std::string> partner_of_aux, partner_of_target;
    for (const PairLabel& l : labels) {
        if (!l.coupled) continue;
        if (!aux_universe.count(l.aux_id) || !target_universe.count(l.target_id)) continue;
        partner_of_aux[l.aux_id] = l.target_id;
        partner_of_target[l.target_id] = l.aux_id;
        ++report.coupled_total;
    }

    for (const MatchPair& p : result.assignments) {
        const bool accepted = p.score >= result.threshold;
        auto pa = partner_of_aux.find(p.aux_id);
        const bool correct = pa != partner_of_aux.end() && pa->second == p.target_id;
        if (correct) {
            ++report.coupled_matched;
            if (accepted) ++report.tp;
            else ++report.fn;
            continue;
        }
        bool counted = false;
        if (pa != partner_of_aux.end()) {  // aux side belongs to a coupled pair
            if (accepted) ++report.fp;
            else ++report.tn;
            counted = true;
        }
        if (partner_of_target.count(p.target_id)) {  // target side belongs to a coupled pair
            if (accepted) ++report.fp;
            else ++report.tn;
            counted = true;
        }
        if (!counted && kind == AttackKind::global) {
            // pairing of two profiles with no coupled partner anywhere
            if (accepted) ++report.fp;
            else ++report.tn;
        }
    }

    if (report.tp + report.fp > 0)
        report.precision = double(report.tp) / double(report.tp + report.fp);
    if (report.tp + report.fn > 0)
        report.recall = double(report.tp) / double(report.tp + report.fn);
    report.success_rate = report.coupled_total
                              ? double(report.coupled_matched) / double(report.coupled_total)
                              : 0.0;
    return report;
}

std::vector<double> default_threshold_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(double(i) / 50.0);
    return grid;
}

Curve precision_recall_curve(const MatchResult& result, std::span<const PairLabel> labels,
                             AttackKind kind, std::span<const double> grid) {
    if (grid.empty()) throw DataError("precision_recall_curve: empty threshold grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] < grid[i - 1]) throw DataError("precision_recall_curve: grid not ascending");

    Curve curve;
    double best_gap = std::numeric_limits<double>::infinity();
    for (double t : grid) {
        MatchResult at = result;
        at.threshold = t;
        EvalReport r = evaluate(at, labels, kind);
        CurvePoint p{t, r.precision, r.recall};
        if (p.precision && p.recall) {
            double gap = std::abs(*p.precision - *p.recall);
            if (gap < best_gap - 1e-15) {
                best_gap = gap;
                curve.operating_threshold = t;
            }
        }
        curve.points.push_back(p);
    }
    if (!std::isfinite(best_gap) && !curve.points.empty())
        curve.operating_threshold = curve.points.front().threshold;
    return curve;
}

std::vector<bool> knn_predict(const TrainingSet& train,
                              std::span<const std::vector<double>> test_rows, int k) {
    const std::size_t n = train.rows.size();
    if (n == 0) throw DataError("knn_predict: empty training set");
    if (k <= 0) throw DataError("knn_predict: k must be positive");
    if (std::size_t(k) > n) throw DataError("knn_predict: k exceeds training size");
    const std::size_t m = train.feature_names.size();

    std::vector<bool> out;
    out.reserve(test_rows.size());
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (const auto& row : test_rows) {
        if (row.size() != m) throw DataError("knn_predict: feature width mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0.0;
            const auto& tr = train.rows[i];
            for (std::size_t j = 0; j < m; ++j) {
                const double diff = row[j] - tr[j];
                d += diff * diff;
            }
            dist[i] = {d, i};
        }
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
        std::sort(dist.begin(), dist.begin() + k);
        int votes = 0;
        for (int i = 0; i < k; ++i) votes += train.labels[dist[std::size_t(i)].second];
        out.push_back(votes * 2 > k);  // exact tie predicts uncoupled
    }
    return out;
}

const std::vector<std::string>& obvious_identifier_features(const FeatureLayout& layout,
                                                            std::vector<std::string>& storage) {
    storage.clear();
    for (const std::string& f : layout.names)
        if (FeatureLayout::is_name_feature(f) || f == "location" || f == "gender" || f == "photo")
            storage.push_back(f);
    return storage;
}

void save_eval_json(const EvalReport& report, const Curve& curve,
                    const std::filesystem::path& path) {
    json j;
    j["attack_kind"] = report.attack_kind == AttackKind::global ? "global" : "targeted";
    j["threshold"] = report.threshold;
    j["tp"] = report.tp;
    j["fp"] = report.fp;
    j["tn"] = report.tn;
    j["fn"] = report.fn;
    if (report.precision) j["precision"] = *report.precision;
    else j["precision"] = nullptr;
    if (report.recall) j["recall"] = *report.recall;
    else j["recall"] = nullptr;
    j["success_rate"] = report.success_rate;
    j["coupled_total"] = report.coupled_total;
    j["coupled_matched"] = report.coupled_matched;
    j["operating_threshold"] = curve.operating_threshold;
    write_text_file(path, j.dump(2) + "\n");
}

void save_curve_csv(const Curve& curve, const std::filesystem::path& path) {
    std::string out = "threshold,precision,recall\n";
    for (const CurvePoint& p : curve.points) {
        out += fmt_double(p.threshold);
        out += ',';
        if (p.precision) out += fmt_double(*p.precision);
        out += ',';
        if (p.recall) out += fmt_double(*p.recall);
        out += '\n';
    }
    write_text_file(path, out);
}

}  // namespace relink
