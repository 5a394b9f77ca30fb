#include "relink/matching.hpp"

#include <algorithm>
#include <limits>
#include <thread>

#include "relink/util.hpp"

namespace relink {

std::vector<MatchPair> MatchResult::accepted() const {
    std::vector<MatchPair> out;
    for (const MatchPair& p : assignments)
        if (p.score >= threshold) out.push_back(p);
    return out;
}

// Potentials-based O(n^3) assignment on the square cost matrix -scores,
// padded with the dummy sentinel when rectangular. Deterministic: columns
// are scanned in index order, so equal-cost alternatives resolve toward the
// lexicographically first augmenting path.
std::vector<int> hungarian_assign(const std::vector<std::vector<double>>& scores) {
    const std::size_t rows = scores.size();
    if (rows == 0) return {};
    const std::size_t cols = scores[0].size();
    for (const auto& row : scores)
        if (row.size() != cols) throw DataError("hungarian_assign: ragged matrix");
    if (cols == 0) return std::vector<int>(rows, -1);
    const std::size_t n = std::max(rows, cols);

    auto cost = [&](std::size_t i, std::size_t j) -> double {
        if (i < rows && j < cols) return -scores[i][j];
        return -kDummyScore;
    };

    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials over rows (u) and columns (v); way[j] is the column
    // preceding j on the current alternating path.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0);  // column -> row (1-based, 0 = free)
    std::vector<std::size_t> way(n + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> assignment(rows, -1);
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = match[j];
        if (i >= 1 && i <= rows && j <= cols) assignment[i - 1] = int(j - 1);
    }
    return assignment;
}

ScoreMatrix build_score_matrix(const Corpus& aux, const Corpus& target, const WeightModel& model,
                               const SimilarityEngine& engine, std::size_t workers) {
    if (aux.profiles.empty() || target.profiles.empty())
        throw DataError("build_score_matrix: empty corpus");
    ScoreMatrix m;
    for (const Profile& p : aux.profiles) m.aux_ids.push_back(p.profile_id);
    for (const Profile& p : target.profiles) m.target_ids.push_back(p.profile_id);

    const FeatureLayout layout = FeatureLayout::build(aux, target);
    const std::vector<std::size_t> indices = resolve_feature_indices(model, layout);

    std::vector<ProfileFeatures> aux_features(aux.profiles.size());
    std::vector<ProfileFeatures> target_features(target.profiles.size());
    m.scores.assign(aux.profiles.size(), std::vector<double>(target.profiles.size(), 0.0));

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<std::size_t>(workers, 16);

    auto run_partitioned = [&](std::size_t count, auto&& body) {
        if (workers <= 1 || count < 64) {
            for (std::size_t i = 0; i < count; ++i) body(i);
            return;
        }
        std::vector<std::thread> pool;
        std::size_t chunk = (count + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            std::size_t b = w * chunk, e = std::min(count, b + chunk);
            if (b >= e) break;
            pool.emplace_back([&body, b, e] {
                for (std::size_t i = b; i < e; ++i) body(i);
            });
        }
        for (auto& t : pool) t.join();
    };

    run_partitioned(aux.profiles.size(),
                    [&](std::size_t i) { aux_features[i] = engine.profile_features(aux.profiles[i]); });
    run_partitioned(target.profiles.size(), [&](std::size_t i) {
        target_features[i] = engine.profile_features(target.profiles[i]);
    });
    run_partitioned(aux.profiles.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < target.profiles.size(); ++j) {
            SimilarityVector sv = engine.pair(aux_features[i], target_features[j], layout);
            m.scores[i][j] = score_resolved(model, indices, sv.values);
        }
    });
    return m;
}

namespace {

MatchResult assign_matrix(const ScoreMatrix& matrix, double threshold) {
    MatchResult result;
    result.threshold = threshold;
    result.aux_ids = matrix.aux_ids;
    result.target_ids = matrix.target_ids;
    std::vector<int> assignment = hungarian_assign(matrix.scores);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] < 0) continue;
        result.assignments.push_back({matrix.aux_ids[i], matrix.target_ids[std::size_t(assignment[i])],
                                      matrix.scores[i][std::size_t(assignment[i])]});
    }
    return result;
}

}  // namespace

MatchResult global_attack(const ScoreMatrix& matrix, double threshold) {
    return assign_matrix(matrix, threshold);
}

MatchResult targeted_attack(const std::vector<std::string>& victims, const ScoreMatrix& matrix,
                            double threshold) {
    std::vector<std::size_t> cols;
    for (const std::string& v : victims) {
        auto it = std::find(matrix.target_ids.begin(), matrix.target_ids.end(), v);
        if (it == matrix.target_ids.end())
            throw DataError("targeted_attack: unknown victim id '" + v + "'");
        cols.push_back(std::size_t(it - matrix.target_ids.begin()));
    }
    ScoreMatrix restricted;
    restricted.aux_ids = matrix.aux_ids;
    for (std::size_t c : cols) restricted.target_ids.push_back(matrix.target_ids[c]);
    restricted.scores.reserve(matrix.scores.size());
    for (const auto& row : matrix.scores) {
        std::vector<double> r(cols.size());
        for (std::size_t k = 0; k < cols.size(); ++k) r[k] = row[cols[k]];
        restricted.scores.push_back(std::move(r));
    }
    return assign_matrix(restricted, threshold);
}

void save_matrix_csv(const ScoreMatrix& m, const std::filesystem::path& path) {
    std::string out = "aux_id";
    for (const std::string& t : m.target_ids) {
        out += ',';
        out += csv_quote(t);
    }
    out += '\n';
    for (std::size_t i = 0; i < m.aux_ids.size(); ++i) {
        out += csv_quote(m.aux_ids[i]);
        for (double s : m.scores[i]) {
            out += ',';
            out += fmt_double(s);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

void save_matches_csv(const MatchResult& r, const std::filesystem::path& path) {
    std::string out = "aux_id,target_id,score,accepted\n";
    for (const MatchPair& p : r.assignments) {
        out += csv_quote(p.aux_id);
        out += ',';
        out += csv_quote(p.target_id);
        out += ',';
        out += fmt_double(p.score);
        out += ',';
        out += p.score >= r.threshold ? "true" : "false";
        out += '\n';
    }
    write_text_file(path, out);
}

MatchResult load_matches_csv(const std::filesystem::path& path, double threshold) {
    MatchResult r;
    r.threshold = threshold;
    auto lines = read_lines(path);
    if (lines.empty() || parse_csv_line(lines[0]) !=
                             std::vector<std::string>{"aux_id", "target_id", "score", "accepted"})
        throw DataError(path.string() + ": expected header aux_id,target_id,score,accepted");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto f = parse_csv_line(lines[i]);
        if (f.size() != 4)
            throw DataError(path.string() + " line " + std::to_string(i + 1) + ": expected 4 fields");
        MatchPair p;
        p.aux_id = f[0];
        p.target_id = f[1];
        try {
            p.score = std::stod(f[2]);
        } catch (const std::exception&) {
            throw DataError(path.string() + " line " + std::to_string(i + 1) + ": malformed score");
        }
        r.assignments.push_back(std::move(p));
        r.aux_ids.push_back(f[0]);
        r.target_ids.push_back(f[1]);
    }
    return r;
}

}  // namespace relink
