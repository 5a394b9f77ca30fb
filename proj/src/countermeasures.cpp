#include "relink/countermeasures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "relink/evaluation.hpp"
#include "relink/matching.hpp"
#include "relink/util.hpp"

namespace relink {

using json = nlohmann::json;

std::string_view attribute_str(Attribute a) {
    switch (a) {
        case Attribute::location: return "location";
        case Attribute::gender: return "gender";
        case Attribute::photo: return "photo";
        case Attribute::freetext: return "freetext";
        case Attribute::activity: return "activity";
        case Attribute::interest: return "interest";
        case Attribute::sentiment: return "sentiment";
    }
    return "?";
}

ImportanceProfile ImportanceProfile::equal() {
    ImportanceProfile p;
    p.c.fill(1.0 / 7.0);
    return p;
}

double ImportanceProfile::total() const {
    double t = 0.0;
    for (double x : c) t += x;
    return t;
}

namespace {

std::size_t attribute_index(Attribute a) {
    for (std::size_t i = 0; i < kAttributes.size(); ++i)
        if (kAttributes[i] == a) return i;
    return 0;
}

struct ModelView {
    std::array<double, 7> weight{};           // 0 when the model omits the attribute
    std::array<double, 7> fill{};             // imputation value, 0.5 when omitted
    double base = 0.0;                        // w0 + name features at their fill values
};

ModelView view_model(const WeightModel& model) {
    ModelView v;
    v.fill.fill(0.5);
    v.base = model.w0;
    for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
        const std::string& f = model.feature_names[j];
        const double fill =
            model.imputation.values.empty() ? 0.0 : model.imputation.values[j];
        if (FeatureLayout::is_name_feature(f)) {
            // user names are excluded from distortion; the constraint holds
            // them at their fill values
            v.base += model.weights[j] * fill;
            continue;
        }
        for (std::size_t a = 0; a < kAttributes.size(); ++a) {
            if (attribute_str(kAttributes[a]) == f) {
                v.weight[a] = model.weights[j];
                v.fill[a] = fill;
            }
        }
    }
    return v;
}

double clamp_util(double s, double s_hat) {
    if (s_hat <= 0.0) return 1.0;
    return std::clamp(s / s_hat, 0.0, 1.0);
}

DistortionGroup identity_group(Attribute attr, double sim) {
    DistortionGroup g;
    g.attrs = {attr};
    g.levels.push_back({0, {sim}, {1.0}, {}});
    return g;
}

// Keeps a strictly decreasing staircase of candidate (sim, action) pairs
// under the identity level.
DistortionGroup staircase_group(Attribute attr, double s_hat,
                                std::vector<std::pair<double, LevelAction>> candidates) {
    DistortionGroup g;
    g.attrs = {attr};
    g.levels.push_back({0, {s_hat}, {1.0}, {}});
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    double last = s_hat;
    int id = 1;
    for (auto& [sim, action] : candidates) {
        if (sim >= last - 1e-12) continue;  // dominated or duplicate
        g.levels.push_back({id++, {sim}, {clamp_util(sim, s_hat)}, std::move(action)});
        last = sim;
    }
    return g;
}

}  // namespace

LevelSet enumerate_levels(const Profile& aux, const Profile& target, const WeightModel& model,
                          const SimilarityEngine& engine, std::size_t grid_size) {
    if (model.kind != TrainerKind::linear_regression)
        throw DataError("enumerate_levels: countermeasure optimization requires a linear-regression model");
    if (grid_size == 0) grid_size = 1;

    const ModelView mv = view_model(model);
    LevelSet set;
    set.base_score = mv.base;

    const ProfileFeatures fa = engine.profile_features(aux);
    const ProfileFeatures ft = engine.profile_features(target);

    FeatureLayout attr_layout;
    for (Attribute a : kAttributes) attr_layout.names.emplace_back(attribute_str(a));
    const SimilarityVector baseline = engine.pair(fa, ft, attr_layout);

    auto s_hat_of = [&](Attribute a) { return baseline.values[attribute_index(a)]; };
    auto fill_of = [&](Attribute a) { return mv.fill[attribute_index(a)]; };

    // -- location: keep / generalize-to-country / remove
    {
        auto s_hat = s_hat_of(Attribute::location);
        if (!s_hat || *s_hat <= 0.0 || !target.location_text) {
            set.groups.push_back(identity_group(Attribute::location,
                                                s_hat ? *s_hat : fill_of(Attribute::location)));
        } else {
            std::vector<std::pair<double, LevelAction>> cands;
            if (auto country = engine.providers().gazetteer.country_of(*target.location_text)) {
                auto gen = location_similarity(aux.location_text, country,
                                               engine.providers().gazetteer, engine.norm());
                double sim = gen ? *gen : fill_of(Attribute::location);
                LevelAction a;
                a.kind = LevelAction::Kind::generalize_location;
                a.text = *country;
                cands.push_back({sim, std::move(a)});
            }
            LevelAction rm;
            rm.kind = LevelAction::Kind::remove;
            cands.push_back({fill_of(Attribute::location), std::move(rm)});
            set.groups.push_back(staircase_group(Attribute::location, *s_hat, std::move(cands)));
        }
    }

    // -- gender: keep / remove (only a declared value can be withheld)
    {
        auto s_hat = s_hat_of(Attribute::gender);
        if (!s_hat || *s_hat <= 0.0 || !target.declared_gender) {
            set.groups.push_back(identity_group(Attribute::gender,
                                                s_hat ? *s_hat : fill_of(Attribute::gender)));
        } else {
            LevelAction rm;
            rm.kind = LevelAction::Kind::remove;
            set.groups.push_back(staircase_group(Attribute::gender, *s_hat,
                                                 {{fill_of(Attribute::gender), rm}}));
        }
    }

    // -- photo: keep / alternates / remove
    {
        auto s_hat = s_hat_of(Attribute::photo);
        if (!s_hat || *s_hat <= 0.0 || !target.photo_embedding) {
            set.groups.push_back(identity_group(Attribute::photo,
                                                s_hat ? *s_hat : fill_of(Attribute::photo)));
        } else {
            std::vector<std::pair<double, LevelAction>> cands;
            for (std::size_t i = 0; i < target.alt_photo_embeddings.size(); ++i) {
                auto sim = photo_similarity(aux.photo_embedding, target.alt_photo_embeddings[i]);
                if (!sim) continue;
                LevelAction a;
                a.kind = LevelAction::Kind::replace_photo;
                a.index = i;
                cands.push_back({*sim, std::move(a)});
            }
            LevelAction rm;
            rm.kind = LevelAction::Kind::remove;
            cands.push_back({fill_of(Attribute::photo), std::move(rm)});
            set.groups.push_back(staircase_group(Attribute::photo, *s_hat, std::move(cands)));
        }
    }

    // -- freetext: prefix removal of shared entities, then full removal
    {
        auto s_hat = s_hat_of(Attribute::freetext);
        if (!s_hat || *s_hat <= 0.0 || !target.freetext) {
            set.groups.push_back(identity_group(Attribute::freetext,
                                                s_hat ? *s_hat : fill_of(Attribute::freetext)));
        } else {
            std::vector<std::string> shared;
            for (const auto& [tok, n] : ft.entities)
                if (fa.entities.count(tok)) shared.push_back(tok);
            std::stable_sort(shared.begin(), shared.end(), [&](const std::string& x,
                                                               const std::string& y) {
                const double cx = double(fa.entities.at(x)) * ft.entities.at(x);
                const double cy = double(fa.entities.at(y)) * ft.entities.at(y);
                if (cx != cy) return cx > cy;  // biggest cosine contribution first
                return x < y;
            });
            std::vector<std::pair<double, LevelAction>> cands;
            for (std::size_t step = 1; step <= grid_size && !shared.empty(); ++step) {
                const std::size_t cut =
                    std::min(shared.size(), (step * shared.size() + grid_size - 1) / grid_size);
                std::map<std::string, int> reduced = ft.entities;
                for (std::size_t i = 0; i < cut; ++i) reduced.erase(shared[i]);
                auto sim = entity_cosine(fa.entities, reduced);
                LevelAction a;
                a.kind = LevelAction::Kind::reduce_freetext;
                a.text = render_entities(reduced);
                cands.push_back({sim ? *sim : fill_of(Attribute::freetext), std::move(a)});
            }
            LevelAction rm;
            rm.kind = LevelAction::Kind::remove;
            cands.push_back({fill_of(Attribute::freetext), std::move(rm)});
            set.groups.push_back(staircase_group(Attribute::freetext, *s_hat, std::move(cands)));
        }
    }

    // -- activity + interest + sentiment: joint checkpoints over one greedy
    //    post-removal sequence (the three attributes share the post pool)
    {
        const std::array<Attribute, 3> post_attrs = {Attribute::activity, Attribute::interest,
                                                     Attribute::sentiment};
        std::array<std::optional<double>, 3> s_hat;
        for (std::size_t i = 0; i < 3; ++i) s_hat[i] = s_hat_of(post_attrs[i]);

        const bool nothing_to_hide =
            (!s_hat[0] || *s_hat[0] <= 0.0) && (!s_hat[1] || *s_hat[1] <= 0.0) &&
            (!s_hat[2] || *s_hat[2] <= 0.0);
        if (target.posts.empty() || nothing_to_hide) {
            DistortionGroup g;
            g.attrs = {post_attrs.begin(), post_attrs.end()};
            DistortionGroup::Level id0;
            id0.level_id = 0;
            for (std::size_t i = 0; i < 3; ++i) {
                id0.sims.push_back(s_hat[i] ? *s_hat[i] : fill_of(post_attrs[i]));
                id0.utils.push_back(1.0);
            }
            g.levels.push_back(std::move(id0));
            set.groups.push_back(std::move(g));
        } else {
            const std::size_t p = target.posts.size();
            std::vector<std::vector<double>> topic_cache;
            if (engine.lda() && fa.topics) {
                topic_cache.reserve(p);
                for (const Post& post : target.posts)
                    topic_cache.push_back(infer_topics(*engine.lda(), post.text));
            }
            std::array<double, 3> w{};
            std::array<double, 3> fill{};
            for (std::size_t i = 0; i < 3; ++i) {
                w[i] = mv.weight[attribute_index(post_attrs[i])];
                fill[i] = fill_of(post_attrs[i]);
            }

            auto sims_for = [&](const std::vector<std::size_t>& remaining)
                -> std::array<double, 3> {
                std::array<double, 3> sims;
                std::vector<std::int64_t> ts;
                std::vector<Post> rp;
                ts.reserve(remaining.size());
                rp.reserve(remaining.size());
                for (std::size_t idx : remaining) {
                    ts.push_back(target.posts[idx].timestamp);
                    rp.push_back(target.posts[idx]);
                }
                auto act = (ts.empty() || fa.timestamps.empty())
                               ? std::nullopt
                               : activity_similarity(fa.timestamps, ts, engine.norm());
                sims[0] = act ? *act : fill[0];
                if (!topic_cache.empty() && !remaining.empty()) {
                    std::vector<double> mean(topic_cache.front().size(), 0.0);
                    for (std::size_t idx : remaining)
                        for (std::size_t k = 0; k < mean.size(); ++k)
                            mean[k] += topic_cache[idx][k];
                    for (double& x : mean) x /= double(remaining.size());
                    sims[1] = interest_similarity(*fa.topics, mean);
                } else {
                    sims[1] = fill[1];
                }
                auto sent = sentiment_similarity(std::span<const Post>(aux.posts),
                                                 std::span<const Post>(rp),
                                                 engine.providers().lexicon);
                sims[2] = sent ? *sent : fill[2];
                return sims;
            };

            // greedy removal sequence: each step drops the post whose removal
            // minimizes the weighted similarity total
            std::vector<std::size_t> remaining(p);
            for (std::size_t i = 0; i < p; ++i) remaining[i] = i;
            std::vector<std::array<double, 3>> sims_at(p + 1);  // after r removals
            sims_at[0] = sims_for(remaining);
            for (std::size_t r = 1; r <= p; ++r) {
                double best_total = std::numeric_limits<double>::infinity();
                std::size_t best_pos = 0;
                std::array<double, 3> best_sims{};
                for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
                    std::vector<std::size_t> trial = remaining;
                    trial.erase(trial.begin() + std::ptrdiff_t(pos));
                    auto sims = sims_for(trial);
                    const double total = w[0] * sims[0] + w[1] * sims[1] + w[2] * sims[2];
                    if (total < best_total - 1e-15) {
                        best_total = total;
                        best_pos = pos;
                        best_sims = sims;
                    }
                }
                set.removal_order.push_back(remaining[best_pos]);
                remaining.erase(remaining.begin() + std::ptrdiff_t(best_pos));
                sims_at[r] = best_sims;
            }

            // checkpoints at grid_size marks, filtered to a decreasing
            // staircase of the weighted total
            DistortionGroup g;
            g.attrs = {post_attrs.begin(), post_attrs.end()};
            auto weighted = [&](const std::array<double, 3>& s) {
                return w[0] * s[0] + w[1] * s[1] + w[2] * s[2];
            };
            auto util_of = [&](const std::array<double, 3>& s, std::size_t i) {
                return s_hat[i] && *s_hat[i] > 0.0 ? clamp_util(s[i], *s_hat[i]) : 1.0;
            };
            DistortionGroup::Level id0;
            id0.level_id = 0;
            for (std::size_t i = 0; i < 3; ++i) {
                id0.sims.push_back(sims_at[0][i]);
                id0.utils.push_back(1.0);
            }
            g.levels.push_back(std::move(id0));
            double last = weighted(sims_at[0]);
            int next_id = 1;
            for (std::size_t step = 1; step <= grid_size; ++step) {
                const std::size_t removed =
                    std::min(p, (step * p + grid_size - 1) / grid_size);
                const auto& s = sims_at[removed];
                if (weighted(s) >= last - 1e-12) continue;
                last = weighted(s);
                DistortionGroup::Level lvl;
                lvl.level_id = next_id++;
                for (std::size_t i = 0; i < 3; ++i) {
                    lvl.sims.push_back(s[i]);
                    lvl.utils.push_back(util_of(s, i));
                }
                lvl.action.kind = removed == p ? LevelAction::Kind::remove
                                               : LevelAction::Kind::drop_posts;
                lvl.action.index = removed;
                g.levels.push_back(std::move(lvl));
            }
            set.groups.push_back(std::move(g));
        }
    }
    return set;
}

BnbSolution branch_and_bound(const BnbInstance& instance, double tau) {
    const std::size_t n = instance.weighted_sim.size();
    if (n == 0 || instance.utility.size() != n)
        throw DataError("branch_and_bound: malformed instance");

    struct GroupStat {
        std::size_t index;
        double min_ws, max_ws, max_util;
        std::size_t argmin_ws;
    };
    std::vector<GroupStat> stats(n);
    for (std::size_t g = 0; g < n; ++g) {
        const auto& ws = instance.weighted_sim[g];
        const auto& ut = instance.utility[g];
        if (ws.empty() || ws.size() != ut.size())
            throw DataError("branch_and_bound: group with no levels");
        GroupStat s{g, ws[0], ws[0], ut[0], 0};
        for (std::size_t l = 1; l < ws.size(); ++l) {
            if (ws[l] < s.min_ws) {
                s.min_ws = ws[l];
                s.argmin_ws = l;
            }
            s.max_ws = std::max(s.max_ws, ws[l]);
            s.max_util = std::max(s.max_util, ut[l]);
        }
        stats[g] = s;
    }

    // branch order: biggest score span first
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return stats[a].max_ws - stats[a].min_ws > stats[b].max_ws - stats[b].min_ws;
    });

    std::vector<double> suffix_min_ws(n + 1, 0.0), suffix_max_util(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        suffix_min_ws[i] = suffix_min_ws[i + 1] + stats[order[i]].min_ws;
        suffix_max_util[i] = suffix_max_util[i + 1] + stats[order[i]].max_util;
    }

    BnbSolution sol;
    sol.chosen.assign(n, 0);
    sol.min_achievable = instance.base + suffix_min_ws[0];
    constexpr double kFeasEps = 1e-9;
    if (sol.min_achievable > tau + kFeasEps) {
        for (std::size_t g = 0; g < n; ++g) sol.chosen[g] = int(stats[g].argmin_ws);
        sol.feasible = false;
        sol.total_utility = 0.0;
        for (std::size_t g = 0; g < n; ++g)
            sol.total_utility += instance.utility[g][std::size_t(sol.chosen[g])];
        sol.total_score = sol.min_achievable;
        return sol;
    }

    std::vector<int> current(n, 0), best(n, 0);
    double best_util = -std::numeric_limits<double>::infinity();
    std::size_t nodes = 0;

    auto dfs = [&](auto&& self, std::size_t depth, double ws, double util) -> void {
        ++nodes;
        if (ws + suffix_min_ws[depth] > tau + kFeasEps) return;           // cannot reach feasibility
        if (util + suffix_max_util[depth] <= best_util - 1e-9) return;    // cannot beat incumbent
        if (depth == n) {
            if (util > best_util) {
                best_util = util;
                best = current;
            }
            return;
        }
        const std::size_t g = order[depth];
        for (std::size_t l = 0; l < instance.weighted_sim[g].size(); ++l) {
            current[std::size_t(g)] = int(l);
            self(self, depth + 1, ws + instance.weighted_sim[g][l],
                 util + instance.utility[g][l]);
        }
        current[std::size_t(g)] = 0;
    };
    dfs(dfs, 0, instance.base, 0.0);

    sol.feasible = true;
    sol.chosen = best;
    sol.nodes_visited = nodes;
    // canonical recompute in group order
    sol.total_utility = 0.0;
    sol.total_score = instance.base;
    for (std::size_t g = 0; g < n; ++g) {
        sol.total_utility += instance.utility[g][std::size_t(best[g])];
        sol.total_score += instance.weighted_sim[g][std::size_t(best[g])];
    }
    return sol;
}

DistortionPlan optimize_plan(const LevelSet& levels, const ImportanceProfile& importance,
                             const WeightModel& model, double tau) {
    if (model.kind != TrainerKind::linear_regression)
        throw DataError("optimize_plan: countermeasure optimization requires a linear-regression model");
    const ModelView mv = view_model(model);

    BnbInstance inst;
    inst.base = levels.base_score;
    for (const DistortionGroup& g : levels.groups) {
        std::vector<double> ws, ut;
        for (const auto& lvl : g.levels) {
            double w = 0.0, u = 0.0;
            for (std::size_t i = 0; i < g.attrs.size(); ++i) {
                const std::size_t a = attribute_index(g.attrs[i]);
                w += mv.weight[a] * lvl.sims[i];
                u += importance.c[a] * lvl.utils[i];
            }
            ws.push_back(w);
            ut.push_back(u);
        }
        inst.weighted_sim.push_back(std::move(ws));
        inst.utility.push_back(std::move(ut));
    }

    BnbSolution sol = branch_and_bound(inst, tau);

    DistortionPlan plan;
    plan.feasible = sol.feasible;
    plan.min_achievable = sol.min_achievable;
    plan.achieved_similarity = sol.total_score;
    plan.total_utility = sol.total_utility;
    for (std::size_t g = 0; g < levels.groups.size(); ++g) {
        const DistortionGroup& group = levels.groups[g];
        const auto& lvl = group.levels[std::size_t(sol.chosen[g])];
        plan.actions.push_back(lvl.action);
        for (std::size_t i = 0; i < group.attrs.size(); ++i)
            plan.chosen.push_back({group.attrs[i], lvl.level_id, lvl.sims[i], lvl.utils[i]});
    }
    std::sort(plan.chosen.begin(), plan.chosen.end(), [](const PlanChoice& a, const PlanChoice& b) {
        return attribute_index(a.attribute) < attribute_index(b.attribute);
    });
    return plan;
}

Profile apply_plan(const DistortionPlan& plan, const LevelSet& levels, const Profile& target) {
    Profile out = target;
    for (std::size_t g = 0; g < levels.groups.size(); ++g) {
        const LevelAction& action = plan.actions[g];
        const Attribute lead = levels.groups[g].attrs.front();
        switch (action.kind) {
            case LevelAction::Kind::keep:
                break;
            case LevelAction::Kind::remove:
                if (lead == Attribute::location) out.location_text.reset();
                else if (lead == Attribute::gender) out.declared_gender.reset();
                else if (lead == Attribute::photo) out.photo_embedding.reset();
                else if (lead == Attribute::freetext) out.freetext.reset();
                else out.posts.clear();
                break;
            case LevelAction::Kind::generalize_location:
                out.location_text = action.text;
                break;
            case LevelAction::Kind::replace_photo:
                out.photo_embedding = target.alt_photo_embeddings.at(action.index);
                break;
            case LevelAction::Kind::reduce_freetext:
                out.freetext = action.text;
                break;
            case LevelAction::Kind::drop_posts: {
                std::set<std::size_t> dropped(levels.removal_order.begin(),
                                              levels.removal_order.begin() +
                                                  std::ptrdiff_t(action.index));
                std::vector<Post> kept;
                for (std::size_t i = 0; i < target.posts.size(); ++i)
                    if (!dropped.count(i)) kept.push_back(target.posts[i]);
                out.posts = std::move(kept);
                break;
            }
        }
    }
    return out;
}

std::vector<TauSweepPoint> countermeasure_experiment(
    const Corpus& aux_eval, const Corpus& target_eval, std::span<const PairLabel> labels,
    const WeightModel& model, const SimilarityEngine& engine, std::span<const double> tau_grid,
    const ImportanceProfile& importance, std::size_t grid_size) {
    std::vector<std::pair<std::size_t, std::size_t>> coupled;  // aux idx, target idx
    for (const PairLabel& l : labels) {
        if (!l.coupled) continue;
        coupled.push_back({aux_eval.index_of(l.aux_id), target_eval.index_of(l.target_id)});
    }
    if (coupled.empty()) throw DataError("countermeasure_experiment: no coupled pairs");

    std::vector<LevelSet> level_sets;
    level_sets.reserve(coupled.size());
    for (auto [ai, ti] : coupled)
        level_sets.push_back(enumerate_levels(aux_eval.profiles[ai], target_eval.profiles[ti],
                                              model, engine, grid_size));

    std::vector<TauSweepPoint> points;
    for (double tau : tau_grid) {
        Corpus distorted = target_eval;
        TauSweepPoint pt;
        pt.tau = tau;
        double util_sum = 0.0;
        std::size_t feasible_n = 0;
        for (std::size_t i = 0; i < coupled.size(); ++i) {
            DistortionPlan plan = optimize_plan(level_sets[i], importance, model, tau);
            if (plan.feasible) {
                util_sum += plan.total_utility;
                ++feasible_n;
            } else {
                ++pt.infeasible_count;  // applied anyway, at maximal distortion
            }
            const std::size_t ti = coupled[i].second;
            distorted.profiles[ti] = apply_plan(plan, level_sets[i], distorted.profiles[ti]);
        }
        pt.mean_utility = feasible_n ? util_sum / double(feasible_n) : 0.0;

        ScoreMatrix m = build_score_matrix(aux_eval, distorted, model, engine);
        MatchResult r = global_attack(m, 0.0);
        EvalReport rep = evaluate(r, labels, AttackKind::global);
        pt.success_rate = rep.success_rate;
        points.push_back(pt);
    }
    return points;
}

void save_plans_json(std::span<const std::pair<std::string, DistortionPlan>> plans,
                     const std::filesystem::path& path) {
    json arr = json::array();
    for (const auto& [pair_id, plan] : plans) {
        json j;
        j["pair"] = pair_id;
        j["feasible"] = plan.feasible;
        j["achieved_similarity"] = plan.achieved_similarity;
        j["total_utility"] = plan.total_utility;
        if (!plan.feasible) j["min_achievable"] = plan.min_achievable;
        json chosen = json::object();
        for (const PlanChoice& c : plan.chosen) {
            chosen[std::string(attribute_str(c.attribute))] = {
                {"level_id", c.level_id},
                {"new_similarity", c.new_similarity},
                {"utility", c.utility}};
        }
        j["chosen"] = chosen;
        arr.push_back(std::move(j));
    }
    write_text_file(path, arr.dump(2) + "\n");
}

void save_sweep_csv(std::span<const TauSweepPoint> points, const std::filesystem::path& path) {
    std::string out = "tau,mean_utility,success_rate,infeasible_count\n";
    for (const TauSweepPoint& p : points) {
        out += fmt_double(p.tau);
        out += ',';
        out += fmt_double(p.mean_utility);
        out += ',';
        out += fmt_double(p.success_rate);
        out += ',';
        out += std::to_string(p.infeasible_count);
        out += '\n';
    }
    write_text_file(path, out);
}

}  // namespace relink
