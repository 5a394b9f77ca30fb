#pragma once
// Privacy/utility countermeasure: per-attribute distortion levels for one
// coupled pair, and the exact branch-and-bound selection maximizing total
// utility subject to the attacker's score staying at or below tau.
//
// Per-pair optimizations are independent; each search is single-threaded
// and deterministic.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relink/corpus.hpp"
#include "relink/similarity.hpp"
#include "relink/training.hpp"

namespace relink {

enum class Attribute { location, gender, photo, freetext, activity, interest, sentiment };
constexpr std::array<Attribute, 7> kAttributes = {
    Attribute::location, Attribute::gender,   Attribute::photo,    Attribute::freetext,
    Attribute::activity, Attribute::interest, Attribute::sentiment};
std::string_view attribute_str(Attribute a);

struct ImportanceProfile {
    std::array<double, 7> c;  // importance per attribute, indexed by kAttributes order

    // Equal importance normalized to sum 1, so total utility lives in [0,1].
    static ImportanceProfile equal();
    double total() const;
};

struct LevelAction {
    enum class Kind { keep, remove, generalize_location, replace_photo, reduce_freetext, drop_posts };
    Kind kind = Kind::keep;
    std::string text;       // generalize_location: country; reduce_freetext: rewritten text
    std::size_t index = 0;  // replace_photo: alternate index; drop_posts: posts removed
};

// One decision unit for the optimizer. The three post-derived attributes
// (activity, interest, sentiment) share the post pool, so they form a single
// group whose levels are checkpoints along one removal sequence; the other
// four attributes are singleton groups.
struct DistortionGroup {
    std::vector<Attribute> attrs;
    struct Level {
        int level_id = 0;
        std::vector<double> sims;   // per attrs entry: similarity fed to the attacker
        std::vector<double> utils;  // per attrs entry: psi = S / S_hat, clamped to [0,1]
        LevelAction action;
    };
    std::vector<Level> levels;  // level 0 is the identity
};

struct LevelSet {
    std::vector<DistortionGroup> groups;
    // Per-pair constants of the attacker's score: bias plus every model
    // feature not governed by a group (name features sit at their fill
    // values; a missing baseline attribute stays at its fill value too).
    double base_score = 0.0;
    // target-post indices in removal order, shared by drop_posts actions
    std::vector<std::size_t> removal_order;
};

struct PlanChoice {
    Attribute attribute;
    int level_id = 0;
    double new_similarity = 0.0;
    double utility = 1.0;
};

struct DistortionPlan {
    bool feasible = false;
    std::vector<PlanChoice> chosen;     // one entry per attribute, kAttributes order
    std::vector<LevelAction> actions;   // one entry per group
    double achieved_similarity = 0.0;   // attacker score after distortion
    double total_utility = 0.0;         // importance-weighted sum over attributes
    double min_achievable = 0.0;        // reported when infeasible
};

// Requires a linear-regression model. grid_size controls the number of
// freetext / post-removal checkpoints (default 5).
LevelSet enumerate_levels(const Profile& aux, const Profile& target, const WeightModel& model,
                          const SimilarityEngine& engine, std::size_t grid_size = 5);

DistortionPlan optimize_plan(const LevelSet& levels, const ImportanceProfile& importance,
                             const WeightModel& model, double tau);

// Applies the plan's actions to a copy of the target profile.
Profile apply_plan(const DistortionPlan& plan, const LevelSet& levels, const Profile& target);

// Generic exact solver used by optimize_plan; exposed for oracle tests.
// weighted_sim[g][l] is the group's additive score contribution at level l,
// utility[g][l] its additive utility. Picks one level per group maximizing
// total utility subject to base + sum(weighted_sim) <= tau.
struct BnbInstance {
    std::vector<std::vector<double>> weighted_sim;
    std::vector<std::vector<double>> utility;
    double base = 0.0;
};
struct BnbSolution {
    bool feasible = false;
    std::vector<int> chosen;
    double total_utility = 0.0;
    double total_score = 0.0;  // base + chosen weighted sims
    double min_achievable = 0.0;
    std::size_t nodes_visited = 0;
};
BnbSolution branch_and_bound(const BnbInstance& instance, double tau);

struct TauSweepPoint {
    double tau = 0.0;
    double mean_utility = 0.0;  // over feasible pairs
    double success_rate = 0.0;
    std::size_t infeasible_count = 0;
};

// For each tau: optimize and apply plans for every coupled pair, rebuild the
// score matrix, rerun the global attack. Infeasible pairs get maximal
// distortion applied and are excluded from the utility mean.
std::vector<TauSweepPoint> countermeasure_experiment(
    const Corpus& aux_eval, const Corpus& target_eval, std::span<const PairLabel> labels,
    const WeightModel& model, const SimilarityEngine& engine, std::span<const double> tau_grid,
    const ImportanceProfile& importance, std::size_t grid_size = 5);

void save_plans_json(std::span<const std::pair<std::string, DistortionPlan>> plans,
                     const std::filesystem::path& path);
void save_sweep_csv(std::span<const TauSweepPoint> points, const std::filesystem::path& path);

}  // namespace relink
