#include <doctest.h>

#include "relink/evaluation.hpp"
#include "relink/util.hpp"
#include "test_util.hpp"

using namespace relink;

namespace {

MatchResult result_of(std::vector<MatchPair> pairs, double threshold,
                      std::vector<std::string> aux_universe,
                      std::vector<std::string> target_universe) {
    MatchResult r;
    r.assignments = std::move(pairs);
    r.threshold = threshold;
    r.aux_ids = std::move(aux_universe);
    r.target_ids = std::move(target_universe);
    return r;
}

}  // namespace

TEST_CASE("perfect matching gives precision, recall, and success of one") {
    std::vector<PairLabel> labels = {{"a0", "t0", true}, {"a1", "t1", true}};
    MatchResult r = result_of({{"a0", "t0", 0.9}, {"a1", "t1", 0.8}}, 0.5, {"a0", "a1"},
                              {"t0", "t1"});
    EvalReport rep = evaluate(r, labels, AttackKind::global);
    CHECK(rep.tp == 2);
    CHECK(rep.fp == 0);
    CHECK(rep.fn == 0);
    CHECK(*rep.precision == 1.0);
    CHECK(*rep.recall == 1.0);
    CHECK(rep.success_rate == 1.0);
}

TEST_CASE("zero accepted matches leaves precision undefined") {
    std::vector<PairLabel> labels = {{"a0", "t0", true}};
    MatchResult r = result_of({{"a0", "t0", 0.2}}, 0.9, {"a0"}, {"t0"});
    EvalReport rep = evaluate(r, labels, AttackKind::global);
    CHECK(rep.tp == 0);
    CHECK(rep.fp == 0);
    CHECK(rep.fn == 1);
    CHECK(!rep.precision.has_value());
    CHECK(*rep.recall == 0.0);
    CHECK(rep.success_rate == 1.0);  // matched regardless of threshold
}

TEST_CASE("three-pair hand fixture follows the confusion rules") {
    // coupled pairs: (a0,t0) matched correctly above threshold;
    // (a1,t1) matched correctly below threshold;
    // (a2,t2): a2 wrongly paired above threshold.
    std::vector<PairLabel> labels = {
        {"a0", "t0", true}, {"a1", "t1", true}, {"a2", "t2", true}};
    MatchResult r = result_of({{"a0", "t0", 0.9}, {"a1", "t1", 0.3}, {"a2", "t9", 0.8}}, 0.5,
                              {"a0", "a1", "a2"}, {"t0", "t1", "t2", "t9"});
    EvalReport rep = evaluate(r, labels, AttackKind::targeted);
    CHECK(rep.tp == 1);
    CHECK(rep.fn == 1);
    CHECK(rep.fp == 1);
    CHECK(*rep.precision == doctest::Approx(0.5));
    CHECK(*rep.recall == doctest::Approx(0.5));
    CHECK(rep.success_rate == doctest::Approx(2.0 / 3.0));
    CHECK(rep.tp + rep.fn == rep.coupled_matched);

    // each profile of a coupled pair paired wrongly counts separately
    MatchResult r2 = result_of(
        {{"a0", "t0", 0.9}, {"a1", "t1", 0.3}, {"a2", "t9", 0.8}, {"a9", "t2", 0.7}}, 0.5,
        {"a0", "a1", "a2", "a9"}, {"t0", "t1", "t2", "t9"});
    EvalReport rep2 = evaluate(r2, labels, AttackKind::targeted);
    CHECK(rep2.fp == 2);
    CHECK(*rep2.precision == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("global attack additionally counts uncoupled pairings") {
    std::vector<PairLabel> labels = {{"a0", "t0", true}, {"a1", "t1", false}};
    // a1/t1 belong to no coupled pair; their pairing counts only globally
    MatchResult r =
        result_of({{"a0", "t0", 0.9}, {"a1", "t1", 0.8}}, 0.5, {"a0", "a1"}, {"t0", "t1"});

    EvalReport targeted = evaluate(r, labels, AttackKind::targeted);
    CHECK(targeted.fp == 0);
    CHECK(targeted.tn == 0);

    EvalReport global = evaluate(r, labels, AttackKind::global);
    CHECK(global.fp == 1);
    CHECK(global.tn == 0);

    // below threshold the uncoupled pairing becomes a true negative
    MatchResult r2 =
        result_of({{"a0", "t0", 0.9}, {"a1", "t1", 0.2}}, 0.5, {"a0", "a1"}, {"t0", "t1"});
    EvalReport global2 = evaluate(r2, labels, AttackKind::global);
    CHECK(global2.fp == 0);
    CHECK(global2.tn == 1);
}

TEST_CASE("labels outside the evaluated universe do not count") {
    std::vector<PairLabel> labels = {{"a0", "t0", true}, {"a5", "t5", true}};
    MatchResult r = result_of({{"a0", "t0", 0.9}}, 0.5, {"a0"}, {"t0"});
    EvalReport rep = evaluate(r, labels, AttackKind::targeted);
    CHECK(rep.coupled_total == 1);
    CHECK(rep.success_rate == 1.0);
}

TEST_CASE("threshold sweep: recall non-increasing, tp/tn monotone, operating point") {
    std::vector<PairLabel> labels = {
        {"a0", "t0", true}, {"a1", "t1", true}, {"a2", "t2", true}, {"a3", "t3", false}};
    MatchResult r = result_of(
        {{"a0", "t0", 0.9}, {"a1", "t1", 0.6}, {"a2", "t3", 0.4}, {"a3", "t2", 0.3}}, 0.0,
        {"a0", "a1", "a2", "a3"}, {"t0", "t1", "t2", "t3"});

    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    Curve curve = precision_recall_curve(r, labels, AttackKind::global, grid);
    REQUIRE(curve.points.size() == grid.size());

    double last_recall = 2.0;
    long last_tp = 1000, last_tn = -1;
    for (const CurvePoint& p : curve.points) {
        if (p.recall) {
            CHECK(*p.recall <= last_recall + 1e-12);
            last_recall = *p.recall;
        }
        MatchResult at = r;
        at.threshold = p.threshold;
        EvalReport rep = evaluate(at, labels, AttackKind::global);
        CHECK(rep.tp <= last_tp);
        CHECK(rep.tn >= last_tn);
        last_tp = rep.tp;
        last_tn = rep.tn;
    }

    // single-point grid
    Curve single = precision_recall_curve(r, labels, AttackKind::global,
                                          std::vector<double>{0.5});
    CHECK(single.points.size() == 1);
    CHECK(single.operating_threshold == 0.5);

    CHECK_THROWS_AS(
        precision_recall_curve(r, labels, AttackKind::global, std::vector<double>{}),
        DataError);
}

TEST_CASE("knn fixtures and tie rules") {
    TrainingSet train;
    train.feature_names = {"x", "y"};
    train.rows = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
    train.labels = {0, 0, 1, 1};

    // test point on a training point with k=1 takes that label
    auto p1 = knn_predict(train, std::vector<std::vector<double>>{{0.0, 1.0}}, 1);
    CHECK(p1[0] == true);
    auto p0 = knn_predict(train, std::vector<std::vector<double>>{{1.0, 0.0}}, 1);
    CHECK(p0[0] == false);

    // hand-computed neighbor sets for k=3 at (0.9, 0.9):
    // nearest three are (1,1), (1,0), (0,1) -> labels 1,0,1 -> coupled
    auto p3 = knn_predict(train, std::vector<std::vector<double>>{{0.9, 0.9}}, 3);
    CHECK(p3[0] == true);

    // k = training size with balanced labels: exact vote tie -> uncoupled
    auto p4 = knn_predict(train, std::vector<std::vector<double>>{{0.5, 0.5}}, 4);
    CHECK(p4[0] == false);

    // distance ties break toward the smaller training-row index:
    // at (0.5, 0.0) rows 0 and 1 tie at distance 0.25; k=1 picks row 0
    auto tie = knn_predict(train, std::vector<std::vector<double>>{{0.5, 0.0}}, 1);
    CHECK(tie[0] == false);

    CHECK_THROWS_AS(knn_predict(train, std::vector<std::vector<double>>{{0, 0}}, 5), DataError);
    TrainingSet empty;
    empty.feature_names = {"x"};
    CHECK_THROWS_AS(knn_predict(empty, std::vector<std::vector<double>>{{0.0}}, 1), DataError);
}

TEST_CASE("eval json and curve csv are written") {
    auto dir = test::scratch_dir("evalout");
    std::vector<PairLabel> labels = {{"a0", "t0", true}};
    MatchResult r = result_of({{"a0", "t0", 0.9}}, 0.5, {"a0"}, {"t0"});
    EvalReport rep = evaluate(r, labels, AttackKind::global);
    Curve curve = precision_recall_curve(r, labels, AttackKind::global,
                                         default_threshold_grid());
    save_eval_json(rep, curve, dir / "eval.json");
    save_curve_csv(curve, dir / "curve.csv");
    CHECK(read_text_file(dir / "eval.json").find("success_rate") != std::string::npos);
    auto lines = read_lines(dir / "curve.csv");
    CHECK(lines[0] == "threshold,precision,recall");
    CHECK(lines.size() == default_threshold_grid().size() + 1);
}
