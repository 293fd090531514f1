#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "coeye/errors.hpp"
#include "coeye/model.hpp"
#include "fixtures.hpp"

using namespace coeye;

namespace {

PredProb matrix(const std::vector<std::vector<double>>& rows, std::vector<int> labels = {}) {
    PredProb p;
    p.matrix.rows = rows.size();
    p.matrix.cols = rows.front().size();
    for (const auto& r : rows) p.matrix.values.insert(p.matrix.values.end(), r.begin(), r.end());
    if (labels.empty())
        for (std::size_t c = 0; c < p.matrix.cols; ++c) labels.push_back(static_cast<int>(c));
    p.class_labels = labels;
    return p;
}

std::vector<std::vector<double>> random_rows(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    // Coarse values so confidence ties actually happen.
    std::uniform_int_distribution<int> u(0, 4);
    std::vector<std::vector<double>> out(rows, std::vector<double>(cols));
    for (auto& r : out) {
        double s = 0;
        for (auto& v : r) s += (v = u(rng) + 1);
        for (auto& v : r) v /= s;
    }
    return out;
}

TrainConfig small_config(std::uint64_t seed = 42) {
    TrainConfig c;
    c.seed = seed;
    c.trees = 20;
    c.threads = 1;
    c.grid.sax_alphas = {3, 5, 8};
    c.grid.sax_word_lengths = {8, 16};
    c.grid.sfa_alphas = {3, 5};
    c.grid.sfa_word_lengths = {4, 8};
    return c;
}

}  // namespace

TEST_CASE("worked example resolves in round two") {
    auto p = matrix({{0.8, 0.2}, {0.1, 0.9}, {0.8, 0.2}, {0.4, 0.6}, {0.7, 0.3}}, {1, 2});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto out = vote(p, 2, seed);
        CHECK(out.label == 1);
        CHECK(out.round == VoteRound::Second);
        CHECK(out.sax->best == 1);
        CHECK(out.sfa->best == 0);
    }
}

TEST_CASE("unanimous rows win in round one") {
    auto p = matrix({{0.1, 0.1, 0.8}, {0.2, 0.3, 0.5}, {0.0, 0.4, 0.6}, {0.3, 0.3, 0.4}});
    auto out = vote(p, 2, 1);
    CHECK(out.label == 2);
    CHECK(out.round == VoteRound::First);
    CHECK(out.confidence == doctest::Approx(0.8));
}

TEST_CASE("fallback prefers the more confident block") {
    auto p = matrix({{0.9, 0.1, 0.0}, {0.0, 0.2, 0.8}, {0.3, 0.7, 0.0}, {0.4, 0.6, 0.0}});
    auto out = vote(p, 2, 5);
    CHECK(out.label == 0);
    CHECK(out.round == VoteRound::Fallback);
    CHECK(out.confidence == doctest::Approx(0.9));
}

TEST_CASE("exact fallback tie is a seeded coin") {
    auto p = matrix({{0.9, 0.1, 0.0}, {0.0, 0.2, 0.8}, {0.1, 0.9, 0.0}, {0.4, 0.6, 0.0}});
    std::set<int> seen;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        auto out = vote(p, 2, seed);
        CHECK(out.round == VoteRound::Fallback);
        CHECK((out.label == 0 || out.label == 1));
        CHECK(vote(p, 2, seed).label == out.label);
        seen.insert(out.label);
    }
    CHECK(seen.size() == 2);
}

TEST_CASE("internal tie on one side defers to the other side's best") {
    // SFA's two top eyes disagree at equal confidence; SAX's best says class 0.
    auto p = matrix({{0.8, 0.2}, {0.6, 0.4}, {0.7, 0.3}, {0.3, 0.7}, {0.55, 0.45}});
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto out = vote(p, 2, seed);
        CHECK(out.label == 0);
        CHECK(out.sfa->disputed);
    }
}

TEST_CASE("single block votes directly") {
    auto p = matrix({{0.3, 0.7}, {0.6, 0.4}});
    auto sfa_only = vote(p, 0, 1);
    CHECK(sfa_only.label == 1);
    CHECK(sfa_only.round == VoteRound::First);
    CHECK_FALSE(sfa_only.sax.has_value());
    auto sax_only = vote(p, 2, 1);
    CHECK(sax_only.label == 1);
    CHECK_FALSE(sax_only.sfa.has_value());
    CHECK_THROWS_AS(vote(PredProb{}, 0, 1), EmptyEnsemble);
}

TEST_CASE("vote is invariant to row order within a block") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> sizes(1, 6), classes(2, 4);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t a = sizes(rng), b = sizes(rng);
        int c = classes(rng);
        auto rows = random_rows(a + b, c, rng);
        auto base = vote(matrix(rows), a, trial);
        std::shuffle(rows.begin(), rows.begin() + a, rng);
        std::shuffle(rows.begin() + a, rows.end(), rng);
        auto moved = vote(matrix(rows), a, trial);
        CHECK(moved.label == base.label);
        CHECK(moved.round == base.round);
        CHECK(moved.confidence == base.confidence);
    }
}

TEST_CASE("round-one agreement dominates") {
    std::mt19937_64 rng(32);
    std::uniform_int_distribution<int> sizes(1, 6);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t a = sizes(rng), b = sizes(rng);
        auto rows = random_rows(a + b, 3, rng);
        int target = trial % 3;
        std::vector<double> sure(3, 0.0);
        sure[target] = 1.0;
        rows[rng() % a] = sure;
        rows[a + rng() % b] = sure;
        auto out = vote(matrix(rows), a, trial);
        CHECK(out.label == target);
        CHECK(out.round == VoteRound::First);
    }
}

TEST_CASE("binary vote returns one of the two block labels") {
    std::mt19937_64 rng(33);
    std::uniform_int_distribution<int> sizes(1, 8);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t a = sizes(rng), b = sizes(rng);
        auto out = vote(matrix(random_rows(a + b, 2, rng)), a, trial);
        CHECK((out.label == out.sax->best || out.label == out.sfa->best));
        CHECK(out.confidence >= 0.0);
        CHECK(out.confidence <= 1.0);
    }
}

TEST_CASE("training pipeline") {
    auto data = fixtures::waves(8, 32, 12);
    TrainStats stats;
    auto model = coeye::train(data, small_config(), &stats);
    CHECK(model.eyes.size() == model.sax_count() + model.sfa_count());
    CHECK(model.sax_count() >= 1);
    CHECK(model.sfa_count() >= 1);
    CHECK(stats.smote.smote_percentage == 0.0);
    for (std::size_t i = 0; i < model.eyes.size(); ++i) {
        const auto& eye = model.eyes[i];
        CHECK((eye.lens.rep == Representation::Sax) == (i < model.sax_count()));
        CHECK(eye.forest.n_features == static_cast<std::size_t>(eye.lens.w));
        CHECK(std::holds_alternative<SaxBinning>(eye.binning) == (eye.lens.rep == Representation::Sax));
    }
    for (const auto& ts : data.series()) {
        auto p = classify(model, ts, {VoteScope::Both, true});
        CHECK(std::find(model.class_labels.begin(), model.class_labels.end(), p.label) !=
              model.class_labels.end());
        const auto& m = p.per_eye->matrix;
        CHECK(m.rows == model.eyes.size());
        for (std::size_t r = 0; r < m.rows; ++r) {
            double s = 0;
            for (double v : m.row(r)) s += v;
            CHECK(std::abs(s - 1.0) <= 1e-9);
        }
        CHECK((p.label == model.class_labels[p.sax->best] || p.label == model.class_labels[p.sfa->best]));
    }
    TimeSeries shorter{std::vector<double>(31, 0.0), 0};
    CHECK_THROWS_AS(classify(model, shorter), SeriesLengthMismatch);
}

TEST_CASE("training is deterministic across worker counts") {
    auto data = fixtures::waves(6, 32, 13);
    auto one = small_config(7);
    auto many = small_config(7);
    many.threads = 0;
    auto a = serialize_model(coeye::train(data, one));
    CHECK(a == serialize_model(coeye::train(data, one)));
    CHECK(a == serialize_model(coeye::train(data, many)));
}

TEST_CASE("training errors") {
    auto single = fixtures::blobs({6}, 8, 1);
    CHECK_THROWS_AS(coeye::train(single, small_config()), NoMinorityClass);
    auto tiny = fixtures::blobs({1}, 8, 1);
    CHECK_THROWS_AS(coeye::train(tiny, small_config()), EmptyTrainingSet);
}

TEST_CASE("single-eye model follows its forest") {
    auto data = fixtures::waves(6, 32, 14);
    auto cfg = small_config();
    cfg.grid.sax_alphas = {4};
    cfg.grid.sax_word_lengths = {8};
    auto model = coeye::train(data, cfg);
    model.eyes.resize(1);
    for (const auto& ts : data.series()) {
        auto p = predict_eyes(model, ts);
        CHECK(classify(model, ts).label == model.class_labels[argmax(p.matrix.row(0))]);
    }
}

TEST_CASE("imbalanced training oversamples first") {
    auto data = fixtures::blobs({10, 4}, 16, 3);
    TrainStats stats;
    coeye::train(data, small_config(), &stats);
    CHECK(stats.smote.smote_percentage == doctest::Approx(6.0 / 14.0));
    auto off = small_config();
    off.smote = false;
    coeye::train(data, off, &stats);
    CHECK(stats.smote.smote_percentage == 0.0);
}

TEST_CASE("save and load round-trip") {
    std::vector<Dataset> sets{fixtures::waves(6, 32, 20), fixtures::blobs({7, 5, 6}, 24, 21),
                              fixtures::load("Chinatown", "TRAIN")};
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g(0, 2);
    auto path = std::filesystem::temp_directory_path() / "coeye_model_rt.json";
    for (const auto& data : sets) {
        auto model = coeye::train(data, small_config());
        save_model(model, path);
        auto back = load_model(path);
        CHECK(serialize_model(back) == serialize_model(model));
        for (int probe = 0; probe < 100; ++probe) {
            TimeSeries ts;
            for (std::size_t t = 0; t < data.length(); ++t) ts.values.push_back(g(rng));
            auto x = classify(model, ts), y = classify(back, ts);
            CHECK(x.label == y.label);
            CHECK(x.confidence == y.confidence);
            CHECK(x.round == y.round);
        }
    }
    std::filesystem::remove(path);
}

TEST_CASE("corrupt and foreign model files") {
    auto model = coeye::train(fixtures::waves(5, 32, 22), small_config());
    auto text = serialize_model(model);
    CHECK_THROWS_AS(deserialize_model(text.substr(0, text.size() / 2)), ModelParseError);
    CHECK_THROWS_AS(deserialize_model(""), ModelParseError);
    CHECK_THROWS_AS(deserialize_model("{}"), ModelParseError);

    auto doc = nlohmann::json::parse(text);
    doc["format_version"] = "1";
    CHECK_NOTHROW(deserialize_model(doc.dump()));
    doc["format_version"] = "999";
    CHECK_THROWS_AS(deserialize_model(doc.dump()), UnsupportedModelVersion);
    doc["format_version"] = 2;
    CHECK_THROWS_AS(deserialize_model(doc.dump()), UnsupportedModelVersion);

    doc = nlohmann::json::parse(text);
    doc["eyes"][0]["forest"]["trees"][0]["left"] = nlohmann::json::array({99999});
    CHECK_THROWS_AS(deserialize_model(doc.dump()), ModelParseError);
    doc = nlohmann::json::parse(text);
    doc["eyes"][0]["lens"]["alpha"] = 40;
    CHECK_THROWS_AS(deserialize_model(doc.dump()), ModelParseError);

    auto path = std::filesystem::temp_directory_path() / "coeye_truncated.json";
    {
        std::ofstream f(path);
        f << text.substr(0, text.size() - 10);
    }
    CHECK_THROWS_AS(load_model(path), ModelParseError);
    std::filesystem::remove(path);
}
