#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coeye/data.hpp"
#include "coeye/forest.hpp"
#include "coeye/lenses.hpp"
#include "coeye/resample.hpp"

namespace coeye {

inline constexpr int kModelFormatVersion = 1;

enum class LensStrategy { Search, Random };

const char* to_string(LensStrategy s);

struct TrainConfig {
    std::uint64_t seed = 42;
    int trees = 100;
    LensGrid grid;
    SaxMode sax_mode = SaxMode::MinMax;
    bool smote = true;
    int smote_k = 5;
    // 0 = all cores. Never changes the trained model.
    int threads = 0;
    LensStrategy strategy = LensStrategy::Search;
};

// One forest bound to one lens.
struct Eye {
    Lens lens;
    Binning binning;
    RandomForestModel forest;
};

struct CoEyeModel {
    std::string dataset;
    std::size_t series_length = 0;
    std::vector<int> class_labels;
    // all SAX eyes, then all SFA eyes
    std::vector<Eye> eyes;
    TrainConfig config;
    bool sfa_drop_dc = false;

    std::size_t sax_count() const;
    std::size_t sfa_count() const { return eyes.size() - sax_count(); }
};

struct TrainStats {
    SmoteReport smote;
    double t_search_sax = 0.0;
    double t_search_sfa = 0.0;
    // oversampling plus fitting the selected eyes
    double t_train = 0.0;
};

CoEyeModel train(const Dataset& train_raw, const TrainConfig& config, TrainStats* stats = nullptr);

// Per-eye class probabilities for one series (k x c).
struct PredProb {
    ProbMatrix matrix;
    std::vector<int> class_labels;

    std::size_t eyes() const noexcept { return matrix.rows; }
};

enum class VoteRound { First, Second, Fallback };

const char* to_string(VoteRound round);

// What one representation block put forward.
struct BlockChoice {
    int best = -1;  // class column
    double best_confidence = 0.0;
    int second = -1;  // -1 when there is none
    double second_confidence = 0.0;
    bool disputed = false;  // the top rows voted for different labels
};

struct Prediction {
    int label = 0;
    double confidence = 0.0;
    VoteRound round = VoteRound::First;
    std::optional<BlockChoice> sax;
    std::optional<BlockChoice> sfa;
    std::optional<PredProb> per_eye;
};

// Two-round most-confident-block voting. Rows [0, sax_count) are SAX eyes,
// the rest SFA. Random tie-breaks draw from a stream seeded by `seed`.
Prediction vote(const PredProb& pred, std::size_t sax_count, std::uint64_t seed);

enum class VoteScope { Both, SaxOnly, SfaOnly };

struct ClassifyOptions {
    VoteScope scope = VoteScope::Both;
    bool keep_per_eye = false;
};

PredProb predict_eyes(const CoEyeModel& model, const TimeSeries& ts, VoteScope scope = VoteScope::Both);
Prediction classify(const CoEyeModel& model, const TimeSeries& ts, ClassifyOptions options = {});

// Word a given eye sees for a series.
SymbolicWord eye_word(const Eye& eye, const TimeSeries& ts);

std::string serialize_model(const CoEyeModel& model);
CoEyeModel deserialize_model(const std::string& text);
void save_model(const CoEyeModel& model, const std::filesystem::path& path);
CoEyeModel load_model(const std::filesystem::path& path);

}  // namespace coeye
