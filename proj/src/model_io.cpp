#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coeye/errors.hpp"
#include "coeye/model.hpp"

namespace coeye {

using nlohmann::json;

namespace {

json grid_to_json(const LensGrid& g) {
    return {{"sax_alphas", g.sax_alphas},
            {"sax_word_lengths", g.sax_word_lengths},
            {"sfa_alphas", g.sfa_alphas},
            {"sfa_word_lengths", g.sfa_word_lengths},
            {"folds", g.folds}};
}

LensGrid grid_from_json(const json& j) {
    LensGrid g;
    g.sax_alphas = j.at("sax_alphas").get<std::vector<int>>();
    g.sax_word_lengths = j.at("sax_word_lengths").get<std::vector<int>>();
    g.sfa_alphas = j.at("sfa_alphas").get<std::vector<int>>();
    g.sfa_word_lengths = j.at("sfa_word_lengths").get<std::vector<int>>();
    g.folds = j.at("folds").get<int>();
    return g;
}

json lens_to_json(const Lens& l) {
    return {{"representation", to_string(l.rep)},
            {"alpha", l.alpha},
            {"w", l.w},
            {"drop_dc", l.drop_dc},
            {"cv_accuracy", l.cv_accuracy}};
}

Lens lens_from_json(const json& j) {
    Lens l;
    auto rep = j.at("representation").get<std::string>();
    if (rep == "SAX") {
        l.rep = Representation::Sax;
    } else if (rep == "SFA") {
        l.rep = Representation::Sfa;
    } else {
        throw ModelParseError("unknown representation '" + rep + "'");
    }
    l.alpha = j.at("alpha").get<int>();
    l.w = j.at("w").get<int>();
    l.drop_dc = j.at("drop_dc").get<bool>();
    l.cv_accuracy = j.at("cv_accuracy").get<double>();
    return l;
}

json binning_to_json(const Binning& b) {
    if (const auto* s = std::get_if<SaxBinning>(&b)) {
        return {{"kind", "sax"}, {"mode", to_string(s->mode)}, {"cuts", s->cuts},
                {"degenerate", s->degenerate}};
    }
    const auto& m = std::get<McbTable>(b);
    return {{"kind", "mcb"}, {"drop_dc", m.drop_dc}, {"breakpoints", m.breakpoints},
            {"degenerate", m.degenerate}};
}

Binning binning_from_json(const json& j) {
    auto kind = j.at("kind").get<std::string>();
    if (kind == "sax") {
        SaxBinning s;
        s.mode = parse_sax_mode(j.at("mode").get<std::string>());
        s.cuts = j.at("cuts").get<std::vector<double>>();
        s.degenerate = j.at("degenerate").get<bool>();
        return s;
    }
    if (kind == "mcb") {
        McbTable m;
        m.drop_dc = j.at("drop_dc").get<bool>();
        m.breakpoints = j.at("breakpoints").get<std::vector<std::vector<double>>>();
        m.degenerate = j.at("degenerate").get<bool>();
        return m;
    }
    throw ModelParseError("unknown binning kind '" + kind + "'");
}

json forest_to_json(const RandomForestModel& f) {
    json trees = json::array();
    for (const auto& t : f.trees) {
        trees.push_back({{"feature", t.feature},
                         {"threshold", t.threshold},
                         {"left", t.left},
                         {"right", t.right},
                         {"counts", t.counts}});
    }
    return {{"seed", f.seed}, {"n_features", f.n_features}, {"class_labels", f.class_labels},
            {"trees", std::move(trees)}};
}

void check(bool ok, const std::string& what) {
    if (!ok) throw ModelParseError(what);
}

RandomForestModel forest_from_json(const json& j) {
    RandomForestModel f;
    f.seed = j.at("seed").get<std::uint64_t>();
    f.n_features = j.at("n_features").get<std::size_t>();
    f.class_labels = j.at("class_labels").get<std::vector<int>>();
    const std::size_t c = f.class_labels.size();
    check(c >= 1, "forest without classes");
    for (const auto& jt : j.at("trees")) {
        DecisionTree t;
        t.feature = jt.at("feature").get<std::vector<std::int32_t>>();
        t.threshold = jt.at("threshold").get<std::vector<std::int32_t>>();
        t.left = jt.at("left").get<std::vector<std::int32_t>>();
        t.right = jt.at("right").get<std::vector<std::int32_t>>();
        t.counts = jt.at("counts").get<std::vector<std::uint32_t>>();
        const std::size_t n = t.feature.size();
        check(n >= 1 && t.threshold.size() == n && t.left.size() == n && t.right.size() == n &&
                  t.counts.size() == n * c,
              "tree arrays have inconsistent sizes");
        for (std::size_t i = 0; i < n; ++i) {
            if (t.feature[i] < 0) {
                std::uint64_t total = 0;
                for (std::size_t k = 0; k < c; ++k) total += t.counts[i * c + k];
                check(total > 0, "empty leaf");
                continue;
            }
            // children always follow their parent, which also rules out cycles
            check(static_cast<std::size_t>(t.feature[i]) < f.n_features, "split feature out of range");
            check(t.left[i] > static_cast<std::int32_t>(i) && static_cast<std::size_t>(t.left[i]) < n &&
                      t.right[i] > static_cast<std::int32_t>(i) && static_cast<std::size_t>(t.right[i]) < n,
                  "child index out of range");
        }
        f.trees.push_back(std::move(t));
    }
    check(!f.trees.empty(), "forest without trees");
    return f;
}

}  // namespace

std::string serialize_model(const CoEyeModel& model) {
    json eyes = json::array();
    for (const auto& e : model.eyes) {
        eyes.push_back({{"lens", lens_to_json(e.lens)},
                        {"binning", binning_to_json(e.binning)},
                        {"forest", forest_to_json(e.forest)}});
    }
    const auto& c = model.config;
    json doc = {
        {"format", "coeye-model"},
        {"format_version", kModelFormatVersion},
        {"dataset", model.dataset},
        {"series_length", model.series_length},
        {"class_labels", model.class_labels},
        {"sfa_drop_dc", model.sfa_drop_dc},
        {"config",
         {{"seed", c.seed},
          {"trees", c.trees},
          {"grid", grid_to_json(c.grid)},
          {"sax_mode", to_string(c.sax_mode)},
          {"smote", c.smote},
          {"smote_k", c.smote_k},
          {"strategy", to_string(c.strategy)}}},
        {"eyes", std::move(eyes)},
    };
    return doc.dump();
}

CoEyeModel deserialize_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ModelParseError(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("format_version")) {
        throw ModelParseError("missing format_version");
    }
    const auto& v = doc["format_version"];
    std::string version = v.is_string() ? v.get<std::string>() : v.dump();
    if (version != std::to_string(kModelFormatVersion)) {
        throw UnsupportedModelVersion("model format version " + version + ", this build reads " +
                                      std::to_string(kModelFormatVersion));
    }
    try {
        CoEyeModel m;
        m.dataset = doc.at("dataset").get<std::string>();
        m.series_length = doc.at("series_length").get<std::size_t>();
        m.class_labels = doc.at("class_labels").get<std::vector<int>>();
        m.sfa_drop_dc = doc.at("sfa_drop_dc").get<bool>();
        const auto& jc = doc.at("config");
        m.config.seed = jc.at("seed").get<std::uint64_t>();
        m.config.trees = jc.at("trees").get<int>();
        m.config.grid = grid_from_json(jc.at("grid"));
        m.config.sax_mode = parse_sax_mode(jc.at("sax_mode").get<std::string>());
        m.config.smote = jc.at("smote").get<bool>();
        m.config.smote_k = jc.at("smote_k").get<int>();
        auto strategy = jc.at("strategy").get<std::string>();
        check(strategy == "search" || strategy == "random", "unknown lens strategy");
        m.config.strategy = strategy == "search" ? LensStrategy::Search : LensStrategy::Random;

        bool seen_sfa = false;
        for (const auto& je : doc.at("eyes")) {
            Eye e;
            e.lens = lens_from_json(je.at("lens"));
            e.binning = binning_from_json(je.at("binning"));
            e.forest = forest_from_json(je.at("forest"));
            const bool sax = e.lens.rep == Representation::Sax;
            check(sax == std::holds_alternative<SaxBinning>(e.binning), "binning kind does not match lens");
            check(!(sax && seen_sfa), "SAX eye after an SFA eye");
            seen_sfa = seen_sfa || !sax;
            check(e.lens.w >= 1 && static_cast<std::size_t>(e.lens.w) <= m.series_length,
                  "lens word size out of range");
            check(e.forest.n_features == static_cast<std::size_t>(e.lens.w), "forest width != lens w");
            check(e.forest.class_labels == m.class_labels, "forest classes differ from model classes");
            auto alpha = std::visit([](const auto& b) { return b.alpha(); }, e.binning);
            check(alpha == e.lens.alpha, "binning alphabet does not match lens");
            if (const auto* table = std::get_if<McbTable>(&e.binning)) {
                check(table->word_size() == static_cast<std::size_t>(e.lens.w), "MCB table width != lens w");
                for (const auto& row : table->breakpoints) {
                    check(static_cast<int>(row.size()) == e.lens.alpha - 1, "ragged MCB table");
                }
            }
            m.eyes.push_back(std::move(e));
        }
        check(!m.eyes.empty(), "model has no eyes");
        return m;
    } catch (const json::exception& e) {
        throw ModelParseError(e.what());
    } catch (const Error& e) {
        if (dynamic_cast<const ModelParseError*>(&e)) throw;
        throw ModelParseError(e.what());
    }
}

void save_model(const CoEyeModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << serialize_model(model);
    if (!out) throw IoError("failed writing " + path.string());
}

CoEyeModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

}  // namespace coeye
