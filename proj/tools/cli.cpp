#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "coeye/errors.hpp"
#include "coeye/eval.hpp"
#include "coeye/model.hpp"

namespace coeye::cli {

namespace fs = std::filesystem;

namespace {

struct ConfigFlags {
    std::uint64_t seed = 42;
    int trees = 100;
    int folds = 5;
    std::vector<int> sax_alphas, sax_w, sfa_alphas, sfa_w;
    std::string sax_mode = "minmax";
    std::string smote = "on";
    int threads = 0;
    std::string strategy = "search";

    TrainConfig to_config() const {
        TrainConfig c;
        c.seed = seed;
        c.trees = trees;
        c.grid.folds = folds;
        c.grid.sax_alphas = sax_alphas;
        c.grid.sax_word_lengths = sax_w;
        c.grid.sfa_alphas = sfa_alphas;
        c.grid.sfa_word_lengths = sfa_w;
        c.sax_mode = parse_sax_mode(sax_mode);
        c.smote = smote == "on";
        c.threads = threads;
        c.strategy = strategy == "random" ? LensStrategy::Random : LensStrategy::Search;
        return c;
    }
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
    cmd->add_option("--seed", f.seed, "Random seed for every stochastic step")->capture_default_str();
    cmd->add_option("--trees", f.trees, "Trees per random forest")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--folds", f.folds, "Cross-validation folds for the lens search")->capture_default_str()->check(CLI::Range(2, 1000));
    cmd->add_option("--sax-alphas", f.sax_alphas, "SAX alphabet sizes (default 3..26)")->delimiter(',');
    cmd->add_option("--sax-w", f.sax_w, "SAX word lengths (default min(n, 128))")->delimiter(',');
    cmd->add_option("--sfa-alphas", f.sfa_alphas, "SFA alphabet sizes (default 3..26)")->delimiter(',');
    cmd->add_option("--sfa-w", f.sfa_w, "SFA Fourier value counts (default 10..130 step 10, even and <= n)")->delimiter(',');
    cmd->add_option("--sax-mode", f.sax_mode, "SAX binning: minmax or gaussian")->capture_default_str()->check(CLI::IsMember({"minmax", "gaussian"}));
    cmd->add_option("--smote", f.smote, "Oversample imbalanced training data: on or off")->capture_default_str()->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--threads", f.threads, "Worker threads, 0 = all cores")->capture_default_str();
    cmd->add_option("--strategy", f.strategy, "Lens selection: search (cross-validated) or random")->capture_default_str()->check(CLI::IsMember({"search", "random"}));
}

std::string default_data_dir() {
    const char* env = std::getenv("COEYE_DATA_DIR");
    return env ? env : "";
}

struct Source {
    std::string data = default_data_dir();
    std::string dataset;
    std::string input;
    std::string split = "TEST";
    bool no_labels = false;

    void add(CLI::App* cmd, const std::string& default_split) {
        split = default_split;
        cmd->add_option("--data", data, "Directory holding <name>_TRAIN / <name>_TEST files (env COEYE_DATA_DIR)");
        cmd->add_option("--dataset", dataset, "Dataset name");
        cmd->add_option("--input", input, "Series file in UCR format (overrides --data/--dataset)");
        cmd->add_option("--split", split, "Split read with --dataset: TRAIN or TEST")->capture_default_str()->check(CLI::IsMember({"TRAIN", "TEST"}));
        cmd->add_flag("--no-labels", no_labels, "Input rows carry no class label column");
    }

    Dataset load() const {
        LoadOptions opts;
        opts.has_labels = !no_labels;
        if (!input.empty()) return load_ucr(input, opts);
        if (dataset.empty()) throw IoError("give --input or --dataset");
        auto path = find_split_file(data, dataset, split);
        if (!path) throw IoError("no " + dataset + "_" + split + " file under '" + data + "'");
        return load_ucr(*path, opts);
    }
};

Dataset load_train(const std::string& dir, const std::string& name) {
    if (name.empty()) throw IoError("--dataset is required");
    auto path = find_split_file(dir, name, "TRAIN");
    if (!path) throw IoError("no " + name + "_TRAIN file under '" + dir + "'");
    return load_ucr(*path);
}

int exit_code_for(const Error& e) {
    switch (e.category()) {
        case Error::Category::Data:
        case Error::Category::Usage:
        case Error::Category::Model: return kUsageOrData;
        case Error::Category::Training: return kTraining;
        case Error::Category::Shape: return kShape;
    }
    return kUsageOrData;
}

void print_lenses_csv(std::ostream& os, const std::vector<Lens>& lenses) {
    os << "representation,alpha,w,drop_dc,cv_accuracy\n";
    os << std::setprecision(6) << std::fixed;
    for (const auto& l : lenses) {
        os << to_string(l.rep) << ',' << l.alpha << ',' << l.w << ',' << (l.drop_dc ? 1 : 0) << ','
           << l.cv_accuracy << '\n';
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    return f;
}

int cmd_train(const std::string& data, const std::string& dataset, const std::string& out_path,
              const ConfigFlags& flags, std::ostream& out) {
    auto train_set = load_train(data, dataset);
    TrainStats stats;
    auto model = train(train_set, flags.to_config(), &stats);
    save_model(model, out_path);
    out << "dataset " << train_set.name() << ": " << train_set.size() << " series, length "
        << train_set.length() << ", " << train_set.class_labels().size() << " classes\n";
    out << "lenses: " << model.sax_count() << " SAX, " << model.sfa_count() << " SFA ("
        << model.eyes.size() << " eyes), SFA drop_dc=" << (model.sfa_drop_dc ? 1 : 0) << "\n";
    out << "SMOTE: " << std::setprecision(4) << stats.smote.smote_percentage << " ("
        << stats.smote.total_added() << " synthetic rows)";
    for (const auto& [label, count] : stats.smote.original_counts) {
        out << "; class " << label << ": " << count << " -> "
            << count + stats.smote.added_counts.at(label);
    }
    out << "\n";
    out << "timings: search SAX " << stats.t_search_sax << " s, search SFA " << stats.t_search_sfa
        << " s, train " << stats.t_train << " s\n";
    out << "model written to " << out_path << "\n";
    return kOk;
}

int cmd_predict(const std::string& model_path, const Source& src, const std::string& out_path,
                std::ostream& out) {
    auto model = load_model(model_path);
    auto data = src.load();
    std::vector<Prediction> preds;
    preds.reserve(data.size());
    for (const auto& s : data.series()) preds.push_back(classify(model, s));

    const bool truth = !src.no_labels;
    std::size_t correct = 0;
    std::ofstream csv;
    if (!out_path.empty()) {
        csv = open_out(out_path);
        csv << "index,predicted,confidence,round" << (truth ? ",true,correct" : "") << "\n";
        csv << std::setprecision(6) << std::fixed;
    }
    for (std::size_t i = 0; i < preds.size(); ++i) {
        bool ok = truth && data[i].label == preds[i].label;
        correct += ok;
        if (csv.is_open()) {
            csv << i << ',' << preds[i].label << ',' << preds[i].confidence << ','
                << to_string(preds[i].round);
            if (truth) csv << ',' << *data[i].label << ',' << (ok ? 1 : 0);
            csv << '\n';
        }
    }
    out << "predicted " << preds.size() << " series";
    if (truth) {
        out << ", accuracy " << std::setprecision(4)
            << static_cast<double>(correct) / static_cast<double>(preds.size());
    }
    out << "\n";
    return kOk;
}

int cmd_inspect(const std::string& model_path, const Source& src, long index,
                const std::string& out_path, std::ostream& out) {
    auto model = load_model(model_path);
    auto data = src.load();
    if (index < 0 || static_cast<std::size_t>(index) >= data.size()) {
        throw IoError("index " + std::to_string(index) + " outside [0, " +
                      std::to_string(data.size()) + ")");
    }
    auto pred = classify(model, data[index], {VoteScope::Both, true});

    std::ostringstream table;
    table << "eye_index,representation,alpha,w,class,probability\n";
    table << std::setprecision(6) << std::fixed;
    const auto& m = pred.per_eye->matrix;
    for (std::size_t e = 0; e < m.rows; ++e) {
        const auto& lens = model.eyes[e].lens;
        for (std::size_t c = 0; c < m.cols; ++c) {
            table << e << ',' << to_string(lens.rep) << ',' << lens.alpha << ',' << lens.w << ','
                  << model.class_labels[c] << ',' << m.row(e)[c] << '\n';
        }
    }
    std::ostringstream trace;
    auto block = [&](const char* name, const std::optional<BlockChoice>& b) {
        if (!b) return;
        trace << name << " best " << model.class_labels[b->best] << " @ " << b->best_confidence;
        if (b->second >= 0) {
            trace << ", second " << model.class_labels[b->second] << " @ " << b->second_confidence;
        }
        if (b->disputed) trace << " (disputed)";
        trace << "\n";
    };
    trace << std::setprecision(4);
    block("SAX", pred.sax);
    block("SFA", pred.sfa);
    trace << "round " << to_string(pred.round) << ", label " << pred.label << ", confidence "
          << pred.confidence << "\n";

    if (!out_path.empty()) {
        auto f = open_out(out_path);
        f << table.str();
        out << trace.str();
    } else {
        out << table.str();
        std::istringstream lines(trace.str());
        for (std::string line; std::getline(lines, line);) out << "# " << line << "\n";
    }
    return kOk;
}

int cmd_transform(const Source& src, const std::string& rep, int alpha, int w, long index,
                  const std::string& sax_mode, bool drop_dc, std::ostream& out) {
    if (alpha < 2 || alpha > kMaxAlphabet) {
        throw InvalidAlphabet("alphabet size " + std::to_string(alpha) + " outside [2, 26]");
    }
    auto data = src.load();
    if (index < 0 || static_cast<std::size_t>(index) >= data.size()) {
        throw IoError("index " + std::to_string(index) + " outside [0, " +
                      std::to_string(data.size()) + ")");
    }
    // tables are always fitted on the training split
    Dataset fit_on = data;
    if (src.input.empty() && src.split != "TRAIN") fit_on = load_train(src.data, src.dataset);

    Lens lens{rep == "sax" ? Representation::Sax : Representation::Sfa, alpha, w,
              rep == "sfa" && drop_dc, 0.0};
    std::vector<std::vector<double>> values;
    for (const auto& s : fit_on.series()) values.push_back(lens_values(s.values, lens));
    auto binning = fit_binning(lens, values, parse_sax_mode(sax_mode));
    out << encode_word(lens_values(data[index].values, lens), binning).str() << "\n";
    return kOk;
}

std::vector<std::string> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    std::vector<std::string> names;
    for (std::string line; std::getline(in, line);) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        for (std::string name; ls >> name;) names.push_back(name);
    }
    return names;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Co-eye time-series classifier: symbolic lenses, one random forest per lens, "
                 "most-confident-lens voting.",
                 "coeye"};
    app.require_subcommand(1);
    app.set_version_flag("--version", build_version());

    std::string data = default_data_dir(), dataset, out_path, model_path;
    ConfigFlags flags;

    auto* train_cmd = app.add_subcommand("train", "Search lenses and train a model on <dataset>_TRAIN");
    train_cmd->add_option("--data", data, "Data directory (env COEYE_DATA_DIR)");
    train_cmd->add_option("--dataset", dataset, "Dataset name")->required();
    train_cmd->add_option("--out", out_path, "Model file to write")->required();
    add_config_flags(train_cmd, flags);

    Source predict_src;
    auto* predict_cmd = app.add_subcommand("predict", "Classify series with a trained model");
    predict_cmd->add_option("--model", model_path, "Model file")->required();
    predict_src.add(predict_cmd, "TEST");
    predict_cmd->add_option("--out", out_path, "CSV of index,predicted,confidence,round[,true,correct]");

    std::string lens_rep = "both";
    auto* lenses_cmd = app.add_subcommand("lenses", "List a model's lenses, or search them on <dataset>_TRAIN");
    lenses_cmd->add_option("--model", model_path, "Model file to read lenses from");
    lenses_cmd->add_option("--data", data, "Data directory (env COEYE_DATA_DIR)");
    lenses_cmd->add_option("--dataset", dataset, "Dataset to search when no --model is given");
    lenses_cmd->add_option("--rep", lens_rep, "sax, sfa or both")->capture_default_str()->check(CLI::IsMember({"sax", "sfa", "both"}));
    lenses_cmd->add_option("--out", out_path, "Also write the CSV here");
    add_config_flags(lenses_cmd, flags);

    Source inspect_src;
    long index = 0;
    auto* inspect_cmd = app.add_subcommand("inspect", "Per-eye class probabilities and vote trace for one series");
    inspect_cmd->add_option("--model", model_path, "Model file")->required();
    inspect_src.add(inspect_cmd, "TEST");
    inspect_cmd->add_option("--index", index, "Row of the input to inspect")->capture_default_str();
    inspect_cmd->add_option("--out", out_path, "Write the probability table here");

    Source transform_src;
    std::string rep = "sax", sax_mode = "minmax";
    int alpha = 4, w = 8;
    bool drop_dc = false;
    auto* transform_cmd = app.add_subcommand("transform", "Print the symbolic word of one series");
    transform_src.add(transform_cmd, "TRAIN");
    transform_cmd->add_option("--rep", rep, "sax or sfa")->capture_default_str()->check(CLI::IsMember({"sax", "sfa"}));
    transform_cmd->add_option("--alpha", alpha, "Alphabet size (2..26)")->capture_default_str();
    transform_cmd->add_option("--w", w, "Word size (SFA: even Fourier value count)")->capture_default_str();
    transform_cmd->add_option("--index", index, "Row to transform")->capture_default_str();
    transform_cmd->add_option("--sax-mode", sax_mode, "minmax or gaussian")->capture_default_str()->check(CLI::IsMember({"minmax", "gaussian"}));
    transform_cmd->add_flag("--drop-dc", drop_dc, "SFA: skip the DC coefficient");

    std::vector<std::string> datasets, mode_names{"coeye"};
    std::vector<std::uint64_t> seeds{42};
    std::string manifest;
    auto* bench_cmd = app.add_subcommand("benchmark", "Train/test runs over datasets, modes and seeds");
    bench_cmd->add_option("--data", data, "Data directory (env COEYE_DATA_DIR)");
    bench_cmd->add_option("--datasets", datasets, "Comma-separated dataset names")->delimiter(',');
    bench_cmd->add_option("--manifest", manifest, "File listing dataset names");
    bench_cmd->add_option("--modes", mode_names, "coeye, sax_only, sfa_only, random_lenses, ed1nn")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--seeds", seeds, "Comma-separated seeds")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--out", out_path, "CSV file (appended)")->required();
    add_config_flags(bench_cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageOrData;
    }

    try {
        if (*train_cmd) return cmd_train(data, dataset, out_path, flags, out);
        if (*predict_cmd) return cmd_predict(model_path, predict_src, out_path, out);
        if (*inspect_cmd) return cmd_inspect(model_path, inspect_src, index, out_path, out);
        if (*transform_cmd) {
            return cmd_transform(transform_src, rep, alpha, w, index, sax_mode, drop_dc, out);
        }
        if (*lenses_cmd) {
            std::vector<Lens> lenses;
            if (!model_path.empty()) {
                for (const auto& e : load_model(model_path).eyes) lenses.push_back(e.lens);
            } else {
                auto train_set = load_train(data, dataset);
                auto config = flags.to_config();
                SearchConfig sc{config.trees, config.seed, config.threads, config.sax_mode};
                if (lens_rep != "sfa") {
                    auto sax = search_lenses(train_set, Representation::Sax, config.grid, sc);
                    lenses.insert(lenses.end(), sax.begin(), sax.end());
                }
                if (lens_rep != "sax") {
                    auto sfa = search_sfa_lenses(train_set, config.grid, sc).lenses;
                    lenses.insert(lenses.end(), sfa.begin(), sfa.end());
                }
            }
            if (lens_rep != "both") {
                auto keep = lens_rep == "sax" ? Representation::Sax : Representation::Sfa;
                std::erase_if(lenses, [&](const Lens& l) { return l.rep != keep; });
            }
            print_lenses_csv(out, lenses);
            if (!out_path.empty()) {
                auto f = open_out(out_path);
                print_lenses_csv(f, lenses);
            }
            return kOk;
        }
        if (*bench_cmd) {
            BenchmarkOptions opts;
            opts.data_dir = data;
            opts.datasets = datasets;
            if (!manifest.empty()) {
                auto more = read_manifest(manifest);
                opts.datasets.insert(opts.datasets.end(), more.begin(), more.end());
            }
            if (opts.datasets.empty()) throw IoError("no datasets given");
            opts.modes.clear();
            for (const auto& m : mode_names) opts.modes.push_back(parse_benchmark_mode(m));
            opts.seeds = seeds;
            opts.config = flags.to_config();
            opts.out = out_path;
            opts.log = &out;
            auto reports = run_benchmark(opts);
            bool any_ok = std::any_of(reports.begin(), reports.end(),
                                      [](const EvalReport& r) { return r.status == "ok"; });
            out << reports.size() << " rows written to " << out_path << "\n";
            return any_ok ? kOk : kUsageOrData;
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        if (*bench_cmd) err << bench_cmd->help();
        return kUsageOrData;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsageOrData;
    }
    return kUsageOrData;
}

}  // namespace coeye::cli
