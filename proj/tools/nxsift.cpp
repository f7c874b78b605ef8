#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "nxsift/bench.hpp"
#include "nxsift/collision.hpp"
#include "nxsift/dga_sim.hpp"
#include "nxsift/domain.hpp"
#include "nxsift/engine.hpp"
#include "nxsift/model_archive.hpp"

using namespace nxsift;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "nxsift 1.0.0";
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitModel = 3;

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    }
    return lines;
}

// benign lists may hold bare SLDs or full domains
std::vector<std::string> read_benign_slds(const std::string& path, const SuffixList& suffixes) {
    std::vector<std::string> slds;
    for (const auto& line : read_lines(path)) {
        if (line.find('.') == std::string::npos) {
            if (line.substr(0, 4) != "xn--") slds.push_back(line);
            continue;
        }
        const ParsedName p = parse_qname(line, suffixes, true);
        if (p.ok()) slds.push_back(p.sld);
    }
    if (slds.empty()) throw std::runtime_error("no usable entries in " + path);
    return slds;
}

struct CommonPaths {
    std::string suffixes = std::string(NXSIFT_DATA_DIR) + "/suffixes.txt";
    std::string lexicon = std::string(NXSIFT_DATA_DIR) + "/lexicon.txt";
    std::string config;
};

EngineConfig load_config(const CommonPaths& paths) {
    std::string path = paths.config;
    if (path.empty()) {
        if (const char* env = std::getenv("NXSIFT_CONFIG")) path = env;
    }
    return path.empty() ? EngineConfig{} : EngineConfig::from_file(path);
}

json config_snapshot(const EngineConfig& cfg) {
    json j;
    j["word_strike_threshold"] = cfg.word_strike_threshold;
    j["pattern_strike_threshold"] = cfg.pattern_strike_threshold;
    j["epoch_seconds"] = cfg.epoch_seconds;
    j["min_word_len"] = cfg.min_word_len;
    j["window_size"] = cfg.window_size;
    j["long_domain_len"] = cfg.long_domain_len;
    j["classifier_enabled"] = cfg.classifier_enabled;
    j["classifier_score_threshold"] = cfg.classifier_score_threshold;
    j["classifier_consecutive"] = cfg.classifier_consecutive;
    j["escalation_min_filters"] = cfg.escalation_min_filters;
    j["suffix_fallback_last_label"] = cfg.suffix_fallback_last_label;
    return j;
}

DgaTemplate template_from_json_file(const std::string& path, uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open template: " + path);
    json doc;
    in >> doc;
    DgaTemplate t;
    t.kind = template_kind_from_string(doc.at("kind").get<std::string>());
    t.family = doc.value("family", std::string("custom"));
    if (doc.contains("dictionaries")) {
        for (const auto& d : doc["dictionaries"]) {
            if (d.is_string())
                t.dictionaries.push_back(read_lines(d.get<std::string>()));
            else
                t.dictionaries.push_back(d.get<std::vector<std::string>>());
        }
    }
    t.min_len = doc.value("min_len", 0);
    t.max_len = doc.value("max_len", 0);
    if (doc.contains("separators"))
        t.separators = doc["separators"].get<std::vector<std::string>>();
    if (doc.contains("tlds")) t.tlds = doc["tlds"].get<std::vector<std::string>>();
    t.stem = doc.value("stem", std::string());
    t.seed = seed;
    return t;
}

struct SampleSet {
    std::vector<LabeledSample> samples;
    std::vector<std::string> benign_slds;
};

SampleSet build_samples(const std::string& benign_path,
                        const std::vector<std::string>& agd_paths,
                        const SuffixList& suffixes, const BenignGramSet& grams,
                        const MarkovGibberishModel& markov, const UnigramLexicon& lexicon) {
    SampleSet out;
    out.benign_slds = read_benign_slds(benign_path, suffixes);
    for (const auto& sld : out.benign_slds) {
        LabeledSample s;
        s.features = extract(sld, grams, markov, lexicon);
        s.label = Label::benign;
        s.family = "benign";
        out.samples.push_back(std::move(s));
    }
    for (const auto& path : agd_paths) {
        const GeneratedCorpus corpus = read_corpus_csv(path);
        for (const auto& rec : corpus.records) {
            const ParsedName p = parse_qname(rec.qname, suffixes, true);
            if (!p.ok()) continue;
            LabeledSample s;
            s.features = extract(p.sld, grams, markov, lexicon);
            s.label = Label::agd;
            s.family = rec.family;
            out.samples.push_back(std::move(s));
        }
    }
    return out;
}

void write_report_csv(const std::string& path,
                      const std::vector<std::pair<std::string, EvalReport>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << "class,precision,recall,f1,f1_stddev,tp,fp,tn,fn\n";
    for (const auto& [name, r] : rows) {
        out << name << "," << r.precision_agd << "," << r.recall_agd << "," << r.f1_agd
            << "," << r.f1_stddev << "," << r.tp << "," << r.fp << "," << r.tn << ","
            << r.fn << "\n";
    }
}

int cmd_simulate(const CommonPaths& paths, const std::string& family,
                 const std::string& template_path, size_t count, uint64_t seed,
                 const std::string& out_path, bool unique, const std::string& label) {
    DgaTemplate tmpl;
    if (!template_path.empty()) {
        tmpl = template_from_json_file(template_path, seed);
    } else {
        const UnigramLexicon lexicon = UnigramLexicon::from_file(paths.lexicon);
        tmpl = family_template(family, lexicon, seed);
    }
    const GeneratedCorpus corpus = generate(tmpl, count, unique);
    write_corpus_csv(corpus, label, out_path);
    std::cerr << "wrote " << corpus.records.size() << " records to " << out_path << "\n";
    return 0;
}

int cmd_train(const CommonPaths& paths, const std::string& benign_path,
              const std::vector<std::string>& agd_paths, const std::string& model_path,
              const std::string& report_path, const std::string& english_path, int trees,
              int folds, int repeats, uint64_t seed, int threads) {
    const SuffixList suffixes = SuffixList::from_file(paths.suffixes);
    const UnigramLexicon lexicon = UnigramLexicon::from_file(paths.lexicon);

    ModelArchive model;
    const std::vector<std::string> benign_slds = read_benign_slds(benign_path, suffixes);
    model.grams = build_benign_grams(benign_slds);
    model.markov = train_markov(read_lines(english_path));

    const SampleSet set =
        build_samples(benign_path, agd_paths, suffixes, model.grams, model.markov, lexicon);

    ForestParams params;
    params.n_trees = trees;
    params.seed = seed;
    params.n_threads = threads;
    model.forest = TreeEnsemble::train(set.samples, params);
    save_model(model, model_path);

    std::vector<std::pair<std::string, EvalReport>> rows;
    rows.emplace_back("all", cross_validate(set.samples, folds, repeats, trees, seed));
    // per-family rows: family AGDs against an equal-sized benign slice
    std::vector<std::string> families;
    for (const auto& s : set.samples) {
        if (s.label == Label::agd &&
            std::find(families.begin(), families.end(), s.family) == families.end())
            families.push_back(s.family);
    }
    if (families.size() > 1) {
        for (const auto& family : families) {
            std::vector<LabeledSample> subset;
            size_t family_n = 0;
            for (const auto& s : set.samples)
                if (s.label == Label::agd && s.family == family) {
                    subset.push_back(s);
                    ++family_n;
                }
            size_t benign_taken = 0;
            for (const auto& s : set.samples) {
                if (s.label == Label::benign && benign_taken < family_n) {
                    subset.push_back(s);
                    ++benign_taken;
                }
            }
            rows.emplace_back(family, cross_validate(subset, folds, repeats, trees, seed));
        }
    }
    if (!report_path.empty()) write_report_csv(report_path, rows);
    for (const auto& [name, r] : rows) {
        std::cerr << name << ": precision=" << r.precision_agd << " recall=" << r.recall_agd
                  << " f1=" << r.f1_agd << " sigma=" << r.f1_stddev << "\n";
    }
    return 0;
}

int cmd_evaluate(const CommonPaths& paths, const std::string& model_path,
                 const std::string& benign_path, const std::vector<std::string>& agd_paths,
                 const std::string& report_path) {
    const SuffixList suffixes = SuffixList::from_file(paths.suffixes);
    const UnigramLexicon lexicon = UnigramLexicon::from_file(paths.lexicon);
    const ModelArchive model = load_model(model_path);
    const SampleSet set =
        build_samples(benign_path, agd_paths, suffixes, model.grams, model.markov, lexicon);

    EvalReport report;
    for (const auto& s : set.samples) {
        const Prediction p = model.forest.predict(s.features);
        const bool truth = s.label == Label::agd;
        const bool pred = p.label == Label::agd;
        if (truth && pred) ++report.tp;
        else if (!truth && pred) ++report.fp;
        else if (!truth && !pred) ++report.tn;
        else ++report.fn;
    }
    const double tp = report.tp, fp = report.fp, tn = report.tn, fn = report.fn;
    report.precision_agd = tp + fp == 0 ? 0 : tp / (tp + fp);
    report.recall_agd = tp + fn == 0 ? 0 : tp / (tp + fn);
    report.f1_agd = f1_score(report.precision_agd, report.recall_agd);
    report.precision_benign = tn + fn == 0 ? 0 : tn / (tn + fn);
    report.recall_benign = tn + fp == 0 ? 0 : tn / (tn + fp);
    report.f1_benign = f1_score(report.precision_benign, report.recall_benign);

    if (!report_path.empty()) write_report_csv(report_path, {{"all", report}});
    std::cout << "precision=" << report.precision_agd << " recall=" << report.recall_agd
              << " f1=" << report.f1_agd << "\n";
    return 0;
}

int cmd_detect(const CommonPaths& paths, const std::string& input_path,
               const std::string& model_path, const std::string& out_path,
               const std::string& manifest_path, const std::string& whitelist_path,
               double max_bad_fraction) {
    const auto started = std::chrono::steady_clock::now();
    EngineConfig cfg = load_config(paths);
    const SuffixList suffixes = SuffixList::from_file(paths.suffixes);
    const UnigramLexicon lexicon = UnigramLexicon::from_file(paths.lexicon);

    ModelArchive archive;
    EngineModels models;
    models.lexicon = &lexicon;
    if (cfg.classifier_enabled) {
        if (model_path.empty())
            throw std::runtime_error("classifier enabled but no --model given "
                                     "(disable via config to run filters only)");
        archive = load_model(model_path);
        models.grams = &archive.grams;
        models.markov = &archive.markov;
        models.forest = &archive.forest;
    }
    DetectionEngine engine(cfg, models);
    if (!whitelist_path.empty()) engine.load_whitelist(whitelist_path);

    std::ifstream file_in;
    std::istream* in = &std::cin;
    if (input_path != "-") {
        file_in.open(input_path);
        if (!file_in) throw std::runtime_error("cannot open input: " + input_path);
        in = &file_in;
    }
    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (out_path != "-") {
        file_out.open(out_path);
        if (!file_out) throw std::runtime_error("cannot write output: " + out_path);
        out = &file_out;
    }

    uint64_t lines = 0, skipped = 0, alerts_emitted = 0;
    std::string line;
    while (std::getline(*in, line)) {
        if (line.empty() || line[0] == '#') continue;
        ++lines;
        std::istringstream fields(line);
        int64_t ts = 0;
        std::string host, qname;
        if (!(fields >> ts >> host >> qname)) {
            ++skipped;
            continue;
        }
        DomainRecord rec;
        if (make_record(host, ts, qname, suffixes, cfg.suffix_fallback_last_label, rec) !=
            ParseStatus::ok) {
            ++skipped;
            continue;
        }
        for (const Alert& alert : engine.observe(rec)) {
            if (engine.filters_alerted(alert.host_id) < cfg.escalation_min_filters) continue;
            json j;
            j["host"] = alert.host_id;
            j["filter"] = to_string(alert.filter);
            j["evidence"] = alert.evidence;
            j["timestamp"] = alert.timestamp;
            j["count"] = alert.domains_seen;
            *out << j.dump() << "\n";
            ++alerts_emitted;
        }
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (!manifest_path.empty()) {
        json manifest;
        manifest["tool"] = kVersion;
        manifest["config"] = config_snapshot(cfg);
        manifest["model_hash"] =
            model_path.empty() ? json(nullptr) : json(file_fnv1a(model_path));
        manifest["input_hash"] =
            input_path == "-" ? json(nullptr) : json(file_fnv1a(input_path));
        manifest["records"] = lines - skipped;
        manifest["skipped"] = skipped;
        manifest["alerts"] = alerts_emitted;
        manifest["hosts"] = engine.host_count();
        manifest["elapsed_seconds"] = elapsed;
        manifest["records_per_second"] =
            elapsed > 0 ? static_cast<double>(lines - skipped) / elapsed : 0.0;
        std::ofstream mout(manifest_path);
        if (!mout) throw std::runtime_error("cannot write manifest: " + manifest_path);
        mout << manifest.dump(2) << "\n";
    }
    if (skipped > 0)
        std::cerr << "skipped " << skipped << " malformed line(s) of " << lines << "\n";
    if (lines > 0 &&
        static_cast<double>(skipped) / static_cast<double>(lines) > max_bad_fraction)
        throw std::runtime_error("malformed line fraction above threshold");
    return 0;
}

int cmd_bench(const CommonPaths& paths, const std::vector<std::string>& corpus_paths,
              const std::string& benign_path, size_t benign_count, int repeats,
              uint64_t seed, int t_min, int t_max, const std::string& outdir) {
    EngineConfig cfg = load_config(paths);
    const SuffixList suffixes = SuffixList::from_file(paths.suffixes);
    const UnigramLexicon lexicon = UnigramLexicon::from_file(paths.lexicon);

    std::vector<ShuffleBenchResult> results;
    auto bench_corpus = [&](const std::vector<std::string>& qnames, const std::string& name) {
        for (int t = t_min; t <= t_max; ++t) {
            results.push_back(
                shuffle_bench(qnames, name, suffixes, lexicon, cfg, t, repeats, seed));
            const auto& r = results.back();
            std::cerr << name << " t=" << t << ": mean_word=" << mean_of(r.first_word_alert)
                      << " mean_pattern=" << mean_of(r.first_pattern_alert) << "\n";
        }
    };

    for (const auto& path : corpus_paths) {
        std::string label;
        const GeneratedCorpus corpus = read_corpus_csv(path, &label);
        if (corpus.records.empty()) throw std::runtime_error("empty corpus: " + path);
        std::vector<std::string> qnames;
        qnames.reserve(corpus.records.size());
        for (const auto& rec : corpus.records) qnames.push_back(rec.qname);
        bench_corpus(qnames, corpus.records.front().family);
    }
    if (!benign_path.empty()) {
        const std::vector<std::string> slds = read_benign_slds(benign_path, suffixes);
        const GeneratedCorpus corpus =
            sample_benign(slds, std::min(benign_count, slds.size()), seed);
        std::vector<std::string> qnames;
        for (const auto& rec : corpus.records) qnames.push_back(rec.qname);
        bench_corpus(qnames, "benign");
    }
    write_bench_distribution_csv(results, outdir + "/bench_distributions.csv");
    write_bench_summary_csv(results, outdir + "/bench_summary.csv");
    std::cerr << "wrote " << outdir << "/bench_distributions.csv and bench_summary.csv\n";
    return 0;
}

int cmd_plan(const std::vector<long>& dict_sizes, const std::vector<int>& thresholds,
             double target, const std::string& out_path) {
    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (out_path != "-") {
        file_out.open(out_path);
        if (!file_out) throw std::runtime_error("cannot write: " + out_path);
        out = &file_out;
    }
    *out << "L,t,n,p\n";
    for (long L : dict_sizes) {
        for (int t : thresholds) {
            const long n = n_for_probability(L, t, target);
            *out << L << "," << t << "," << n << "," << p_t_collision(L, n, t).p << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wordlist-DGA detection over NXDomain streams"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonPaths paths;
    app.add_option("--suffixes", paths.suffixes, "suffix list file");
    app.add_option("--lexicon", paths.lexicon, "unigram lexicon file");
    app.add_option("--config", paths.config,
                   "engine config file (or NXSIFT_CONFIG env var)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a labeled synthetic corpus");
    std::string sim_family, sim_template, sim_out = "corpus.csv", sim_label = "agd";
    size_t sim_count = 1000;
    uint64_t sim_seed = 0;
    bool sim_unique = false;
    sim->add_option("--family", sim_family, "preset family name");
    sim->add_option("--template", sim_template, "template JSON file");
    sim->add_option("--count", sim_count, "records to generate")->required();
    sim->add_option("--seed", sim_seed, "generator seed")->required();
    sim->add_option("--out", sim_out, "output CSV path");
    sim->add_option("--label", sim_label, "label column value");
    sim->add_flag("--unique", sim_unique, "skip duplicate qnames");

    // train
    auto* train = app.add_subcommand("train", "build gram/markov models and the forest");
    std::string train_benign, train_model = "model.json", train_report = "report.csv";
    std::string train_english = std::string(NXSIFT_DATA_DIR) + "/english_text.txt";
    std::vector<std::string> train_agd;
    int train_trees = 100, train_folds = 10, train_repeats = 10, train_threads = 0;
    uint64_t train_seed = 0;
    train->add_option("--benign", train_benign, "benign SLD/domain list")->required();
    train->add_option("--agd", train_agd, "AGD corpus CSV (repeatable)")->required();
    train->add_option("--out", train_model, "model archive path");
    train->add_option("--report", train_report, "evaluation report CSV");
    train->add_option("--english-text", train_english, "markov training text");
    train->add_option("--trees", train_trees, "ensemble size");
    train->add_option("--folds", train_folds, "cross-validation folds");
    train->add_option("--repeats", train_repeats, "cross-validation repeats");
    train->add_option("--threads", train_threads, "training threads (0 = auto)");
    train->add_option("--seed", train_seed, "training seed")->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "apply a model to labeled corpora");
    std::string eval_model, eval_benign, eval_report;
    std::vector<std::string> eval_agd;
    eval->add_option("--model", eval_model, "model archive")->required();
    eval->add_option("--benign", eval_benign, "benign SLD/domain list")->required();
    eval->add_option("--agd", eval_agd, "AGD corpus CSV (repeatable)")->required();
    eval->add_option("--report", eval_report, "report CSV path");

    // detect
    auto* detect = app.add_subcommand("detect", "run the three filters over a record stream");
    std::string det_input = "-", det_model, det_out = "-", det_manifest = "manifest.json";
    std::string det_whitelist;
    double det_bad_fraction = 0.1;
    detect->add_option("--input", det_input, "record file or - for stdin");
    detect->add_option("--model", det_model, "model archive");
    detect->add_option("--out", det_out, "alert JSON-lines output or -");
    detect->add_option("--manifest", det_manifest, "run manifest path ('' to skip)");
    detect->add_option("--whitelist", det_whitelist, "SLD whitelist file");
    detect->add_option("--max-bad-fraction", det_bad_fraction,
                       "tolerated malformed-line fraction");

    // bench
    auto* bench = app.add_subcommand("bench", "records-to-alert distributions over shuffles");
    std::vector<std::string> bench_corpora;
    std::string bench_benign, bench_outdir = ".";
    size_t bench_benign_count = 10000;
    int bench_repeats = 1000, bench_tmin = 3, bench_tmax = 7;
    uint64_t bench_seed = 0;
    bench->add_option("--corpus", bench_corpora, "labeled corpus CSV (repeatable)");
    bench->add_option("--benign", bench_benign, "benign list to sample");
    bench->add_option("--benign-count", bench_benign_count, "benign sample size");
    bench->add_option("--repeats", bench_repeats, "shuffles per cell");
    bench->add_option("--seed", bench_seed, "shuffle seed")->required();
    bench->add_option("--t-min", bench_tmin, "lowest strike threshold");
    bench->add_option("--t-max", bench_tmax, "highest strike threshold");
    bench->add_option("--outdir", bench_outdir, "output directory");

    // plan
    auto* plan = app.add_subcommand("plan", "collision threshold planning table");
    std::vector<long> plan_L;
    std::vector<int> plan_t{2, 3, 4, 5, 6, 7};
    double plan_target = 0.5;
    std::string plan_out = "-";
    plan->add_option("--L", plan_L, "dictionary size (repeatable)")->required();
    plan->add_option("--t", plan_t, "strike threshold (repeatable)");
    plan->add_option("--target", plan_target, "target probability");
    plan->add_option("--out", plan_out, "output CSV or -");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*sim) {
            if (sim_family.empty() == sim_template.empty())
                throw std::runtime_error("simulate needs exactly one of --family/--template");
            return cmd_simulate(paths, sim_family, sim_template, sim_count, sim_seed,
                                sim_out, sim_unique, sim_label);
        }
        if (*train)
            return cmd_train(paths, train_benign, train_agd, train_model, train_report,
                             train_english, train_trees, train_folds, train_repeats,
                             train_seed, train_threads);
        if (*eval) return cmd_evaluate(paths, eval_model, eval_benign, eval_agd, eval_report);
        if (*detect)
            return cmd_detect(paths, det_input, det_model, det_out, det_manifest,
                              det_whitelist, det_bad_fraction);
        if (*bench)
            return cmd_bench(paths, bench_corpora, bench_benign, bench_benign_count,
                             bench_repeats, bench_seed, bench_tmin, bench_tmax,
                             bench_outdir);
        if (*plan) return cmd_plan(plan_L, plan_t, plan_target, plan_out);
    } catch (const ModelMismatchError& e) {
        std::cerr << "model mismatch: " << e.what() << "\n";
        return kExitModel;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
