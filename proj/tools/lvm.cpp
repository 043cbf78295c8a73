// lvm: command-line front end for the lvmorph pipeline.
//
// Subcommands mirror the pipeline stages and talk to each other through
// files only, so any stage can be rerun in isolation. All randomness is
// derived from --seed; identical inputs + config + seed give byte-identical
// outputs.

#include "lvmorph/aha.hpp"
#include "lvmorph/bof.hpp"
#include "lvmorph/curvature.hpp"
#include "lvmorph/d2.hpp"
#include "lvmorph/features.hpp"
#include "lvmorph/learn.hpp"
#include "lvmorph/marching_cubes.hpp"
#include "lvmorph/mesh_io.hpp"
#include "lvmorph/phantom.hpp"
#include "lvmorph/pipeline.hpp"
#include "lvmorph/smoothing.hpp"
#include "lvmorph/volume.hpp"

#include <CLI/CLI.hpp>
#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = available parallelism
    std::string out_dir;
    std::string config_path;
};

// Everything configurable, with defaults matching the reference protocol.
struct PipelineConfig {
    std::uint64_t seed = 0;
    std::array<int, 3> median_kernel{7, 7, 1};
    double iso_value = 0.0;
    int normal_iterations = 10;
    int vertex_iterations = 20;
    int samples_per_segment = 500;
    int ring_depth = 2;
    int gcd_bins = lvm::kGcdBins;
    int vocab_k = 20;
    int kmeans_max_iter = 100;
    std::string method = "lda-knn";
    int knn_k = 1;
    int mlp_hidden = 10;
    int mlp_epochs = 2000;
    double mlp_learning_rate = 0.3;
    double regression_ridge = 0.0;
    double ds_threshold = lvm::kDsThreshold;
    int d2_pairs = 100000;
    int d2_bins = 64;
};

json config_to_json(const PipelineConfig& c) {
    return json{{"seed", c.seed},
                {"median_kernel", c.median_kernel},
                {"iso_value", c.iso_value},
                {"normal_iterations", c.normal_iterations},
                {"vertex_iterations", c.vertex_iterations},
                {"samples_per_segment", c.samples_per_segment},
                {"ring_depth", c.ring_depth},
                {"gcd_bins", c.gcd_bins},
                {"vocab_k", c.vocab_k},
                {"kmeans_max_iter", c.kmeans_max_iter},
                {"method", c.method},
                {"knn_k", c.knn_k},
                {"mlp_hidden", c.mlp_hidden},
                {"mlp_epochs", c.mlp_epochs},
                {"mlp_learning_rate", c.mlp_learning_rate},
                {"regression_ridge", c.regression_ridge},
                {"ds_threshold", c.ds_threshold},
                {"d2_pairs", c.d2_pairs},
                {"d2_bins", c.d2_bins}};
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

PipelineConfig load_config_file(const std::string& path) {
    PipelineConfig c;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    maybe(j, "seed", c.seed);
    maybe(j, "median_kernel", c.median_kernel);
    maybe(j, "iso_value", c.iso_value);
    maybe(j, "normal_iterations", c.normal_iterations);
    maybe(j, "vertex_iterations", c.vertex_iterations);
    maybe(j, "samples_per_segment", c.samples_per_segment);
    maybe(j, "ring_depth", c.ring_depth);
    maybe(j, "vocab_k", c.vocab_k);
    maybe(j, "kmeans_max_iter", c.kmeans_max_iter);
    maybe(j, "method", c.method);
    maybe(j, "knn_k", c.knn_k);
    maybe(j, "mlp_hidden", c.mlp_hidden);
    maybe(j, "mlp_epochs", c.mlp_epochs);
    maybe(j, "mlp_learning_rate", c.mlp_learning_rate);
    maybe(j, "regression_ridge", c.regression_ridge);
    maybe(j, "d2_pairs", c.d2_pairs);
    maybe(j, "d2_bins", c.d2_bins);
    return c;
}

// Resolves an output path against --out-dir (absolute paths pass through)
// and creates parent directories.
std::string out_path(const GlobalOptions& g, const std::string& path) {
    fs::path p(path);
    if (!g.out_dir.empty() && p.is_relative()) p = fs::path(g.out_dir) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p.string();
}

void require_input(const std::string& path, const std::string& what) {
    if (!fs::exists(path)) throw std::runtime_error("missing " + what + ": " + path);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

void write_report(const std::string& path, json report) {
    write_text(path, report.dump(2) + "\n");
}

json confusion_json(const lvm::ConfusionMatrix& cm) {
    return json{{"diseased_as_diseased", cm.counts[0][0]},
                {"diseased_as_normal", cm.counts[0][1]},
                {"normal_as_diseased", cm.counts[1][0]},
                {"normal_as_normal", cm.counts[1][1]},
                {"total", cm.total()},
                {"accuracy_percent",
                 lvm::percent_string(cm.counts[0][0] + cm.counts[1][1], cm.total())},
                {"false_alarm_percent",
                 lvm::percent_string(cm.counts[1][0], cm.counts[1][0] + cm.counts[1][1])},
                {"miss_percent",
                 lvm::percent_string(cm.counts[0][1], cm.counts[0][0] + cm.counts[0][1])}};
}

lvm::ClassifierConfig classifier_config(const PipelineConfig& c) {
    lvm::ClassifierConfig cc;
    cc.method = c.method;
    cc.knn_k = c.knn_k;
    cc.mlp_hidden = c.mlp_hidden;
    cc.mlp_epochs = c.mlp_epochs;
    cc.mlp_learning_rate = c.mlp_learning_rate;
    cc.vocab_k = c.vocab_k;
    cc.vocab_seed = c.seed;
    cc.kmeans_max_iter = c.kmeans_max_iter;
    cc.regression_ridge = c.regression_ridge;
    return cc;
}

// Per-subject feature vectors, computed or loaded from the manifest's
// precomputed CSVs.
std::vector<std::vector<lvm::FeatureVector>> gather_features(
    const std::vector<lvm::ManifestSubject>& subjects, const PipelineConfig& cfg) {
    std::vector<std::vector<lvm::FeatureVector>> all;
    all.reserve(subjects.size());
    lvm::FeatureParams params;
    params.ring_depth = cfg.ring_depth;
    params.samples_per_segment = cfg.samples_per_segment;
    params.seed = cfg.seed;
    for (const auto& s : subjects) {
        if (!s.features_csv.empty()) {
            require_input(s.features_csv, "features file for subject " + s.id);
            all.push_back(lvm::load_features_csv(s.features_csv));
            continue;
        }
        require_input(s.mesh_path, "mesh for subject " + s.id);
        require_input(s.landmarks_path, "landmarks for subject " + s.id);
        auto mesh = lvm::load_mesh(s.mesh_path);
        auto landmarks = lvm::landmarks_from_json(s.landmarks_path);
        all.push_back(lvm::subject_features(mesh, landmarks, params));
    }
    return all;
}

double territory_ds(const lvm::ManifestSubject& s, int segment_id) {
    const std::string artery = lvm::artery_name(lvm::territory_of(segment_id));
    auto it = s.percent_ds.find(artery);
    if (it == s.percent_ds.end())
        throw std::invalid_argument("subject " + s.id + " lacks percent DS for " + artery);
    return it->second;
}

// ---------------------------------------------------------------- commands

int cmd_phantom(const GlobalOptions& g, const PipelineConfig&, const std::string& spec_path,
                const std::string& out, const std::string& volume_raw,
                const std::string& volume_meta, const std::array<int, 3>& dims, double margin) {
    require_input(spec_path, "phantom spec");
    lvm::PhantomSpec spec = lvm::phantom_spec_from_json(spec_path);
    if (!out.empty()) lvm::save_mesh(lvm::generate_phantom(spec), out_path(g, out));
    if (!volume_raw.empty() || !volume_meta.empty()) {
        if (volume_raw.empty() || volume_meta.empty())
            throw std::invalid_argument("--volume and --meta must be given together");
        auto vol = lvm::phantom_volume(spec, dims, margin);
        lvm::save_volume(vol, out_path(g, volume_raw), out_path(g, volume_meta));
    }
    return 0;
}

int cmd_volume_to_mesh(const GlobalOptions& g, const PipelineConfig& cfg, const std::string& raw,
                       const std::string& meta, const std::string& out) {
    require_input(raw, "raw volume");
    require_input(meta, "volume metadata");
    lvm::ScalarVolume vol = lvm::load_volume(raw, meta);
    vol = lvm::median_filter(vol, cfg.median_kernel);
    lvm::TriangleMesh mesh = lvm::extract_isosurface(vol, cfg.iso_value);
    if (mesh.vertex_count() == 0)
        throw std::invalid_argument("iso value " + fmt(cfg.iso_value) +
                                    " produced an empty surface");
    lvm::save_mesh(mesh, out_path(g, out));
    return 0;
}

int cmd_smooth(const GlobalOptions& g, const PipelineConfig& cfg, const std::string& in,
               const std::string& out) {
    require_input(in, "input mesh");
    auto mesh = lvm::load_mesh(in);
    lvm::save_mesh(lvm::smooth_mesh(mesh, cfg.normal_iterations, cfg.vertex_iterations),
                   out_path(g, out));
    return 0;
}

int cmd_partition(const GlobalOptions& g, const std::string& mesh_path,
                  const std::string& landmarks_path, const std::string& out) {
    require_input(mesh_path, "input mesh");
    require_input(landmarks_path, "landmarks file");
    auto mesh = lvm::load_mesh(mesh_path);
    auto landmarks = lvm::landmarks_from_json(landmarks_path);
    lvm::save_labeling_csv(lvm::partition_17(mesh, landmarks), out_path(g, out));
    return 0;
}

int cmd_features(const GlobalOptions& g, const PipelineConfig& cfg, const std::string& mesh_path,
                 const std::string& landmarks_path, const std::string& out,
                 const std::string& json_out) {
    require_input(mesh_path, "input mesh");
    require_input(landmarks_path, "landmarks file");
    auto mesh = lvm::load_mesh(mesh_path);
    auto landmarks = lvm::landmarks_from_json(landmarks_path);
    lvm::FeatureParams params;
    params.ring_depth = cfg.ring_depth;
    params.samples_per_segment = cfg.samples_per_segment;
    params.seed = cfg.seed;
    auto features = lvm::subject_features(mesh, landmarks, params);
    lvm::save_features_csv(features, out_path(g, out));
    if (!json_out.empty()) lvm::save_features_json(features, out_path(g, json_out));
    return 0;
}

int cmd_d2(const GlobalOptions& g, const PipelineConfig& cfg, const std::string& mesh_path,
           const std::string& out) {
    require_input(mesh_path, "input mesh");
    auto mesh = lvm::load_mesh(mesh_path);
    auto hist = lvm::d2_descriptor(mesh, cfg.d2_pairs, cfg.d2_bins, cfg.seed);
    std::ostringstream os;
    os << "# mean_distance," << fmt(hist.mean_distance) << "\n";
    for (std::size_t i = 0; i < hist.frequencies.size(); ++i)
        os << (i ? "," : "") << fmt(hist.frequencies[i]);
    os << "\n";
    write_text(out_path(g, out), os.str());
    return 0;
}

int cmd_vocab(const GlobalOptions& g, const PipelineConfig& cfg,
              const std::vector<std::string>& feature_files, const std::string& out) {
    std::vector<lvm::FeatureVector> pooled;
    for (const auto& f : feature_files) {
        require_input(f, "features file");
        auto fs_ = lvm::load_features_csv(f);
        pooled.insert(pooled.end(), fs_.begin(), fs_.end());
    }
    if (pooled.empty()) throw std::invalid_argument("no feature vectors to cluster");
    auto vocab = lvm::build_vocabulary(lvm::feature_matrix(pooled), cfg.vocab_k, cfg.seed,
                                       cfg.kmeans_max_iter);
    lvm::save_vocabulary_json(vocab, out_path(g, out));
    return 0;
}

int cmd_histogram(const GlobalOptions& g, const std::string& features_path,
                  const std::string& vocab_path, bool per_segment, const std::string& out) {
    require_input(features_path, "features file");
    require_input(vocab_path, "vocabulary file");
    auto features = lvm::load_features_csv(features_path);
    auto vocab = lvm::load_vocabulary_json(vocab_path);
    std::ostringstream os;
    if (per_segment) {
        for (int s = 1; s <= 17; ++s) {
            auto X = lvm::segment_feature_matrix(features, s);
            if (X.rows() == 0) continue;
            auto h = lvm::quantize(X, vocab);
            os << s << "," << lvm::artery_name(lvm::territory_of(s));
            for (int i = 0; i < h.frequencies.size(); ++i) os << "," << fmt(h.frequencies[i]);
            os << "\n";
        }
    } else {
        auto h = lvm::quantize(lvm::feature_matrix(features), vocab);
        for (int i = 0; i < h.frequencies.size(); ++i) os << (i ? "," : "") << fmt(h.frequencies[i]);
        os << "\n";
    }
    write_text(out_path(g, out), os.str());
    return 0;
}

int cmd_classify_global(const GlobalOptions& g, const PipelineConfig& cfg,
                        const std::string& manifest_path, const std::string& out) {
    require_input(manifest_path, "manifest");
    auto subjects = lvm::load_manifest(manifest_path);
    auto features = gather_features(subjects, cfg);
    std::vector<Eigen::MatrixXd> X;
    std::vector<int> labels;
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        X.push_back(lvm::feature_matrix(features[i]));
        int diseased = 0;
        for (const auto& [artery, ds] : subjects[i].percent_ds)
            diseased |= lvm::binarize_ds(ds);
        labels.push_back(diseased);
    }
    auto result = lvm::classify_global_loo(X, labels, classifier_config(cfg));
    json report{{"scenario", "global"},
                {"subject_count", subjects.size()},
                {"skipped_folds", result.skipped_folds},
                {"confusion", confusion_json(result.confusion)},
                {"config", config_to_json(cfg)}};
    write_report(out_path(g, out), report);
    std::cout << "accuracy " << lvm::percent_string(result.confusion.counts[0][0] +
                                                        result.confusion.counts[1][1],
                                                    result.confusion.total())
              << "%\n";
    return 0;
}

// Per-segment matrices + per-segment labels/targets for the local scenarios.
void local_inputs(const std::vector<lvm::ManifestSubject>& subjects, const PipelineConfig& cfg,
                  std::vector<std::array<Eigen::MatrixXd, 17>>& X,
                  std::vector<std::array<int, 17>>& labels,
                  std::vector<std::array<double, 17>>& ds) {
    auto features = gather_features(subjects, cfg);
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        std::array<Eigen::MatrixXd, 17> xs;
        std::array<int, 17> ls{};
        std::array<double, 17> ts{};
        for (int s = 1; s <= 17; ++s) {
            xs[s - 1] = lvm::segment_feature_matrix(features[i], s);
            ts[s - 1] = territory_ds(subjects[i], s);
            ls[s - 1] = lvm::binarize_ds(ts[s - 1]);
        }
        X.push_back(std::move(xs));
        labels.push_back(ls);
        ds.push_back(ts);
    }
}

int cmd_classify_local(const GlobalOptions& g, const PipelineConfig& cfg,
                       const std::string& manifest_path, const std::string& out,
                       const std::string& csv_out) {
    require_input(manifest_path, "manifest");
    auto subjects = lvm::load_manifest(manifest_path);
    std::vector<std::array<Eigen::MatrixXd, 17>> X;
    std::vector<std::array<int, 17>> labels;
    std::vector<std::array<double, 17>> ds;
    local_inputs(subjects, cfg, X, labels, ds);
    auto results = lvm::classify_local_loo(X, labels, classifier_config(cfg));

    json segments = json::array();
    std::ostringstream csv;
    csv << "segment_id,artery,accuracy,false_alarm,miss,skipped_folds\n";
    for (int s = 1; s <= 17; ++s) {
        const auto& r = results[s - 1];
        json seg{{"segment_id", s},
                 {"artery", lvm::artery_name(lvm::territory_of(s))},
                 {"skipped_folds", r.skipped_folds},
                 {"confusion", confusion_json(r.confusion)}};
        segments.push_back(seg);
        csv << s << "," << lvm::artery_name(lvm::territory_of(s)) << ","
            << fmt(r.confusion.accuracy()) << "," << fmt(r.confusion.false_alarm_rate()) << ","
            << fmt(r.confusion.miss_rate()) << "," << r.skipped_folds << "\n";
    }
    json report{{"scenario", "local"},
                {"subject_count", subjects.size()},
                {"segments", segments},
                {"config", config_to_json(cfg)}};
    write_report(out_path(g, out), report);
    if (!csv_out.empty()) write_text(out_path(g, csv_out), csv.str());
    return 0;
}

int cmd_regress_local(const GlobalOptions& g, const PipelineConfig& cfg,
                      const std::string& manifest_path, const std::string& out,
                      const std::string& csv_out) {
    require_input(manifest_path, "manifest");
    auto subjects = lvm::load_manifest(manifest_path);
    std::vector<std::array<Eigen::MatrixXd, 17>> X;
    std::vector<std::array<int, 17>> labels;
    std::vector<std::array<double, 17>> ds;
    local_inputs(subjects, cfg, X, labels, ds);
    auto correlations = lvm::regress_local_loo(X, ds, classifier_config(cfg));

    json segments = json::array();
    std::ostringstream csv;
    csv << "segment_id,artery,pearson_r\n";
    for (int s = 1; s <= 17; ++s) {
        const auto& r = correlations[s - 1];
        json seg{{"segment_id", s}, {"artery", lvm::artery_name(lvm::territory_of(s))}};
        seg["pearson_r"] = r ? json(*r) : json(nullptr);
        segments.push_back(seg);
        csv << s << "," << lvm::artery_name(lvm::territory_of(s)) << ","
            << (r ? fmt(*r) : std::string("nan")) << "\n";
    }
    json report{{"scenario", "regression"},
                {"subject_count", subjects.size()},
                {"segments", segments},
                {"config", config_to_json(cfg)}};
    write_report(out_path(g, out), report);
    if (!csv_out.empty()) write_text(out_path(g, csv_out), csv.str());
    return 0;
}

int cmd_report(const GlobalOptions& g, const PipelineConfig& cfg,
               const std::vector<long>& counts, const std::string& out) {
    if (counts.size() != 4)
        throw std::invalid_argument("--confusion expects 4 comma-separated counts");
    auto cm = lvm::make_confusion(counts[0], counts[1], counts[2], counts[3]);
    json report{{"confusion", confusion_json(cm)}, {"config", config_to_json(cfg)}};
    std::cout << "accuracy " << lvm::percent_string(cm.counts[0][0] + cm.counts[1][1], cm.total())
              << "%  false-alarm "
              << lvm::percent_string(cm.counts[1][0], cm.counts[1][0] + cm.counts[1][1])
              << "%  miss "
              << lvm::percent_string(cm.counts[0][1], cm.counts[0][0] + cm.counts[0][1]) << "%\n";
    if (!out.empty()) write_report(out_path(g, out), report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lvmorph: morphology-based analysis of ventricle-like surfaces"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--seed", g.seed, "base seed for every random stage");
    app.add_option("--threads", g.threads, "worker threads (default: available parallelism)");
    app.add_option("--out-dir", g.out_dir, "directory for relative output paths");
    app.add_option("--config", g.config_path, "JSON config file (flags override it)");

    // Subcommand-local state. CLI11 fills these; callbacks run after parse.
    std::string spec_path, in_path, mesh_path, landmarks_path, raw_path, meta_path;
    std::string vocab_path, manifest_path, out, json_out, csv_out;
    std::vector<std::string> feature_files;
    std::array<int, 3> dims{64, 64, 64};
    double margin = 2.0;
    bool per_segment = false;
    std::vector<long> confusion_counts;

    // Flags that override the config file; registered on every subcommand
    // that uses them so `lvm <cmd> --samples 100` works naturally.
    PipelineConfig flags;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--median", flags.median_kernel, "median kernel (kx ky kz)");
        cmd->add_option("--iso", flags.iso_value, "iso value");
        cmd->add_option("--normal-iters", flags.normal_iterations, "normal filter iterations");
        cmd->add_option("--vertex-iters", flags.vertex_iterations, "vertex update iterations");
        cmd->add_option("--samples", flags.samples_per_segment, "samples per segment");
        cmd->add_option("--ring-depth", flags.ring_depth, "curvature neighborhood depth");
        cmd->add_option("--k", flags.vocab_k, "vocabulary size");
        cmd->add_option("--max-iter", flags.kmeans_max_iter, "k-means iteration cap");
        cmd->add_option("--method", flags.method, "classifier: lda-knn | mlp");
        cmd->add_option("--knn-k", flags.knn_k, "k for the k-NN stage");
        cmd->add_option("--mlp-hidden", flags.mlp_hidden, "MLP hidden units");
        cmd->add_option("--mlp-epochs", flags.mlp_epochs, "MLP training epochs");
        cmd->add_option("--mlp-lr", flags.mlp_learning_rate, "MLP learning rate");
        cmd->add_option("--ridge", flags.regression_ridge, "ridge penalty for regression");
        cmd->add_option("--pairs", flags.d2_pairs, "D2 sample pairs");
        cmd->add_option("--bins", flags.d2_bins, "D2 histogram bins");
        return cmd;
    };

    auto* phantom = add_common(app.add_subcommand("phantom", "generate a synthetic surface"));
    phantom->add_option("--spec", spec_path, "phantom spec JSON")->required();
    phantom->add_option("--out", out, "output mesh path");
    phantom->add_option("--volume", raw_path, "also emit the implicit field as a raw volume");
    phantom->add_option("--meta", meta_path, "volume metadata sidecar path");
    phantom->add_option("--dims", dims, "volume dimensions (nx ny nz)");
    phantom->add_option("--margin", margin, "volume margin around the shape, mm");

    auto* v2m = add_common(app.add_subcommand("volume-to-mesh", "median filter + isosurface"));
    v2m->add_option("--raw", raw_path, "raw volume data")->required();
    v2m->add_option("--meta", meta_path, "volume metadata JSON")->required();
    v2m->add_option("--out", out, "output mesh path")->required();

    auto* smooth = add_common(app.add_subcommand("smooth", "mean face normal smoothing"));
    smooth->add_option("--in", in_path, "input mesh")->required();
    smooth->add_option("--out", out, "output mesh path")->required();

    auto* partition = app.add_subcommand("partition", "17-segment labeling");
    partition->add_option("--mesh", mesh_path, "input mesh")->required();
    partition->add_option("--landmarks", landmarks_path, "landmarks JSON")->required();
    partition->add_option("--out", out, "output labels CSV")->required();

    auto* features = add_common(app.add_subcommand("features", "per-point 23-dim descriptors"));
    features->add_option("--mesh", mesh_path, "input mesh")->required();
    features->add_option("--landmarks", landmarks_path, "landmarks JSON")->required();
    features->add_option("--out", out, "output features CSV")->required();
    features->add_option("--json", json_out, "optional JSON copy");

    auto* d2 = add_common(app.add_subcommand("d2", "D2 shape distribution"));
    d2->add_option("--mesh", mesh_path, "input mesh")->required();
    d2->add_option("--out", out, "output histogram CSV")->required();

    auto* vocab = add_common(app.add_subcommand("vocab", "k-means visual vocabulary"));
    vocab->add_option("--features", feature_files, "feature CSVs to pool")->required();
    vocab->add_option("--out", out, "output vocabulary JSON")->required();

    auto* histogram = app.add_subcommand("histogram", "bag-of-features histogram");
    histogram->add_option("--features", in_path, "features CSV")->required();
    histogram->add_option("--vocab", vocab_path, "vocabulary JSON")->required();
    histogram->add_flag("--per-segment", per_segment, "one row per AHA segment");
    histogram->add_option("--out", out, "output histogram CSV")->required();

    auto* cglobal = add_common(app.add_subcommand("classify-global", "whole-surface LOO study"));
    cglobal->add_option("--manifest", manifest_path, "dataset manifest JSON")->required();
    cglobal->add_option("--out", out, "output report JSON")->required();

    auto* clocal = add_common(app.add_subcommand("classify-local", "per-segment LOO study"));
    clocal->add_option("--manifest", manifest_path, "dataset manifest JSON")->required();
    clocal->add_option("--out", out, "output report JSON")->required();
    clocal->add_option("--csv", csv_out, "per-segment accuracy CSV");

    auto* rlocal = add_common(app.add_subcommand("regress-local", "per-segment DS regression"));
    rlocal->add_option("--manifest", manifest_path, "dataset manifest JSON")->required();
    rlocal->add_option("--out", out, "output report JSON")->required();
    rlocal->add_option("--csv", csv_out, "per-segment correlation CSV");

    auto* report = app.add_subcommand("report", "metrics from confusion counts");
    report->add_option("--confusion", confusion_counts,
                       "counts: diseased-as-diseased, diseased-as-normal, "
                       "normal-as-diseased, normal-as-normal")
        ->delimiter(',')
        ->required();
    report->add_option("--out", out, "optional report JSON");

    // Let global options (--seed, --out-dir, ...) appear after the
    // subcommand name as well.
    for (CLI::App* sub : {phantom, v2m, smooth, partition, features, d2, vocab, histogram,
                          cglobal, clocal, rlocal, report})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        // Precedence: flags > config file > defaults. Start from the file
        // (or defaults) and copy over only the flags the user passed.
        PipelineConfig cfg =
            g.config_path.empty() ? PipelineConfig{} : load_config_file(g.config_path);
        CLI::App* sub = app.get_subcommands().front();
        auto passed = [&](const std::string& name) {
            return sub->count(name) > 0;
        };
        if (app.count("--seed")) cfg.seed = g.seed;
        auto overlay = [&](const char* name, auto& dst, const auto& src) {
            if (sub->get_option_no_throw(name) && passed(name)) dst = src;
        };
        overlay("--median", cfg.median_kernel, flags.median_kernel);
        overlay("--iso", cfg.iso_value, flags.iso_value);
        overlay("--normal-iters", cfg.normal_iterations, flags.normal_iterations);
        overlay("--vertex-iters", cfg.vertex_iterations, flags.vertex_iterations);
        overlay("--samples", cfg.samples_per_segment, flags.samples_per_segment);
        overlay("--ring-depth", cfg.ring_depth, flags.ring_depth);
        overlay("--k", cfg.vocab_k, flags.vocab_k);
        overlay("--max-iter", cfg.kmeans_max_iter, flags.kmeans_max_iter);
        overlay("--method", cfg.method, flags.method);
        overlay("--knn-k", cfg.knn_k, flags.knn_k);
        overlay("--mlp-hidden", cfg.mlp_hidden, flags.mlp_hidden);
        overlay("--mlp-epochs", cfg.mlp_epochs, flags.mlp_epochs);
        overlay("--mlp-lr", cfg.mlp_learning_rate, flags.mlp_learning_rate);
        overlay("--ridge", cfg.regression_ridge, flags.regression_ridge);
        overlay("--pairs", cfg.d2_pairs, flags.d2_pairs);
        overlay("--bins", cfg.d2_bins, flags.d2_bins);

        if (g.threads <= 0) g.threads = static_cast<int>(std::thread::hardware_concurrency());
        Eigen::setNbThreads(g.threads);

        if (sub == phantom)
            return cmd_phantom(g, cfg, spec_path, out, raw_path, meta_path, dims, margin);
        if (sub == v2m) return cmd_volume_to_mesh(g, cfg, raw_path, meta_path, out);
        if (sub == smooth) return cmd_smooth(g, cfg, in_path, out);
        if (sub == partition) return cmd_partition(g, mesh_path, landmarks_path, out);
        if (sub == features) return cmd_features(g, cfg, mesh_path, landmarks_path, out, json_out);
        if (sub == d2) return cmd_d2(g, cfg, mesh_path, out);
        if (sub == vocab) return cmd_vocab(g, cfg, feature_files, out);
        if (sub == histogram) return cmd_histogram(g, in_path, vocab_path, per_segment, out);
        if (sub == cglobal) return cmd_classify_global(g, cfg, manifest_path, out);
        if (sub == clocal) return cmd_classify_local(g, cfg, manifest_path, out, csv_out);
        if (sub == rlocal) return cmd_regress_local(g, cfg, manifest_path, out, csv_out);
        if (sub == report) return cmd_report(g, cfg, confusion_counts, out);
        throw std::invalid_argument("unknown subcommand");
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
